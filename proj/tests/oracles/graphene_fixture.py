"""Write a GAP-20 style extended-XYZ file and count it with ASE.

Frames mimic the Graphene subset layout: `force` columns, a quoted virial,
config_type and a cutoff key. ASE is the independent reader; the counts
and checksums it reports are frozen in graphene_like.counts.

    python3 tests/oracles/graphene_fixture.py tests/data
"""
import sys
from pathlib import Path

import numpy as np
from ase.io import read

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
rng = np.random.default_rng(20)
a = 2.46
lines = []
for f in range(7):
    reps = 1 + f % 3
    cell = np.array([[a * reps, 0, 0], [-a * reps / 2, a * reps * 3**0.5 / 2, 0], [0, 0, 20.0]])
    basis = np.array([[0, 0, 10.0], [a / 2, a / (2 * 3**0.5), 10.0]])
    pos = []
    for i in range(reps):
        for j in range(reps):
            shift = i * cell[0] / reps + j * cell[1] / reps
            pos.extend(basis + shift)
    pos = np.array(pos) + rng.normal(scale=0.03, size=(len(pos), 3))
    forces = rng.normal(scale=0.7, size=pos.shape)
    virial = rng.normal(size=9)
    lines.append(str(len(pos)))
    lattice = " ".join(f"{v:.10f}" for v in cell.ravel())
    lines.append(
        f'Lattice="{lattice}" Properties=species:S:1:pos:R:3:force:R:3 '
        f'virial="{" ".join(f"{v:.6f}" for v in virial)}" config_type=Graphene '
        f'cutoff=-1.0 energy={-9.2 * len(pos) + rng.normal():.8f} pbc="T T T"'
    )
    for p, fc in zip(pos, forces):
        lines.append("C " + " ".join(f"{v:.10f}" for v in (*p, *fc)))
(out / "graphene_like.xyz").write_text("\n".join(lines) + "\n")

frames = read(out / "graphene_like.xyz", index=":")
forces = np.concatenate([fr.arrays["force"] for fr in frames])
with open(out / "graphene_like.counts", "w") as fh:
    fh.write(f"frames {len(frames)}\n")
    fh.write(f"atoms {sum(len(fr) for fr in frames)}\n")
    fh.write(f"force_norm_sum {np.linalg.norm(forces, axis=1).sum():.15g}\n")
    fh.write(f"energy_sum {sum(fr.get_potential_energy() for fr in frames):.15g}\n")
