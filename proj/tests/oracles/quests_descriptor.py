"""Freeze reference descriptors from the published QUESTS package.

Writes a rattled periodic copper cell and its descriptor rows. The structure
is dense enough that every atom has k neighbors inside the cutoff and no
distance ties, the regime where the reference and this library agree.

    python3 tests/oracles/quests_descriptor.py tests/data
"""
import sys
from pathlib import Path

import numpy as np
from ase.build import bulk
from ase.io import read, write
from quests.descriptor import get_descriptors

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
atoms = bulk("Cu", "fcc", a=3.6).repeat((3, 3, 3))
atoms.cell[0, 1] += 0.37
atoms.cell[2, 0] -= 0.21
atoms.rattle(0.08, seed=11)
atoms.wrap()
write(out / "quests_cu.xyz", atoms, format="extxyz")
# Descriptors of the structure exactly as stored in the file.
atoms = read(out / "quests_cu.xyz")

k, cutoff = 12, 5.0
x = get_descriptors([atoms], k=k, cutoff=cutoff)
with open(out / "quests_cu_k12.txt", "w") as fh:
    fh.write(f"# k={k} cutoff={cutoff} rows={x.shape[0]} width={x.shape[1]}\n")
    for row in x:
        fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
