#include "atomcover/descriptor_cache.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "atomcover/error.hpp"

namespace atomcover {
namespace {

constexpr std::array<char, 8> kMagic{'A', 'C', 'D', 'E', 'S', 'C', '0', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
  static_assert(sizeof(T) == 8);
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error("truncated descriptor cache");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[i];
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_descriptor_cache(const DescriptorSet& descs,
                            const std::string& input_digest, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, descs.params.k);
  put<double>(out, descs.params.cutoff);
  put<std::uint64_t>(out, descs.environment_count());
  put<std::uint64_t>(out, descs.structure_count());
  put<std::uint64_t>(out, input_digest.size());
  out.write(input_digest.data(), static_cast<std::streamsize>(input_digest.size()));
  for (const auto& span : descs.offsets) {
    put<std::uint64_t>(out, span.start);
    put<std::uint64_t>(out, span.length);
  }
  const double* v = descs.values.data();
  for (Eigen::Index i = 0; i < descs.values.size(); ++i) put<double>(out, v[i]);
  if (!out) throw Error("write error on descriptor cache");
}

std::optional<DescriptorSet> read_descriptor_cache(
    std::istream& in, const std::string& input_digest,
    const DescriptorParams& params) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) return std::nullopt;

  DescriptorSet out;
  out.params.k = get<std::uint64_t>(in);
  out.params.cutoff = get<double>(in);
  const auto n_env = get<std::uint64_t>(in);
  const auto n_struct = get<std::uint64_t>(in);
  const auto digest_len = get<std::uint64_t>(in);
  if (digest_len > 1024) throw Error("corrupt descriptor cache");
  std::string digest(digest_len, '\0');
  in.read(digest.data(), static_cast<std::streamsize>(digest_len));
  if (!in) throw Error("truncated descriptor cache");
  if (digest != input_digest || out.params.k != params.k ||
      out.params.cutoff != params.cutoff)
    return std::nullopt;

  std::uint64_t expected = 0;
  for (std::uint64_t s = 0; s < n_struct; ++s) {
    StructureSpan span{get<std::uint64_t>(in), get<std::uint64_t>(in)};
    if (span.start != expected) throw Error("corrupt descriptor cache offsets");
    expected += span.length;
    out.offsets.push_back(span);
  }
  if (expected != n_env) throw Error("corrupt descriptor cache offsets");
  out.values.resize(static_cast<Eigen::Index>(n_env),
                    static_cast<Eigen::Index>(params.width()));
  double* v = out.values.data();
  for (Eigen::Index i = 0; i < out.values.size(); ++i) v[i] = get<double>(in);
  return out;
}

std::filesystem::path descriptor_cache_path(const std::filesystem::path& dir,
                                            const std::string& input_digest,
                                            const DescriptorParams& params) {
  std::ostringstream name;
  name << input_digest << "-k" << params.k << "-rc" << params.cutoff << ".desc";
  return dir / name.str();
}

}  // namespace atomcover
