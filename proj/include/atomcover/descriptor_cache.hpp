#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "atomcover/descriptor.hpp"

namespace atomcover {

/// Binary DescriptorSet layout, all fields little-endian:
///   magic "ACDESC01" | k u64 | cutoff f64 | n_env u64 | n_struct u64 |
///   digest length u64 | digest bytes | (start u64, length u64) per structure |
///   n_env x (2k-1) f64 values, row-major.
void write_descriptor_cache(const DescriptorSet& descs,
                            const std::string& input_digest, std::ostream& out);

/// Returns nothing when the stream is not a cache for this (digest, k,
/// cutoff) key. Throws Error on a truncated or corrupt cache.
std::optional<DescriptorSet> read_descriptor_cache(
    std::istream& in, const std::string& input_digest,
    const DescriptorParams& params);

/// File name a cache directory uses for a given key.
std::filesystem::path descriptor_cache_path(const std::filesystem::path& dir,
                                            const std::string& input_digest,
                                            const DescriptorParams& params);

}  // namespace atomcover
