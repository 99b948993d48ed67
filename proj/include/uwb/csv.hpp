#pragma once

#include <cstdint>
#include <string>

namespace uwb {

// Shortest decimal string that round-trips the double (std::to_chars).
std::string format_double(double v);

// FNV-1a 64-bit over the bytes of a string; used to stamp outputs with a config hash.
std::uint64_t fnv1a64(const std::string& data);

// Write `content` to `path` atomically (temp file in the same directory + rename).
void write_file_atomic(const std::string& path, const std::string& content);

// Standard output preamble: '#'-prefixed comment lines naming the tool, the subcommand,
// the master seed and the config hash.
std::string csv_header(const std::string& subcommand, std::uint64_t seed, std::uint64_t config_hash);

} // namespace uwb
