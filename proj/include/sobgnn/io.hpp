#pragma once

#include <cstdint>
#include <string>

namespace sobgnn {

/// Writes via a temp file in the same directory plus rename, so a crashed
/// run never leaves a truncated result behind.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// FNV-1a 64-bit over the file bytes; used as the dataset fingerprint in
/// run manifests (provenance, not security).
std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const void* data, std::size_t size);

}  // namespace sobgnn
