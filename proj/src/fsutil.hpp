#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace corpuskit {

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file and renames into place, so readers never
// observe a partially written stage output.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

void ensure_dir(const std::filesystem::path& dir);

// Regular files directly inside `dir`, sorted by filename.  Lexicographic
// order is the shard order everywhere.
std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& dir);

std::string u64_to_hex(std::uint64_t v);

// Content digest of a file (64-bit FNV-1a over raw bytes, 16 hex chars).
// Used by manifests to detect changed stage inputs; not cryptographic.
std::string file_digest_hex(const std::filesystem::path& path);

}  // namespace corpuskit
