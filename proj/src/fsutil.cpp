#include "fsutil.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "hash.hpp"

namespace fs = std::filesystem;

namespace corpuskit {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw_data("read failed: " + path.string());
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  ensure_dir(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open file for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw_data("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw_data("rename failed: " + tmp.string() + " -> " + path.string());
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw_data("cannot create directory: " + dir.string());
}

std::vector<fs::path> list_files_sorted(const fs::path& dir) {
  if (!fs::exists(dir)) throw_data("directory does not exist: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

std::string u64_to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

std::string file_digest_hex(const fs::path& path) {
  return u64_to_hex(fnv1a64(read_file(path)));
}

}  // namespace corpuskit
