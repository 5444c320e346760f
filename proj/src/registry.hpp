#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace corpuskit {

// Per-dataset curation policy.  retention_rank orders datasets by preference
// when a duplicate cluster spans several of them (1 = kept first);
// insertion_order fixes the sequence in which datasets enter the dedup
// index, which in turn determines the direction of emitted pairs.
struct DatasetDescriptor {
  std::string name;
  int retention_rank = 0;
  int insertion_order = 0;
  bool filter_exempt = false;
  std::filesystem::path input_dir;  // raw shard directory; may be empty for
                                    // library-only use
};

class DatasetRegistry {
 public:
  DatasetRegistry() = default;

  // Parses {"datasets": [...]} and validates: non-empty unique names without
  // ':' or '/', positive unique retention ranks and insertion orders.
  // Violations are configuration errors.
  static DatasetRegistry from_json(const nlohmann::json& j);

  // Same, from a file; relative input_dir values resolve against the
  // registry file's directory.
  static DatasetRegistry load(const std::filesystem::path& path);

  // Datasets sorted by insertion_order.
  const std::vector<DatasetDescriptor>& datasets() const { return datasets_; }

  const DatasetDescriptor* find(std::string_view name) const;

  // Lookup that treats an unknown dataset as a configuration error.
  const DatasetDescriptor& at(std::string_view name) const;

  bool empty() const { return datasets_.empty(); }

 private:
  std::vector<DatasetDescriptor> datasets_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace corpuskit
