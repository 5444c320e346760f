#include "registry.hpp"

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "fsutil.hpp"

namespace corpuskit {

DatasetRegistry DatasetRegistry::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("datasets") || !j["datasets"].is_array()) {
    throw_config("registry must be an object with a 'datasets' array");
  }
  DatasetRegistry reg;
  std::set<std::string> names;
  std::set<int> ranks;
  std::set<int> orders;
  for (const auto& entry : j["datasets"]) {
    if (!entry.is_object()) throw_config("registry entry is not an object");
    DatasetDescriptor d;
    if (!entry.contains("name") || !entry["name"].is_string()) {
      throw_config("registry entry missing string 'name'");
    }
    d.name = entry["name"].get<std::string>();
    if (d.name.empty() || d.name.find(':') != std::string::npos ||
        d.name.find('/') != std::string::npos) {
      throw_config("invalid dataset name: '" + d.name +
                   "' (must be non-empty, without ':' or '/')");
    }
    if (!entry.contains("retention_rank") ||
        !entry["retention_rank"].is_number_integer()) {
      throw_config("dataset '" + d.name + "' missing integer retention_rank");
    }
    d.retention_rank = entry["retention_rank"].get<int>();
    if (!entry.contains("insertion_order") ||
        !entry["insertion_order"].is_number_integer()) {
      throw_config("dataset '" + d.name + "' missing integer insertion_order");
    }
    d.insertion_order = entry["insertion_order"].get<int>();
    if (entry.contains("filter_exempt")) {
      if (!entry["filter_exempt"].is_boolean()) {
        throw_config("dataset '" + d.name + "': filter_exempt must be bool");
      }
      d.filter_exempt = entry["filter_exempt"].get<bool>();
    }
    if (entry.contains("input_dir") && entry["input_dir"].is_string()) {
      d.input_dir = entry["input_dir"].get<std::string>();
    }
    if (d.retention_rank < 1) {
      throw_config("dataset '" + d.name + "': retention_rank must be >= 1");
    }
    if (d.insertion_order < 1) {
      throw_config("dataset '" + d.name + "': insertion_order must be >= 1");
    }
    if (!names.insert(d.name).second) {
      throw_config("duplicate dataset name: " + d.name);
    }
    if (!ranks.insert(d.retention_rank).second) {
      throw_config("duplicate retention_rank for dataset " + d.name);
    }
    if (!orders.insert(d.insertion_order).second) {
      throw_config("duplicate insertion_order for dataset " + d.name);
    }
    reg.datasets_.push_back(std::move(d));
  }
  std::sort(reg.datasets_.begin(), reg.datasets_.end(),
            [](const DatasetDescriptor& a, const DatasetDescriptor& b) {
              return a.insertion_order < b.insertion_order;
            });
  for (std::size_t i = 0; i < reg.datasets_.size(); ++i) {
    reg.index_[reg.datasets_[i].name] = i;
  }
  return reg;
}

DatasetRegistry DatasetRegistry::load(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) {
    throw_config("registry is not valid JSON: " + path.string());
  }
  DatasetRegistry reg = from_json(j);
  for (DatasetDescriptor& d : reg.datasets_) {
    if (!d.input_dir.empty() && d.input_dir.is_relative()) {
      d.input_dir = path.parent_path() / d.input_dir;
    }
  }
  return reg;
}

const DatasetDescriptor* DatasetRegistry::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? nullptr : &datasets_[it->second];
}

const DatasetDescriptor& DatasetRegistry::at(std::string_view name) const {
  const DatasetDescriptor* d = find(name);
  if (d == nullptr) {
    throw_config("unknown dataset: '" + std::string(name) +
                 "' (not in registry)");
  }
  return *d;
}

}  // namespace corpuskit
