#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsh.hpp"
#include "registry.hpp"

namespace corpuskit {

// Union-find with path compression and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);

  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

// A connected component of candidate pairs.  `members` is sorted; `kept` is
// the member whose dataset has the lowest retention rank, ties broken by
// smallest doc id.
struct Cluster {
  std::string cluster_id;
  std::string kept_doc_id;
  std::vector<std::string> members;
};

struct ClusterResult {
  std::vector<Cluster> clusters;            // sorted by first member id
  std::vector<std::string> removed_doc_ids; // sorted
};

// Builds duplicate clusters from the pair stream and decides retention.
// Documents that appear in no pair are untouched (they are simply absent
// here); every cluster has >= 2 members and exactly one kept document.
ClusterResult cluster_and_retain(const std::vector<DuplicatePair>& pairs,
                                 const DatasetRegistry& registry);

}  // namespace corpuskit
