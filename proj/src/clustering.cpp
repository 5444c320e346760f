#include "clustering.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "errors.hpp"
#include "record.hpp"

namespace corpuskit {

UnionFind::UnionFind(std::size_t n)
    : parent_(n), size_(n, 1) {
  for (std::size_t i = 0; i < n; ++i) {
    parent_[i] = static_cast<std::uint32_t>(i);
  }
}

std::size_t UnionFind::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = static_cast<std::uint32_t>(root);
    x = next;
  }
  return root;
}

void UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = static_cast<std::uint32_t>(a);
  size_[a] += size_[b];
}

ClusterResult cluster_and_retain(const std::vector<DuplicatePair>& pairs,
                                 const DatasetRegistry& registry) {
  // Intern ids in first-seen order; only docs that appear in a pair matter.
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> index;
  const auto intern = [&](const std::string& id) {
    auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(pairs.size());
  for (const DuplicatePair& p : pairs) {
    edges.emplace_back(intern(p.doc_a), intern(p.doc_b));
  }

  UnionFind uf(ids.size());
  for (const auto& [a, b] : edges) uf.unite(a, b);

  std::unordered_map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    components[uf.find(i)].push_back(i);
  }

  ClusterResult result;
  result.clusters.reserve(components.size());
  for (auto& [root, members] : components) {
    (void)root;
    if (members.size() < 2) continue;  // cannot happen from pairs; defensive
    Cluster cluster;
    cluster.members.reserve(members.size());
    for (std::size_t m : members) cluster.members.push_back(ids[m]);
    std::sort(cluster.members.begin(), cluster.members.end());

    int best_rank = 0;
    for (const std::string& id : cluster.members) {
      const DatasetDescriptor& d = registry.at(doc_id_dataset(id));
      // Members are sorted, so on rank ties the smallest doc id wins by
      // keeping the first occurrence.
      if (cluster.kept_doc_id.empty() || d.retention_rank < best_rank) {
        best_rank = d.retention_rank;
        cluster.kept_doc_id = id;
      }
    }
    result.clusters.push_back(std::move(cluster));
  }

  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              return a.members.front() < b.members.front();
            });
  for (std::size_t i = 0; i < result.clusters.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "c%06zu", i);
    result.clusters[i].cluster_id = id;
    for (const std::string& member : result.clusters[i].members) {
      if (member != result.clusters[i].kept_doc_id) {
        result.removed_doc_ids.push_back(member);
      }
    }
  }
  std::sort(result.removed_doc_ids.begin(), result.removed_doc_ids.end());
  return result;
}

}  // namespace corpuskit
