#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "thinlev/graph/generate.hpp"

namespace thinlev::graphsim {

class UnionFind {
 public:
  explicit UnionFind(long long n) : parent_(static_cast<size_t>(n)), size_(static_cast<size_t>(n), 1) {
    for (size_t i = 0; i < parent_.size(); ++i) parent_[i] = static_cast<uint32_t>(i);
  }

  uint32_t find(uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];  // path halving
      x = parent_[x];
    }
    return x;
  }

  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  long long size_of(uint32_t x) { return size_[find(x)]; }

 private:
  std::vector<uint32_t> parent_;
  std::vector<long long> size_;
};

struct ComponentStats {
  std::vector<long long> ordered_sizes;  // |C_(1)| >= |C_(2)| >= ...
  long long component_of_vertex1 = 0;    // |C(1)|, vertex 1 = maximal weight (index 0)
  long long n = 0;
};

inline ComponentStats component_stats(const Graph& g) {
  UnionFind uf(g.n);
  for (auto [a, b] : g.edges) uf.unite(a, b);
  std::vector<long long> count(static_cast<size_t>(g.n), 0);
  for (long long v = 0; v < g.n; ++v) count[uf.find(static_cast<uint32_t>(v))]++;
  ComponentStats st;
  st.n = g.n;
  st.component_of_vertex1 = uf.size_of(0);
  for (long long c : count)
    if (c > 0) st.ordered_sizes.push_back(c);
  std::sort(st.ordered_sizes.begin(), st.ordered_sizes.end(), std::greater<>());
  return st;
}

}  // namespace thinlev::graphsim
