#pragma once

#include <deque>
#include <queue>
#include <unordered_map>

#include "mapf/lacam.hpp"

namespace mapf::testing {

// Shortest-path costs from nodes[0] over the discovered arcs, computed from
// scratch (node index -> cost).
inline std::vector<Cost> reference_g(const std::deque<HighLevelNode>& nodes, Objective obj,
                                     const Configuration& goals) {
  std::unordered_map<const HighLevelNode*, std::size_t> index;
  for (std::size_t k = 0; k < nodes.size(); ++k) index[&nodes[k]] = k;
  std::vector<Cost> dist(nodes.size(), kInfiniteCost);
  if (nodes.empty()) return dist;
  using Entry = std::pair<Cost, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  dist[0] = 0;
  pq.emplace(0, 0);
  while (!pq.empty()) {
    auto [d, k] = pq.top();
    pq.pop();
    if (d > dist[k]) continue;
    for (const HighLevelNode* nb : nodes[k].neighbors) {
      const auto j = index.at(nb);
      const Cost c = d + edge_cost(obj, nodes[k].config, nb->config, goals);
      if (c < dist[j]) {
        dist[j] = c;
        pq.emplace(c, j);
      }
    }
  }
  return dist;
}

// True when every node's g equals its reference shortest-path cost.
inline bool g_values_exact(const std::deque<HighLevelNode>& nodes, Objective obj, const Configuration& goals) {
  const auto ref = reference_g(nodes, obj, goals);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k].g != ref[k]) return false;
  return true;
}

}  // namespace mapf::testing
