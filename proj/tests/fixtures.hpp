#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mapf/core.hpp"

namespace mapf::testing {

using Cell = std::pair<int, int>;

inline std::shared_ptr<const GridMap> grid(const std::vector<std::string>& rows) {
  return std::make_shared<const GridMap>(GridMap::from_rows(rows));
}

inline Configuration cells(const GridMap& map, const std::vector<Cell>& xy) {
  Configuration q;
  for (auto [x, y] : xy) q.push_back(map.vertex_at(x, y));
  return q;
}

inline Instance instance(const std::vector<std::string>& rows, const std::vector<Cell>& starts,
                         const std::vector<Cell>& goals) {
  auto map = grid(rows);
  auto s = cells(*map, starts);
  auto g = cells(*map, goals);
  return Instance(map, std::move(s), std::move(g));
}

inline std::vector<const DistTable*> goal_tables(const Instance& ins, DistTableCache& cache) {
  std::vector<const DistTable*> out;
  for (Vertex g : ins.goals()) out.push_back(&cache.get(g));
  return out;
}

// T-tunnel: v1 v2 v3 on top, stem v4 v5 v6 below v2.
inline const std::vector<std::string> kTunnel = {"...", "@.@", "@.@", "@.@"};
// Agent 1 at v4 heading to v5, agent 2 at v5 heading to v4.
inline Instance tunnel_swap() { return instance(kTunnel, {{1, 1}, {1, 2}}, {{1, 2}, {1, 1}}); }

}  // namespace mapf::testing
