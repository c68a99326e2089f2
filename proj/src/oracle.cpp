#include "mapf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace mapf::oracle {

namespace {

using Key = std::uint64_t;

// Joint-space successor enumeration, written independently of the
// connectivity and cost routines in core.
class JointSpace {
 public:
  JointSpace(const Instance& instance, Objective objective, const Limits& limits)
      : map_(instance.map()), goals_(instance.goals()), objective_(objective), limits_(limits) {
    const std::size_t n = instance.num_agents();
    const auto branching = std::pow(static_cast<double>(map_.max_degree() + 1), static_cast<double>(n));
    if (branching > static_cast<double>(limits.max_branching)) {
      throw Refusal("branching factor " + std::to_string(branching) + " exceeds oracle limit");
    }
    const auto states = std::pow(static_cast<double>(map_.num_vertices()), static_cast<double>(n));
    if (states > 9.0e18) throw Refusal("configuration space does not fit a 64-bit key");
    base_ = map_.num_vertices();
    now_.assign(map_.num_vertices(), kNoAgent);
    used_.assign(map_.num_vertices(), false);
    next_.assign(n, kNoVertex);
  }

  Key encode(const Configuration& q) const {
    Key k = 0;
    for (auto it = q.rbegin(); it != q.rend(); ++it) k = k * base_ + static_cast<Key>(*it);
    return k;
  }

  Configuration decode(Key k, std::size_t n) const {
    Configuration q(n);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = static_cast<Vertex>(k % base_);
      k /= base_;
    }
    return q;
  }

  // Calls visit(next_configuration, step_cost) for every connected successor.
  template <typename Visit>
  void for_each_successor(const Configuration& q, Visit&& visit) {
    for (std::size_t i = 0; i < q.size(); ++i) now_[static_cast<std::size_t>(q[i])] = static_cast<AgentId>(i);
    recurse(q, 0, 0, visit);
    for (Vertex v : q) now_[static_cast<std::size_t>(v)] = kNoAgent;
  }

 private:
  template <typename Visit>
  void recurse(const Configuration& q, std::size_t i, Cost acc, Visit& visit) {
    if (i == q.size()) {
      visit(next_, objective_ == Objective::kMakespan ? Cost{1} : acc);
      return;
    }
    const Vertex at = q[i];
    auto try_vertex = [&](Vertex v) {
      const auto uv = static_cast<std::size_t>(v);
      if (used_[uv]) return;
      const AgentId j = now_[uv];
      if (j != kNoAgent && static_cast<std::size_t>(j) < i && next_[static_cast<std::size_t>(j)] == at) return;
      Cost step = 0;
      if (objective_ == Objective::kSumOfFuels) step = v != at ? 1 : 0;
      if (objective_ == Objective::kSumOfLoss) step = (v == at && at == goals_[i]) ? 0 : 1;
      used_[uv] = true;
      next_[i] = v;
      recurse(q, i + 1, acc + step, visit);
      used_[uv] = false;
      next_[i] = kNoVertex;
    };
    try_vertex(at);
    for (Vertex v : map_.neighbors(at)) try_vertex(v);
  }

  const GridMap& map_;
  const Configuration& goals_;
  Objective objective_;
  Limits limits_;
  Key base_ = 1;
  std::vector<AgentId> now_;
  std::vector<bool> used_;
  Configuration next_;
};

}  // namespace

Result optimal(const Instance& instance, Objective objective, const Limits& limits) {
  JointSpace space(instance, objective, limits);
  const std::size_t n = instance.num_agents();
  const Key start = space.encode(instance.starts());
  const Key goal = space.encode(instance.goals());

  struct Record {
    Cost cost;
    Key parent;
    bool closed;
  };
  std::unordered_map<Key, Record> seen;
  using Entry = std::pair<Cost, Key>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  seen.emplace(start, Record{0, start, false});
  frontier.emplace(0, start);

  Result result;
  while (!frontier.empty()) {
    const auto [cost, key] = frontier.top();
    frontier.pop();
    auto& rec = seen.at(key);
    if (rec.closed || cost > rec.cost) continue;
    rec.closed = true;
    if (key == goal) {
      result.cost = cost;
      Solution sol;
      for (Key k = goal;; k = seen.at(k).parent) {
        sol.configs.push_back(space.decode(k, n));
        if (k == start) break;
      }
      std::reverse(sol.configs.begin(), sol.configs.end());
      result.solution = std::move(sol);
      break;
    }
    const Configuration q = space.decode(key, n);
    space.for_each_successor(q, [&](const Configuration& next, Cost step) {
      const Key nk = space.encode(next);
      const Cost c = cost + step;
      auto [it, inserted] = seen.try_emplace(nk, Record{c, key, false});
      if (!inserted) {
        if (it->second.closed || c >= it->second.cost) return;
        it->second.cost = c;
        it->second.parent = key;
      }
      frontier.emplace(c, nk);
    });
    if (seen.size() > limits.max_states) throw Refusal("oracle state limit exceeded");
  }
  result.states = seen.size();
  return result;
}

std::optional<Cost> optimal_cost(const Instance& instance, Objective objective, const Limits& limits) {
  return optimal(instance, objective, limits).cost;
}

bool is_solvable(const Instance& instance, const Limits& limits) {
  JointSpace space(instance, Objective::kMakespan, limits);
  const std::size_t n = instance.num_agents();
  const Key start = space.encode(instance.starts());
  const Key goal = space.encode(instance.goals());
  std::unordered_map<Key, bool> seen{{start, true}};
  std::queue<Key> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const Key key = frontier.front();
    frontier.pop();
    if (key == goal) return true;
    space.for_each_successor(space.decode(key, n), [&](const Configuration& next, Cost) {
      const Key nk = space.encode(next);
      if (seen.emplace(nk, true).second) frontier.push(nk);
    });
    if (seen.size() > limits.max_states) throw Refusal("oracle state limit exceeded");
  }
  return false;
}

}  // namespace mapf::oracle
