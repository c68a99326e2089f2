#include "mapf/lacam.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace mapf {

std::vector<Pin> Constraint::pins() const {
  std::vector<Pin> out;
  for (const Constraint* c = this; c != nullptr && c->who != kNoAgent; c = c->parent.get()) {
    out.push_back({c->who, c->where});
  }
  return out;
}

bool HighLevelNode::add_neighbor(HighLevelNode* other) {
  if (std::find(neighbors.begin(), neighbors.end(), other) != neighbors.end()) return false;
  neighbors.push_back(other);
  return true;
}

std::string to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "OPTIMAL";
    case Status::kSuboptimal: return "SUBOPTIMAL";
    case Status::kFound: return "FOUND";
    case Status::kNoSolution: return "NO_SOLUTION";
    case Status::kFailure: return "FAILURE";
  }
  return "UNKNOWN";
}

void low_level_expand(HighLevelNode& node, const std::shared_ptr<const Constraint>& c, const GridMap& map) {
  if (static_cast<std::size_t>(c->depth) >= node.order.size()) return;
  const AgentId i = node.order[static_cast<std::size_t>(c->depth)];
  const Vertex at = node.config[static_cast<std::size_t>(i)];
  auto push = [&](Vertex u) {
    node.tree.push_back(std::make_shared<const Constraint>(Constraint{c, i, u, c->depth + 1}));
  };
  for (Vertex u : map.neighbors(at)) push(u);
  push(at);
}

std::optional<Configuration> generate_configuration(const HighLevelNode& node, const Constraint& c,
                                                    PibtContext& ctx) {
  const auto pins = c.pins();
  const auto& map = ctx.instance().map();
  const auto& q = node.config;
  for (std::size_t a = 0; a < pins.size(); ++a) {
    const Vertex at = q[static_cast<std::size_t>(pins[a].who)];
    const auto nb = map.neighbors(at);
    if (pins[a].where != at && std::find(nb.begin(), nb.end(), pins[a].where) == nb.end()) return std::nullopt;
    for (std::size_t b = a + 1; b < pins.size(); ++b) {
      if (pins[a].where == pins[b].where) return std::nullopt;
      if (pins[a].where == q[static_cast<std::size_t>(pins[b].who)] && pins[b].where == at) return std::nullopt;
    }
  }
  ctx.set_priority_levels(node.priorities);
  return ctx.plan_step(q, pins);
}

void rewire(HighLevelNode& from, const EdgeCostFn& cost, const HighLevelNode* goal, std::vector<HighLevelNode*>& open) {
  using Entry = std::pair<Cost, HighLevelNode*>;
  auto later = [](const Entry& a, const Entry& b) {
    return a.first != b.first ? a.first > b.first : a.second->id > b.second->id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> wave(later);
  wave.emplace(from.g, &from);
  while (!wave.empty()) {
    auto [g_from, node] = wave.top();
    wave.pop();
    if (g_from != node->g) continue;  // stale entry
    for (HighLevelNode* next : node->neighbors) {
      const Cost g = node->g + cost(node->config, next->config);
      if (g >= next->g) continue;
      next->g = g;
      next->parent = node;
      wave.emplace(g, next);
      if (goal != nullptr && next->f() < goal->f()) open.push_back(next);
    }
  }
}

Solution backtrack(const HighLevelNode& node) {
  Solution sol;
  for (const HighLevelNode* n = &node; n != nullptr; n = n->parent) {
    sol.configs.push_back(n->config);
    if (sol.configs.size() > (std::size_t{1} << 40)) throw std::logic_error("parent chain contains a cycle");
  }
  std::reverse(sol.configs.begin(), sol.configs.end());
  return sol;
}

bool draw_restart(std::mt19937_64& rng, double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::int64_t> next_priorities(const std::vector<std::int64_t>& prev, const Configuration& q,
                                          const Configuration& goals) {
  std::vector<std::int64_t> out(prev.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] == goals[i] ? 0 : prev[i] + 1;
  return out;
}

std::vector<AgentId> order_by_priority(const std::vector<std::int64_t>& levels) {
  std::vector<AgentId> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    return levels[static_cast<std::size_t>(a)] > levels[static_cast<std::size_t>(b)];
  });
  return order;
}

class Search {
 public:
  Search(const Instance& instance, const SolverOptions& opts)
      : instance_(instance), opts_(opts), cache_(instance.map()), restart_rng_(opts.seed ^ 0x5bd1e995ULL) {
    for (Vertex g : instance.goals()) tables_.push_back(&cache_.get(g));
  }

  SolveOutcome run() {
    started_ = Clock::now();
    SolveOutcome out;
    const auto& starts = instance_.starts();
    const auto& goals = instance_.goals();
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (!tables_[i]->reachable(starts[i])) {
        out.status = Status::kNoSolution;
        out.stats.elapsed_ms = elapsed_ms();
        return out;
      }
    }

    PibtContext ctx(instance_, tables_, opts_.seed, opts_.swap_enabled);
    const auto& map = instance_.map();
    const EdgeCostFn cost = [&](const Configuration& a, const Configuration& b) {
      return edge_cost(opts_.objective, a, b, goals);
    };

    HighLevelNode* start = make_node(starts, nullptr,
                                     next_priorities(std::vector<std::int64_t>(starts.size(), 0), starts, goals));
    start->order = init_order();
    std::vector<HighLevelNode*> open{start};
    HighLevelNode* goal_node = nullptr;
    bool interrupted = false;

    while (!open.empty()) {
      if (budget_exhausted()) {
        interrupted = true;
        break;
      }
      ++iterations_;
      if (opts_.on_iteration) opts_.on_iteration(nodes_);

      HighLevelNode* node = open.back();
      if (node->config == goals) {
        goal_node = node;
        note_goal(goal_node);
        if (!opts_.anytime) break;
      }
      if (opts_.anytime && opts_.discard && goal_node != nullptr && goal_node->f() <= node->f()) {
        open.pop_back();
        continue;
      }
      if (node->tree.empty()) {
        open.pop_back();
        continue;
      }
      auto c = node->tree.front();
      node->tree.pop_front();
      low_level_expand(*node, c, map);

      auto q_new = generate_configuration(*node, *c, ctx);
      if (!q_new) continue;

      if (auto it = explored_.find(*q_new); it != explored_.end()) {
        HighLevelNode* known = it->second;
        if (opts_.anytime && node->add_neighbor(known)) {
          rewire(*node, cost, opts_.discard ? goal_node : nullptr, open);
          if (goal_node != nullptr) note_goal(goal_node);
        }
        open.push_back(draw_restart(restart_rng_, opts_.restart_probability) ? start : known);
      } else {
        auto priorities = next_priorities(node->priorities, *q_new, goals);
        HighLevelNode* next = make_node(std::move(*q_new), node, std::move(priorities));
        next->g = node->g + cost(node->config, next->config);
        next->order = order_by_priority(next->priorities);
        if (opts_.anytime) node->add_neighbor(next);
        open.push_back(next);
      }
    }

    out.stats.iterations = iterations_;
    out.stats.nodes = nodes_.size();
    out.stats.trace = std::move(trace_);
    out.stats.elapsed_ms = elapsed_ms();
    if (goal_node != nullptr) {
      out.solution = backtrack(*goal_node);
      out.cost = goal_node->g;
      if (!opts_.anytime) {
        out.status = Status::kFound;
      } else {
        out.status = interrupted ? Status::kSuboptimal : Status::kOptimal;
      }
    } else {
      out.status = interrupted ? Status::kFailure : Status::kNoSolution;
    }
    return out;
  }

 private:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - started_).count();
  }

  bool budget_exhausted() const {
    if (opts_.iteration_budget && iterations_ >= *opts_.iteration_budget) return true;
    if (opts_.time_budget && Clock::now() - started_ >= *opts_.time_budget) return true;
    return false;
  }

  HighLevelNode* make_node(Configuration q, HighLevelNode* parent, std::vector<std::int64_t> priorities) {
    auto& node = nodes_.emplace_back();
    node.id = nodes_.size() - 1;
    node.config = std::move(q);
    node.tree.push_back(Constraint::root());
    node.parent = parent;
    node.h = heuristic(opts_.objective, node.config, tables_);
    node.priorities = std::move(priorities);
    explored_.emplace(node.config, &node);
    return &node;
  }

  std::vector<AgentId> init_order() const {
    const auto& starts = instance_.starts();
    std::vector<AgentId> order(starts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
      const auto ua = static_cast<std::size_t>(a);
      const auto ub = static_cast<std::size_t>(b);
      return (*tables_[ua])[starts[ua]] > (*tables_[ub])[starts[ub]];
    });
    return order;
  }

  void note_goal(const HighLevelNode* goal) {
    if (best_cost_ && goal->g >= *best_cost_) return;
    best_cost_ = goal->g;
    const double t = elapsed_ms();
    trace_.push_back({t, goal->g});
    if (opts_.on_solution) opts_.on_solution(backtrack(*goal), goal->g, t);
  }

  const Instance& instance_;
  const SolverOptions& opts_;
  DistTableCache cache_;
  std::vector<const DistTable*> tables_;
  std::mt19937_64 restart_rng_;
  std::deque<HighLevelNode> nodes_;
  std::unordered_map<Configuration, HighLevelNode*, ConfigurationHash> explored_;
  Clock::time_point started_;
  std::uint64_t iterations_ = 0;
  std::optional<Cost> best_cost_;
  std::vector<TracePoint> trace_;
};

}  // namespace

SolveOutcome solve(const Instance& instance, const SolverOptions& opts) {
  if (opts.restart_probability < 0 || opts.restart_probability > 1) {
    throw ContractViolation("restart probability must lie in [0, 1]");
  }
  return Search(instance, opts).run();
}

}  // namespace mapf
