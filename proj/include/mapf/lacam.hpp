#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mapf/core.hpp"
#include "mapf/pibt.hpp"

namespace mapf {

/// Low-level search node: pins agent `who` to `where` in the successor
/// configuration, on top of every pin along the path to the root.
struct Constraint {
  std::shared_ptr<const Constraint> parent;
  AgentId who = kNoAgent;
  Vertex where = kNoVertex;
  int depth = 0;

  static std::shared_ptr<const Constraint> root() { return std::make_shared<const Constraint>(); }
  /// Pins collected from this node up to the root, deepest first.
  std::vector<Pin> pins() const;
};

/// High-level search node, one per discovered configuration.
struct HighLevelNode {
  std::size_t id = 0;
  Configuration config;
  std::deque<std::shared_ptr<const Constraint>> tree;  // low-level BFS frontier
  HighLevelNode* parent = nullptr;
  std::vector<HighLevelNode*> neighbors;  // set semantics
  Cost g = 0;
  Cost h = 0;
  std::vector<AgentId> order;             // agent picked at each constraint depth
  std::vector<std::int64_t> priorities;   // PIBT priority levels at `config`

  Cost f() const { return g + h; }
  /// Records an arc to `other`; false if the arc was already known.
  bool add_neighbor(HighLevelNode* other);
};

enum class Status { kOptimal, kSuboptimal, kFound, kNoSolution, kFailure };
std::string to_string(Status status);

struct TracePoint {
  double elapsed_ms = 0;
  Cost cost = 0;
};

struct SolveStats {
  std::uint64_t iterations = 0;
  std::size_t nodes = 0;
  double elapsed_ms = 0;
  std::vector<TracePoint> trace;  // one point per goal-cost improvement
};

struct SolveOutcome {
  Status status = Status::kFailure;
  std::optional<Solution> solution;
  std::optional<Cost> cost;
  SolveStats stats;
};

struct SolverOptions {
  Objective objective = Objective::kSumOfLoss;
  std::optional<std::chrono::duration<double>> time_budget;
  std::optional<std::uint64_t> iteration_budget;
  bool anytime = true;          // false: plain LaCAM, stop at the first goal
  bool swap_enabled = true;
  bool discard = true;          // prune nodes that cannot beat the incumbent
  double restart_probability = 0.001;
  std::uint64_t seed = 0;

  /// Called at the top of every high-level iteration with all nodes so far
  /// (index 0 is the start node).
  std::function<void(const std::deque<HighLevelNode>&)> on_iteration;
  /// Called whenever the incumbent solution improves.
  std::function<void(const Solution&, Cost, double elapsed_ms)> on_solution;
};

/// Enqueues children of `c` pinning the next agent in `node.order` to each
/// vertex of its neighborhood (stay included). No-op once every agent is pinned.
void low_level_expand(HighLevelNode& node, const std::shared_ptr<const Constraint>& c, const GridMap& map);

/// Runs the configuration generator under the pins of `c`; nullopt when the
/// pins are inconsistent or the generator fails.
std::optional<Configuration> generate_configuration(const HighLevelNode& node, const Constraint& c,
                                                    PibtContext& ctx);

using EdgeCostFn = std::function<Cost(const Configuration&, const Configuration&)>;

/// Dijkstra wave from `from` over known arcs, lowering g and resetting parents
/// wherever a strictly cheaper path exists. With a goal node, improved nodes
/// whose f beats the goal's f are pushed back onto `open`.
void rewire(HighLevelNode& from, const EdgeCostFn& cost, const HighLevelNode* goal, std::vector<HighLevelNode*>& open);

/// Configurations from the root to `node` along parent links.
Solution backtrack(const HighLevelNode& node);

/// True with probability p: reinsert the start node instead of a known one.
bool draw_restart(std::mt19937_64& rng, double p);

SolveOutcome solve(const Instance& instance, const SolverOptions& opts);

}  // namespace mapf
