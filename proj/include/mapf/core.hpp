#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

using AgentId = std::int32_t;
inline constexpr AgentId kNoAgent = -1;

/// One vertex per agent; the atomic search state.
using Configuration = std::vector<Vertex>;

struct ConfigurationHash {
  std::size_t operator()(const Configuration& q) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ q.size();
    for (Vertex v : q) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

/// All objectives have integral per-step costs.
using Cost = std::int64_t;
inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max();

enum class Objective { kMakespan, kSumOfLoss, kSumOfFuels };

std::string to_string(Objective obj);
/// Accepts `makespan`, `sum-of-loss`, `sum-of-fuels`.
std::optional<Objective> parse_objective(std::string_view name);

/// A MAPF instance: shared immutable map plus distinct starts and goals.
class Instance {
 public:
  /// Throws ContractViolation on invalid vertices, length mismatch, or
  /// duplicate starts / goals.
  Instance(std::shared_ptr<const GridMap> map, Configuration starts, Configuration goals);

  const GridMap& map() const { return *map_; }
  const std::shared_ptr<const GridMap>& map_ptr() const { return map_; }
  const Configuration& starts() const { return starts_; }
  const Configuration& goals() const { return goals_; }
  std::size_t num_agents() const { return starts_.size(); }

 private:
  std::shared_ptr<const GridMap> map_;
  Configuration starts_;
  Configuration goals_;
};

struct Solution {
  std::vector<Configuration> configs;

  bool empty() const { return configs.empty(); }
  std::size_t makespan() const { return configs.empty() ? 0 : configs.size() - 1; }
  friend bool operator==(const Solution&, const Solution&) = default;
};

// --- collisions and connectivity -------------------------------------------

bool has_vertex_collision(const Configuration& q);
/// True iff Y follows X under the MAPF move rules: every agent stays or moves
/// to a neighbor, no two agents share a vertex in Y, and no two agents swap.
bool is_connected(const Configuration& from, const Configuration& to, const GridMap& map);

enum class ViolationKind { kStart, kGoal, kVertex, kEdge, kMove, kSize };
std::string to_string(ViolationKind kind);

struct Violation {
  std::size_t step = 0;
  ViolationKind kind = ViolationKind::kStart;
  std::vector<AgentId> agents;

  std::string describe() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// nullopt means the solution is valid; otherwise the first violation found,
/// scanning Q_0 first, then each transition, then the final goal check.
std::optional<Violation> validate(const Instance& instance, const Solution& sol);

// --- objectives ------------------------------------------------------------

Cost edge_cost(Objective obj, const Configuration& from, const Configuration& to, const Configuration& goals);
Cost solution_cost(Objective obj, const Solution& sol, const Configuration& goals);

/// Admissible lower bound: sum of goal distances for loss/fuels, max for
/// makespan. Returns kInfiniteCost if some goal is unreachable.
Cost heuristic(Objective obj, const Configuration& q, std::span<const DistTable* const> goal_tables);

// --- text formats ----------------------------------------------------------

struct ScenarioAgents {
  Configuration starts;
  Configuration goals;
};

/// Reads the first n rows of a MovingAI `.scen` (version 1) file.
ScenarioAgents parse_scenario(std::string_view text, const GridMap& map, std::size_t n);
/// Writes a `.scen` file; the `opt` column holds BFS distances.
std::string serialize_scenario(const GridMap& map, const std::string& map_name, const Configuration& starts,
                               const Configuration& goals);

/// Solution text: `starts=(x,y),...` then one `t:(x,y),...` line per step.
std::string serialize_solution(const GridMap& map, const Solution& sol);

struct SolutionFile {
  Configuration starts;
  Solution solution;
};
SolutionFile parse_solution(std::string_view text, const GridMap& map);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace mapf
