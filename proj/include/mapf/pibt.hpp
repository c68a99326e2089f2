#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "mapf/core.hpp"

namespace mapf {

/// An externally imposed assignment: `who` must be at `where` next step.
struct Pin {
  AgentId who = kNoAgent;
  Vertex where = kNoVertex;
  friend bool operator==(const Pin&, const Pin&) = default;
};

struct StepRequest {
  const Configuration& q_from;
  std::span<const Pin> pins = {};
};

/// nullopt encodes FAILURE: the pins left some agent without a legal move.
using StepResult = std::optional<Configuration>;

namespace swap_emulation {

enum class Need { kRequired, kNotRequired, kUndecided };

/// First emulation: the pusher keeps stepping into the puller's cell while
/// the puller retreats, ignoring everyone else. Undecided when the step
/// bound is exhausted.
Need push(const GridMap& map, const DistTable& pusher_dist, Vertex pusher_goal, const DistTable& puller_dist,
          Vertex pusher_at, Vertex puller_at, std::size_t max_steps);

/// Second emulation: the advancer steps into the retreater's cell while the
/// retreater backs away. True when the retreater reaches a junction
/// (degree > 2), false on a dead end or when the step bound is exhausted.
bool pull(const GridMap& map, const DistTable& retreater_dist, Vertex advancer_at, Vertex retreater_at,
          std::size_t max_steps);

}  // namespace swap_emulation

/// Mutable per-run state of the one-step PIBT generator: dynamic priorities,
/// a seeded RNG for tie-breaking, and scratch buffers reused across calls.
class PibtContext {
 public:
  PibtContext(const Instance& instance, std::vector<const DistTable*> goal_tables, std::uint64_t seed,
              bool swap_enabled);

  /// One PIBT step from `q_from`, honoring pins. Throws ContractViolation for
  /// malformed pins or a colliding `q_from`.
  StepResult plan_step(const StepRequest& request);
  StepResult plan_step(const Configuration& q_from, std::span<const Pin> pins = {}) {
    return plan_step(StepRequest{q_from, pins});
  }

  /// Agents off their goal in `q` gain one priority level; agents on their
  /// goal drop to zero.
  void update_priorities(const Configuration& q);
  void set_priority_levels(std::span<const std::int64_t> levels);
  const std::vector<std::int64_t>& priority_levels() const { return levels_; }
  /// Level plus an id-based fraction: (n - i) / n for 1-based agent i.
  double priority(AgentId i) const;
  /// Agents in descending priority.
  std::vector<AgentId> processing_order() const;

  /// Swap detector for agent i whose best candidate is `best`: returns the
  /// agent sitting there if a swap is both required and possible.
  AgentId swap_required_and_possible(AgentId i, const Configuration& q_from, Vertex best) const;
  /// Same, with `best` taken as i's nearest candidate (lowest id on ties).
  AgentId swap_required_and_possible(AgentId i, const Configuration& q_from) const;
  /// Role-exchanged detection: a neighbor k that, once i advances to `best`
  /// and k follows, would need to swap with i. Returns k or kNoAgent.
  AgentId clear_required_and_possible(AgentId i, const Configuration& q_from, Vertex best) const;

  bool swap_enabled() const { return swap_enabled_; }
  void set_swap_enabled(bool on) { swap_enabled_ = on; }
  std::mt19937_64& rng() { return rng_; }
  const Instance& instance() const { return *instance_; }
  const DistTable& goal_table(AgentId i) const { return *goal_tables_[static_cast<std::size_t>(i)]; }

 private:
  bool assign(AgentId i);
  void build_candidates(AgentId i, std::vector<Vertex>& out);
  AgentId detect(AgentId i, const Configuration& q_from, Vertex best, std::span<const AgentId> occupied) const;
  AgentId detect_clear(AgentId i, const Configuration& q_from, Vertex best, std::span<const AgentId> occupied) const;
  Vertex nearest_candidate(AgentId i, Vertex at) const;

  const Instance* instance_;
  std::vector<const DistTable*> goal_tables_;
  std::mt19937_64 rng_;
  bool swap_enabled_;
  std::vector<std::int64_t> levels_;

  // scratch, valid during plan_step
  const Configuration* q_from_ = nullptr;
  Configuration q_to_;
  std::vector<AgentId> occupied_now_;
  std::vector<AgentId> occupied_next_;
  std::vector<std::vector<Vertex>> candidates_;
};

}  // namespace mapf
