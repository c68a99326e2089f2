#include "mapf/pibt.hpp"

#include <algorithm>
#include <numeric>

namespace mapf {

namespace swap_emulation {

namespace {

// Neighbor of `at` (excluding `avoid`) nearest to the agent's goal; lowest
// vertex id on ties. kNoVertex when `at` has no other neighbor.
Vertex retreat_cell(const GridMap& map, const DistTable& dist, Vertex at, Vertex avoid) {
  Vertex best = kNoVertex;
  for (Vertex u : map.neighbors(at)) {
    if (u == avoid) continue;
    if (best == kNoVertex || dist[u] < dist[best] || (dist[u] == dist[best] && u < best)) best = u;
  }
  return best;
}

// Neighbor that strictly shortens the distance to the agent's goal, or
// kNoVertex if the agent cannot get any closer from `at`.
Vertex step_toward_goal(const GridMap& map, const DistTable& dist, Vertex at) {
  Vertex best = kNoVertex;
  for (Vertex u : map.neighbors(at)) {
    if (dist[u] >= dist[at]) continue;
    if (best == kNoVertex || dist[u] < dist[best] || (dist[u] == dist[best] && u < best)) best = u;
  }
  return best;
}

}  // namespace

Need push(const GridMap& map, const DistTable& pusher_dist, Vertex pusher_goal, const DistTable& puller_dist,
          Vertex pusher_at, Vertex puller_at, std::size_t max_steps) {
  for (std::size_t step = 0; step < max_steps; ++step) {
    if (pusher_dist[puller_at] >= pusher_dist[pusher_at]) {
      // the pusher has stopped advancing; a swap is needed only if it sits on
      // its goal and the puller wants to come back through it
      if (pusher_at != pusher_goal) return Need::kNotRequired;
      return step_toward_goal(map, puller_dist, puller_at) == pusher_at ? Need::kRequired : Need::kNotRequired;
    }
    if (map.degree(puller_at) > 2) return Need::kNotRequired;
    const Vertex next = retreat_cell(map, puller_dist, puller_at, pusher_at);
    if (next == kNoVertex) return Need::kRequired;
    pusher_at = puller_at;
    puller_at = next;
  }
  return Need::kUndecided;
}

bool pull(const GridMap& map, const DistTable& retreater_dist, Vertex advancer_at, Vertex retreater_at,
          std::size_t max_steps) {
  for (std::size_t step = 0; step < max_steps; ++step) {
    if (map.degree(retreater_at) > 2) return true;
    const Vertex next = retreat_cell(map, retreater_dist, retreater_at, advancer_at);
    if (next == kNoVertex) return false;
    advancer_at = retreater_at;
    retreater_at = next;
  }
  return false;
}

}  // namespace swap_emulation

PibtContext::PibtContext(const Instance& instance, std::vector<const DistTable*> goal_tables, std::uint64_t seed,
                         bool swap_enabled)
    : instance_(&instance),
      goal_tables_(std::move(goal_tables)),
      rng_(seed),
      swap_enabled_(swap_enabled),
      levels_(instance.num_agents(), 0),
      q_to_(instance.num_agents(), kNoVertex),
      occupied_now_(instance.map().num_vertices(), kNoAgent),
      occupied_next_(instance.map().num_vertices(), kNoAgent),
      candidates_(instance.num_agents()) {
  if (goal_tables_.size() != instance.num_agents()) throw ContractViolation("one goal table per agent required");
}

void PibtContext::update_priorities(const Configuration& q) {
  const auto& goals = instance_->goals();
  if (q.size() != goals.size()) throw ContractViolation("configuration length mismatch");
  for (std::size_t i = 0; i < q.size(); ++i) levels_[i] = q[i] == goals[i] ? 0 : levels_[i] + 1;
}

void PibtContext::set_priority_levels(std::span<const std::int64_t> levels) {
  if (levels.size() != levels_.size()) throw ContractViolation("priority vector length mismatch");
  std::copy(levels.begin(), levels.end(), levels_.begin());
}

double PibtContext::priority(AgentId i) const {
  const auto n = static_cast<double>(levels_.size());
  return static_cast<double>(levels_[static_cast<std::size_t>(i)]) + (n - static_cast<double>(i + 1)) / n;
}

std::vector<AgentId> PibtContext::processing_order() const {
  std::vector<AgentId> order(levels_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](AgentId a, AgentId b) {
    return levels_[static_cast<std::size_t>(a)] > levels_[static_cast<std::size_t>(b)];
  });
  return order;
}

Vertex PibtContext::nearest_candidate(AgentId i, Vertex at) const {
  const auto& dist = goal_table(i);
  Vertex best = at;
  for (Vertex u : instance_->map().neighbors(at)) {
    if (dist[u] < dist[best] || (dist[u] == dist[best] && u < best)) best = u;
  }
  return best;
}

AgentId PibtContext::detect(AgentId i, const Configuration& q_from, Vertex best,
                            std::span<const AgentId> occupied) const {
  const auto& map = instance_->map();
  const AgentId j = occupied[static_cast<std::size_t>(best)];
  if (j == kNoAgent || j == i || map.degree(best) > 2) return kNoAgent;
  const auto bound = map.num_vertices();
  const Vertex at = q_from[static_cast<std::size_t>(i)];
  const auto need = swap_emulation::push(map, goal_table(i), instance_->goals()[static_cast<std::size_t>(i)],
                                         goal_table(j), at, best, bound);
  if (need != swap_emulation::Need::kRequired) return kNoAgent;
  return swap_emulation::pull(map, goal_table(i), best, at, bound) ? j : kNoAgent;
}

AgentId PibtContext::swap_required_and_possible(AgentId i, const Configuration& q_from, Vertex best) const {
  std::vector<AgentId> occupied(instance_->map().num_vertices(), kNoAgent);
  for (std::size_t k = 0; k < q_from.size(); ++k) occupied[static_cast<std::size_t>(q_from[k])] = static_cast<AgentId>(k);
  return detect(i, q_from, best, occupied);
}

AgentId PibtContext::swap_required_and_possible(AgentId i, const Configuration& q_from) const {
  return swap_required_and_possible(i, q_from, nearest_candidate(i, q_from[static_cast<std::size_t>(i)]));
}

AgentId PibtContext::clear_required_and_possible(AgentId i, const Configuration& q_from, Vertex best) const {
  std::vector<AgentId> occupied(instance_->map().num_vertices(), kNoAgent);
  for (std::size_t k = 0; k < q_from.size(); ++k) occupied[static_cast<std::size_t>(q_from[k])] = static_cast<AgentId>(k);
  return detect_clear(i, q_from, best, occupied);
}

AgentId PibtContext::detect_clear(AgentId i, const Configuration& q_from, Vertex best,
                                  std::span<const AgentId> occupied) const {
  const auto& map = instance_->map();
  const Vertex at = q_from[static_cast<std::size_t>(i)];
  if (best == at || map.degree(best) > 2) return kNoAgent;
  const auto bound = map.num_vertices();
  for (Vertex u : map.neighbors(at)) {
    const AgentId k = occupied[static_cast<std::size_t>(u)];
    if (u == best || k == kNoAgent) continue;
    // k follows i one step: k on i's cell, i on `best`
    const auto need = swap_emulation::push(map, goal_table(k), instance_->goals()[static_cast<std::size_t>(k)],
                                           goal_table(i), at, best, bound);
    if (need == swap_emulation::Need::kRequired && swap_emulation::pull(map, goal_table(k), best, at, bound)) {
      return k;
    }
  }
  return kNoAgent;
}

void PibtContext::build_candidates(AgentId i, std::vector<Vertex>& out) {
  const Vertex at = (*q_from_)[static_cast<std::size_t>(i)];
  const auto nb = instance_->map().neighbors(at);
  out.assign(nb.begin(), nb.end());
  out.push_back(at);
  std::shuffle(out.begin(), out.end(), rng_);
  const auto& dist = goal_table(i);
  std::stable_sort(out.begin(), out.end(), [&](Vertex a, Vertex b) { return dist[a] < dist[b]; });
}

bool PibtContext::assign(AgentId i) {
  const auto& q_from = *q_from_;
  const auto ui = static_cast<std::size_t>(i);
  const Vertex at = q_from[ui];
  auto& cands = candidates_[ui];
  build_candidates(i, cands);

  AgentId swap_agent = kNoAgent;
  if (swap_enabled_) {
    const AgentId j = detect(i, q_from, cands.front(), occupied_now_);
    if (j != kNoAgent && q_to_[static_cast<std::size_t>(j)] == kNoVertex) {
      swap_agent = j;
    } else {
      swap_agent = detect_clear(i, q_from, cands.front(), occupied_now_);
    }
    if (swap_agent != kNoAgent) std::reverse(cands.begin(), cands.end());
  }

  for (std::size_t idx = 0; idx < cands.size(); ++idx) {
    const Vertex u = cands[idx];
    const auto uu = static_cast<std::size_t>(u);
    if (occupied_next_[uu] != kNoAgent) continue;
    const AgentId j = occupied_now_[uu];
    if (j != kNoAgent && j != i && q_to_[static_cast<std::size_t>(j)] == at) continue;

    q_to_[ui] = u;
    occupied_next_[uu] = i;
    if (j != kNoAgent && j != i && q_to_[static_cast<std::size_t>(j)] == kNoVertex && !assign(j)) continue;

    if (idx == 0 && swap_agent != kNoAgent) {
      const auto us = static_cast<std::size_t>(swap_agent);
      if (q_to_[us] == kNoVertex && occupied_next_[static_cast<std::size_t>(at)] == kNoAgent && u != q_from[us]) {
        q_to_[us] = at;
        occupied_next_[static_cast<std::size_t>(at)] = swap_agent;
      }
    }
    return true;
  }

  q_to_[ui] = at;
  occupied_next_[static_cast<std::size_t>(at)] = i;
  return false;
}

StepResult PibtContext::plan_step(const StepRequest& request) {
  const auto& q_from = request.q_from;
  const auto& map = instance_->map();
  const std::size_t n = instance_->num_agents();
  if (q_from.size() != n) throw ContractViolation("configuration length mismatch");

  std::fill(q_to_.begin(), q_to_.end(), kNoVertex);
  std::fill(occupied_now_.begin(), occupied_now_.end(), kNoAgent);
  std::fill(occupied_next_.begin(), occupied_next_.end(), kNoAgent);
  for (std::size_t i = 0; i < n; ++i) {
    if (!map.valid(q_from[i])) throw ContractViolation("invalid vertex in q_from");
    auto& slot = occupied_now_[static_cast<std::size_t>(q_from[i])];
    if (slot != kNoAgent) throw ContractViolation("q_from has a vertex collision");
    slot = static_cast<AgentId>(i);
  }

  for (const auto& pin : request.pins) {
    if (pin.who < 0 || static_cast<std::size_t>(pin.who) >= n) throw ContractViolation("pin names an unknown agent");
    const auto who = static_cast<std::size_t>(pin.who);
    if (q_to_[who] != kNoVertex) throw ContractViolation("agent pinned twice");
    const Vertex at = q_from[who];
    const auto nb = map.neighbors(at);
    if (pin.where != at && std::find(nb.begin(), nb.end(), pin.where) == nb.end()) {
      throw ContractViolation("pin is outside the agent's neighborhood");
    }
    if (occupied_next_[static_cast<std::size_t>(pin.where)] != kNoAgent) throw ContractViolation("pins collide on a vertex");
    const AgentId other = occupied_now_[static_cast<std::size_t>(pin.where)];
    if (other != kNoAgent && other != pin.who && q_to_[static_cast<std::size_t>(other)] == at) {
      throw ContractViolation("pins swap two agents");
    }
    q_to_[who] = pin.where;
    occupied_next_[static_cast<std::size_t>(pin.where)] = pin.who;
  }

  q_from_ = &q_from;
  for (AgentId i : processing_order()) {
    if (q_to_[static_cast<std::size_t>(i)] == kNoVertex && !assign(i)) {
      q_from_ = nullptr;
      return std::nullopt;
    }
  }
  q_from_ = nullptr;

  for (std::size_t i = 0; i < n; ++i) {
    if (occupied_next_[static_cast<std::size_t>(q_to_[i])] != static_cast<AgentId>(i)) return std::nullopt;
    const AgentId j = occupied_now_[static_cast<std::size_t>(q_to_[i])];
    if (j != kNoAgent && static_cast<std::size_t>(j) != i && q_to_[static_cast<std::size_t>(j)] == q_from[i]) {
      return std::nullopt;
    }
  }
  return q_to_;
}

}  // namespace mapf
