#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "mapf/core.hpp"

namespace mapf::oracle {

/// Thrown when an instance is too large for exhaustive search. The oracle
/// never answers beyond its limits.
class Refusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Limits {
  std::uint64_t max_branching = 1'000'000;  // (max degree + 1)^n
  std::uint64_t max_states = 5'000'000;     // distinct configurations visited
};

struct Result {
  std::optional<Cost> cost;  // nullopt: G is unreachable from S
  std::optional<Solution> solution;
  std::uint64_t states = 0;
};

/// Uniform-cost search over collision-free joint configurations.
Result optimal(const Instance& instance, Objective objective, const Limits& limits = {});

/// Optimal cost, or nullopt when the instance is unsolvable.
std::optional<Cost> optimal_cost(const Instance& instance, Objective objective, const Limits& limits = {});

/// Breadth-first reachability of G from S in the configuration graph.
bool is_solvable(const Instance& instance, const Limits& limits = {});

}  // namespace mapf::oracle
