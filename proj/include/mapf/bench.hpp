#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mapf/core.hpp"
#include "mapf/lacam.hpp"

namespace mapf::bench {

// --- random instances --------------------------------------------------------

/// w×h grid with exactly round(density·w·h) blocked cells.
GridMap random_map(int width, int height, double density, std::mt19937_64& rng);

/// Vertices of the largest connected component, ascending.
std::vector<Vertex> largest_component(const GridMap& map);

/// n distinct starts and n distinct goals drawn from the largest component.
/// Throws std::invalid_argument when the component has fewer than n cells.
ScenarioAgents random_agents(const GridMap& map, std::size_t n, std::mt19937_64& rng);

/// floor(ratio·|V|).
std::size_t agents_for_fill_ratio(const GridMap& map, double ratio);

/// Convenience for corpora: a random map plus a random agent placement.
Instance random_instance(int width, int height, double density, std::size_t n, std::uint64_t seed);

// --- experiments ---------------------------------------------------------------

struct Variant {
  std::string name;
  bool swap = true;
  bool anytime = true;
};

struct ScenarioRef {
  std::string map_path;
  std::string scen_path;
};

struct RandomSource {
  int width = 32;
  int height = 32;
  double density = 0.2;
  int instances = 1;
  std::uint64_t seed = 0;
  std::string out_dir = ".";  // generated .map/.scen files land here
};

struct ExperimentConfig {
  std::vector<ScenarioRef> scenarios;
  std::optional<RandomSource> random;
  int n_start = 50;
  int n_step = 50;
  int n_max = 400;
  std::optional<double> time_budget_s = 10.0;
  std::optional<std::uint64_t> iteration_budget;
  Objective objective = Objective::kSumOfLoss;
  std::vector<Variant> variants{{"lacam*", true, true}};
  int jobs = 1;
  std::uint64_t seed = 0;
};

struct RunRecord {
  std::string map;
  std::string scen;
  int n = 0;
  std::string variant;
  std::uint64_t seed = 0;
  std::string status;
  std::optional<double> init_time_ms;
  std::optional<Cost> init_cost;
  std::optional<Cost> final_cost;
  std::uint64_t iterations = 0;
  std::vector<TracePoint> trace;
  Cost sum_dist = 0;   // Σ dist(s_i, g_i), for normalization
  std::string reason;  // why a run failed before solving, if it did

  bool solved() const { return final_cost.has_value(); }
};

/// final_cost / Σ dist(s_i, g_i); nullopt when unsolved or Σ dist = 0.
std::optional<double> normalized_cost(const RunRecord& r);

/// Per-run seed derived from the suite seed and the run's coordinates.
std::uint64_t derive_seed(std::uint64_t suite_seed, std::size_t source, int n, std::size_t variant);

/// Runs every (n, variant, source) cell of the sweep. Records are ordered by
/// n, then variant, then source, whatever the parallelism. A variant stops
/// after the first agent count at which it solved nothing.
std::vector<RunRecord> run_suite(const ExperimentConfig& cfg);

inline constexpr const char* kCsvHeader = "map,scen,n,variant,seed,status,init_time_ms,init_cost,final_cost,iterations";

/// Writes the records to `path` and each trace to `trace_<row>.csv` beside it.
void write_csv(const std::vector<RunRecord>& records, const std::string& path);
std::string to_csv(const std::vector<RunRecord>& records);
/// Inverse of to_csv (traces and normalization data are not part of the CSV).
std::vector<RunRecord> parse_csv(std::string_view text);

/// Recomputes sum_dist for parsed records by re-reading their map and
/// scenario files; records whose files are unreadable are left untouched.
void attach_distances(std::vector<RunRecord>& records);

/// Success rate, median normalized cost and mean iterations per (map, n, variant).
std::string summarize(const std::vector<RunRecord>& records);

}  // namespace mapf::bench
