// Acceptance checks; one PASS/FAIL line per criterion. Run from the
// repository root (fixtures are read from data/).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "mapf/bench.hpp"
#include "mapf/lacam.hpp"
#include "mapf/oracle.hpp"
#include "mapf/pibt.hpp"
#include "reference.hpp"

using namespace mapf;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct CorpusEntry {
  Instance instance;
  std::uint64_t seed;
  std::string label;
};

const Objective kObjectives[] = {Objective::kMakespan, Objective::kSumOfLoss, Objective::kSumOfFuels};

// 4x4 and 5x5 grids, 0-30% obstacles, 2-4 agents; four-agent cases stay on
// 4x4 to bound the oracle.
std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> out;
  const double densities[] = {0.0, 0.1, 0.2, 0.3};
  std::uint64_t seed = 1000;
  for (int k = 0; k < 210; ++k) {
    const int side = k % 3 == 2 ? 4 : (k % 2 == 0 ? 4 : 5);
    const std::size_t n = side == 4 ? 2 + static_cast<std::size_t>(k % 3) : 2 + static_cast<std::size_t>(k % 2);
    const double d = densities[k % 4];
    ++seed;
    try {
      auto ins = bench::random_instance(side, side, d, n, seed);
      std::ostringstream label;
      label << side << "x" << side << " d=" << d << " n=" << n << " seed=" << seed;
      out.push_back({std::move(ins), seed, label.str()});
    } catch (const std::invalid_argument&) {
      // too few cells in the largest component; skip
    }
  }
  return out;
}

SolverOptions exhaustive(Objective obj, std::uint64_t seed) {
  SolverOptions o;
  o.objective = obj;
  o.seed = seed;
  return o;
}

Verdict optimality_and_admissibility(const std::vector<CorpusEntry>& corpus, Verdict& admissible) {
  Verdict v;
  int solvable = 0, unsolvable = 0, mismatches = 0, inadmissible = 0;
  std::string first_bad, first_inadm;
  for (const auto& e : corpus) {
    DistTableCache cache(e.instance.map());
    std::vector<const DistTable*> tables;
    for (Vertex g : e.instance.goals()) tables.push_back(&cache.get(g));
    for (auto obj : kObjectives) {
      const auto truth = oracle::optimal_cost(e.instance, obj);
      const auto out = solve(e.instance, exhaustive(obj, e.seed));
      bool ok;
      if (truth) {
        ok = out.status == Status::kOptimal && out.cost == truth && out.solution &&
             !validate(e.instance, *out.solution).has_value() &&
             solution_cost(obj, *out.solution, e.instance.goals()) == *truth;
        if (heuristic(obj, e.instance.starts(), tables) > *truth) {
          ++inadmissible;
          if (first_inadm.empty()) first_inadm = e.label + " " + to_string(obj);
        }
      } else {
        ok = out.status == Status::kNoSolution;
      }
      if (!ok) {
        ++mismatches;
        if (first_bad.empty()) first_bad = e.label + " " + to_string(obj) + " status " + to_string(out.status);
      }
    }
    (oracle::is_solvable(e.instance) ? solvable : unsolvable) += 1;
  }
  std::ostringstream os;
  os << corpus.size() << " instances (" << solvable << " solvable, " << unsolvable << " unsolvable) x 3 objectives, "
     << mismatches << " mismatches";
  if (!first_bad.empty()) os << "; first: " << first_bad;
  v.pass = corpus.size() >= 200 && mismatches == 0;
  v.detail = os.str();

  std::ostringstream as;
  as << inadmissible << " heuristic values above the optimum";
  if (!first_inadm.empty()) as << "; first: " << first_inadm;
  admissible.pass = inadmissible == 0 && solvable > 0;
  admissible.detail = as.str();
  return v;
}

Verdict g_invariant(const std::vector<CorpusEntry>& corpus) {
  Verdict v;
  int checked = 0, iterations = 0, broken = 0;
  for (const auto& e : corpus) {
    if (checked == 20) break;
    if (e.instance.num_agents() > 3) continue;
    if (!oracle::is_solvable(e.instance)) continue;
    ++checked;
    const auto obj = kObjectives[checked % 3];
    auto opts = exhaustive(obj, e.seed);
    opts.on_iteration = [&](const std::deque<HighLevelNode>& nodes) {
      ++iterations;
      if (!mapf::testing::g_values_exact(nodes, obj, e.instance.goals())) ++broken;
    };
    solve(e.instance, opts);
  }
  v.pass = checked == 20 && broken == 0;
  v.detail = std::to_string(checked) + " instances, " + std::to_string(iterations) + " iterations checked, " +
             std::to_string(broken) + " with a stale g";
  return v;
}

Instance load(const std::string& stem, std::size_t n) {
  auto map = std::make_shared<const GridMap>(GridMap::parse(read_file("data/" + stem + ".map")));
  auto agents = parse_scenario(read_file("data/" + stem + ".scen"), *map, n);
  return Instance(map, agents.starts, agents.goals);
}

Verdict livelock_repair() {
  Verdict v;
  auto tunnel = load("tunnel", 2);
  const auto nv = tunnel.map().num_vertices();
  DistTableCache cache(tunnel.map());
  std::vector<const DistTable*> tables;
  for (Vertex g : tunnel.goals()) tables.push_back(&cache.get(g));
  PibtContext vanilla(tunnel, tables, 0, false);
  Configuration q = tunnel.starts();
  bool reached = false;
  for (std::size_t t = 0; t < 10 * nv && !reached; ++t) {
    vanilla.update_priorities(q);
    q = vanilla.plan_step(q).value();
    reached = q == tunnel.goals();
  }
  auto plain = exhaustive(Objective::kSumOfLoss, 0);
  plain.anytime = false;
  const auto with_swap = solve(tunnel, plain);
  const bool solved = with_swap.status == Status::kFound && with_swap.solution &&
                      !validate(tunnel, *with_swap.solution).has_value();

  auto four = load("tunnel4", 4);
  const auto a = solve(four, plain);
  auto no_swap = plain;
  no_swap.swap_enabled = false;
  const auto b = solve(four, no_swap);
  const bool reduced = a.status == Status::kFound && b.status == Status::kFound &&
                       a.stats.iterations * 10 <= b.stats.iterations;
  v.pass = !reached && solved && reduced;
  std::ostringstream os;
  os << "vanilla PIBT " << (reached ? "reached" : "did not reach") << " G in " << 10 * nv << " steps; LaCAM+swap "
     << to_string(with_swap.status) << " in " << with_swap.stats.iterations << " iterations; 4-agent: "
     << a.stats.iterations << " (swap) vs " << b.stats.iterations << " (no swap)";
  v.detail = os.str();
  return v;
}

Verdict discarding(const std::vector<CorpusEntry>& corpus) {
  Verdict v;
  int used = 0, not_worse = 0, strict = 0, cost_mismatch = 0;
  std::uint64_t total_on = 0, total_off = 0;
  for (const auto& e : corpus) {
    if (used == 20) break;
    // without discarding, four-agent instances can take tens of millions of iterations
    if (e.instance.num_agents() > 3 || !oracle::is_solvable(e.instance)) continue;
    ++used;
    auto on = exhaustive(Objective::kSumOfLoss, e.seed);
    auto off = on;
    off.discard = false;
    const auto a = solve(e.instance, on);
    const auto b = solve(e.instance, off);
    total_on += a.stats.iterations;
    total_off += b.stats.iterations;
    if (a.cost != b.cost || a.status != Status::kOptimal || b.status != Status::kOptimal) ++cost_mismatch;
    if (a.stats.iterations <= b.stats.iterations) ++not_worse;
    if (a.stats.iterations < b.stats.iterations) ++strict;
  }
  v.pass = used == 20 && not_worse == used && strict * 4 >= used && cost_mismatch == 0;
  std::ostringstream os;
  os << used << " instances: " << not_worse << " with discard <= without, " << strict << " strictly fewer, "
     << cost_mismatch << " cost mismatches; total iterations " << total_on << " vs " << total_off;
  v.detail = os.str();
  return v;
}

Verdict anytime_behavior() {
  Verdict v;
  int bad_trace = 0, slow_start = 0, invalid = 0, solved = 0;
  double worst_first = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    auto ins = bench::random_instance(16, 16, 0.2, 20, 500 + k);
    SolverOptions opts;
    opts.objective = Objective::kSumOfLoss;
    opts.time_budget = std::chrono::seconds(5);
    opts.seed = k;
    opts.on_solution = [&](const Solution& sol, Cost c, double) {
      if (validate(ins, sol) || solution_cost(opts.objective, sol, ins.goals()) != c) ++invalid;
    };
    const auto out = solve(ins, opts);
    const auto& tr = out.stats.trace;
    if (tr.empty()) {
      ++slow_start;
      continue;
    }
    ++solved;
    worst_first = std::max(worst_first, tr.front().elapsed_ms);
    if (tr.front().elapsed_ms >= 500) ++slow_start;
    for (std::size_t i = 1; i < tr.size(); ++i)
      if (tr[i].cost > tr[i - 1].cost || tr[i].elapsed_ms < tr[i - 1].elapsed_ms) ++bad_trace;
  }
  v.pass = solved == 10 && bad_trace == 0 && slow_start == 0 && invalid == 0;
  std::ostringstream os;
  os << solved << "/10 solved, slowest first solution " << worst_first << " ms, " << bad_trace
     << " increasing trace steps, " << invalid << " invalid intermediate solutions";
  v.detail = os.str();
  return v;
}

Verdict scalability() {
  Verdict v;
  auto ins = load("random-32-32-20", 200);
  SolverOptions opts;
  opts.objective = Objective::kSumOfLoss;
  opts.anytime = false;  // the search up to the first goal is the same as LaCAM*'s
  opts.time_budget = std::chrono::seconds(10);
  const auto out = solve(ins, opts);
  DistTableCache cache(ins.map());
  Cost sum_dist = 0;
  for (std::size_t i = 0; i < ins.num_agents(); ++i) sum_dist += cache.get(ins.goals()[i])[ins.starts()[i]];
  const bool found = out.status == Status::kFound && out.solution;
  const bool valid = found && !validate(ins, *out.solution).has_value();
  const double norm = found ? static_cast<double>(*out.cost) / static_cast<double>(sum_dist) : 0;
  v.pass = found && valid && out.stats.elapsed_ms < 10000 && norm <= 5.0;
  std::ostringstream os;
  os << "|V|=" << ins.map().num_vertices() << ", 200 agents: " << to_string(out.status) << " in " << out.stats.elapsed_ms
     << " ms, " << (valid ? "valid" : "INVALID") << ", normalized sum-of-loss " << norm;
  v.detail = os.str();
  return v;
}

Verdict generator_safety() {
  Verdict v;
  std::mt19937_64 rng(77);
  int calls = 0, successes = 0, disconnected = 0, pin_misses = 0;
  while (calls < 10000) {
    const int w = 3 + static_cast<int>(rng() % 6), h = 3 + static_cast<int>(rng() % 6);
    std::mt19937_64 map_rng(rng());
    auto map = std::make_shared<const GridMap>(bench::random_map(w, h, 0.25, map_rng));
    const auto cells = bench::largest_component(*map);
    if (cells.size() < 2) continue;
    const std::size_t n = 1 + rng() % std::min<std::size_t>(cells.size(), 8);
    auto placed = bench::random_agents(*map, n, map_rng);
    Instance ins(map, placed.starts, placed.goals);
    DistTableCache cache(*map);
    std::vector<const DistTable*> tables;
    for (Vertex g : ins.goals()) tables.push_back(&cache.get(g));
    PibtContext ctx(ins, tables, rng(), calls % 2 == 0);
    Configuration q = ins.starts();
    for (int step = 0; step < 20 && calls < 10000; ++step, ++calls) {
      ctx.update_priorities(q);
      std::vector<Pin> pins;
      if (calls % 4 != 0) {
        // up to two pins, kept only when mutually consistent
        for (int p = 0; p < 2; ++p) {
          const auto who = static_cast<AgentId>(rng() % n);
          const Vertex at = q[static_cast<std::size_t>(who)];
          auto nb = map->neighbors(at);
          const std::size_t pick = rng() % (nb.size() + 1);
          Pin pin{who, pick < nb.size() ? nb[pick] : at};
          bool clash = false;
          for (const auto& o : pins) {
            clash = clash || o.who == pin.who || o.where == pin.where ||
                    (o.where == at && pin.where == q[static_cast<std::size_t>(o.who)]);
          }
          if (!clash) pins.push_back(pin);
        }
      }
      auto next = ctx.plan_step(q, pins);
      if (!next) continue;
      ++successes;
      if (!is_connected(q, *next, *map)) ++disconnected;
      for (const auto& p : pins)
        if ((*next)[static_cast<std::size_t>(p.who)] != p.where) ++pin_misses;
      q = *next;
    }
  }
  v.pass = disconnected == 0 && pin_misses == 0;
  v.detail = std::to_string(calls) + " calls, " + std::to_string(successes) + " successes, " +
             std::to_string(disconnected) + " disconnected, " + std::to_string(pin_misses) + " pin misses";
  return v;
}

Verdict determinism_and_closure() {
  Verdict v;
  std::vector<std::string> problems;
  auto ins = load("random-32-32-20", 60);
  SolverOptions opts;
  opts.iteration_budget = 3000;
  opts.seed = 9;
  const auto a = solve(ins, opts);
  const auto b = solve(ins, opts);
  if (!a.solution || !b.solution) problems.push_back("no solution under the iteration budget");
  else if (serialize_solution(ins.map(), *a.solution) != serialize_solution(ins.map(), *b.solution))
    problems.push_back("solution files differ");

  const auto dir = std::filesystem::temp_directory_path() / "mapf_acceptance";
  std::filesystem::remove_all(dir);
  bench::ExperimentConfig cfg;
  cfg.random = bench::RandomSource{16, 16, 0.2, 2, 3, (dir / "gen").string()};
  cfg.n_start = 10;
  cfg.n_step = 10;
  cfg.n_max = 20;
  cfg.time_budget_s.reset();
  cfg.iteration_budget = 400;
  cfg.variants = {{"lacam*", true, true}, {"lacam", true, false}};
  auto untimed = [](std::vector<bench::RunRecord> rs) {
    for (auto& r : rs) r.init_time_ms.reset();
    return bench::to_csv(rs);
  };
  const auto r1 = bench::run_suite(cfg);
  cfg.jobs = 3;
  const auto r2 = bench::run_suite(cfg);
  if (untimed(r1) != untimed(r2)) problems.push_back("CSV differs between runs");
  bench::write_csv(r1, (dir / "out.csv").string());
  const auto parsed = bench::parse_csv(read_file((dir / "out.csv").string()));
  if (bench::to_csv(parsed) != bench::to_csv(r1)) problems.push_back("CSV does not re-parse");

  for (const auto& r : r1) {
    auto map = GridMap::parse(read_file(r.map));
    if (GridMap::parse(map.serialize()) != map) problems.push_back("map does not re-parse: " + r.map);
    const auto text = read_file(r.scen);
    auto agents = parse_scenario(text, map, static_cast<std::size_t>(r.n));
    auto again = parse_scenario(serialize_scenario(map, "x.map", agents.starts, agents.goals), map, agents.starts.size());
    if (again.starts != agents.starts || again.goals != agents.goals) problems.push_back("scen does not re-parse");
  }
  if (a.solution) {
    auto back = parse_solution(serialize_solution(ins.map(), *a.solution), ins.map());
    if (back.solution != *a.solution || back.starts != ins.starts()) problems.push_back("solution does not re-parse");
  }
  v.pass = problems.empty();
  v.detail = problems.empty() ? "solutions, CSV and all emitted files round-trip" : problems.front();
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* id, const char* name, const std::function<Verdict()>& check) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("[%s] %s %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", id, name, s, v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };

  const auto corpus = build_corpus();
  Verdict admissible;
  report("C1", "optimality vs oracle", [&] { return optimality_and_admissibility(corpus, admissible); });
  report("C2", "g-values are shortest paths in H", [&] { return g_invariant(corpus); });
  report("C3", "livelock repair by swap", livelock_repair);
  report("C4", "discarding reduces iterations", [&] { return discarding(corpus); });
  report("C5", "anytime behavior", anytime_behavior);
  report("C6", "scalability smoke", scalability);
  report("C7", "generator safety", generator_safety);
  report("C8", "heuristic admissibility", [&] { return admissible; });
  report("C9", "determinism and format closure", determinism_and_closure);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
