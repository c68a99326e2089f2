#include "mapf/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "mapf/bench.hpp"

namespace mapf::cli {

int exit_code(Status status) {
  switch (status) {
    case Status::kOptimal:
    case Status::kSuboptimal:
    case Status::kFound:
      return kExitOk;
    case Status::kNoSolution:
      return kExitNoSolution;
    case Status::kFailure:
      return kExitFailure;
  }
  return kExitFailure;
}

namespace {

// Usage problems detected after CLI11 has parsed the flags.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<double> parse_budget(const std::string& text) {
  if (text == "none") return std::nullopt;
  std::size_t used = 0;
  double s = 0;
  try {
    s = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || s < 0) throw UsageError("-t expects seconds or 'none', got '" + text + "'");
  return s;
}

Objective parse_objective_flag(const std::string& text) {
  auto obj = parse_objective(text);
  if (!obj) throw UsageError("unknown objective '" + text + "'");
  return *obj;
}

// Map + scenario loading shared by solve and validate; read or parse
// failures are usage errors.
Instance load_instance(const std::string& map_path, const std::string& scen_path, int n) {
  if (n < 0) throw UsageError("-N must be non-negative");
  try {
    auto map = std::make_shared<const GridMap>(GridMap::parse(read_file(map_path)));
    auto agents = parse_scenario(read_file(scen_path), *map, static_cast<std::size_t>(n));
    return Instance(map, std::move(agents.starts), std::move(agents.goals));
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

std::string trace_csv(const std::vector<TracePoint>& trace) {
  std::ostringstream os;
  os << "elapsed_ms,cost\n" << std::fixed << std::setprecision(3);
  for (const auto& p : trace) os << p.elapsed_ms << ',' << p.cost << '\n';
  return os.str();
}

bench::Variant parse_variant(const std::string& name) {
  if (name == "lacam*") return {name, true, true};
  if (name == "lacam") return {name, true, false};
  if (name == "lacam*-noswap") return {name, false, true};
  if (name == "lacam-noswap") return {name, false, false};
  throw UsageError("unknown variant '" + name + "' (lacam*, lacam, lacam*-noswap, lacam-noswap)");
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no x");
    std::size_t a = 0, b = 0;
    const int w = std::stoi(text.substr(0, x), &a);
    const int h = std::stoi(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1 || w <= 0 || h <= 0) throw std::invalid_argument("bad");
    return {w, h};
  } catch (const std::invalid_argument&) {
    throw UsageError("--size expects WxH, got '" + text + "'");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anytime multi-agent pathfinding on grid maps", "mapf"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  std::string map_path, scen_path, budget = "10", objective = "sum-of-loss", solution_out, trace_out;
  int agents = 0, verbose = 0;
  std::uint64_t seed = 0;
  double restart = 0.001;
  bool no_swap = false, no_anytime = false;
  solve_cmd->add_option("-m,--map", map_path, "MovingAI .map file")->required();
  solve_cmd->add_option("-i,--scen", scen_path, "MovingAI .scen file")->required();
  solve_cmd->add_option("-N,--agents", agents, "Number of agents")->required();
  solve_cmd->add_option("-t,--time", budget, "Time budget in seconds, or 'none'");
  solve_cmd->add_option("-s,--seed", seed, "Random seed");
  solve_cmd->add_option("--objective", objective, "makespan | sum-of-loss | sum-of-fuels");
  solve_cmd->add_flag("--no-swap", no_swap, "Disable the swap technique");
  solve_cmd->add_flag("--no-anytime", no_anytime, "Stop at the first solution");
  solve_cmd->add_option("--restart-prob", restart, "Probability of reinserting the start node");
  solve_cmd->add_option("-o,--output", solution_out, "Solution file");
  solve_cmd->add_option("--trace", trace_out, "Cost-over-time CSV");
  solve_cmd->add_option("-v,--verbose", verbose, "Verbosity 0-2")->check(CLI::Range(0, 2));

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Check a solution file");
  std::string v_map, v_scen, v_solution;
  int v_agents = 0;
  validate_cmd->add_option("-m,--map", v_map, "MovingAI .map file")->required();
  validate_cmd->add_option("-i,--scen", v_scen, "MovingAI .scen file")->required();
  validate_cmd->add_option("-N,--agents", v_agents, "Number of agents")->required();
  validate_cmd->add_option("--solution", v_solution, "Solution file")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run an agent-count sweep and write CSV");
  std::vector<std::string> b_maps, b_scens, b_variants{"lacam*"};
  std::string b_random, b_budget = "10", b_objective = "sum-of-loss", b_csv = "results.csv", b_gen_dir = "generated";
  double b_density = 0.2;
  int b_instances = 1, b_start = 50, b_step = 50, b_max = 400, b_jobs = 1;
  std::uint64_t b_seed = 0, b_iterations = 0;
  bench_cmd->add_option("-m,--map", b_maps, "Map files, paired with --scen");
  bench_cmd->add_option("-i,--scen", b_scens, "Scenario files, paired with --map");
  auto* random_opt = bench_cmd->add_option("--random", b_random, "Generate random WxH instances");
  bench_cmd->add_option("--obstacle-density", b_density, "Obstacle density of random maps")->needs(random_opt);
  bench_cmd->add_option("--instances", b_instances, "Number of random instances")->needs(random_opt);
  bench_cmd->add_option("--gen-dir", b_gen_dir, "Where random instances are written")->needs(random_opt);
  bench_cmd->add_option("--n-start", b_start, "First agent count");
  bench_cmd->add_option("--n-step", b_step, "Agent count increment");
  bench_cmd->add_option("--n-max", b_max, "Largest agent count");
  bench_cmd->add_option("-t,--time", b_budget, "Per-run time budget in seconds, or 'none'");
  bench_cmd->add_option("--iterations", b_iterations, "Per-run iteration budget (0: none)");
  bench_cmd->add_option("--objective", b_objective, "makespan | sum-of-loss | sum-of-fuels");
  bench_cmd->add_option("--variants", b_variants, "lacam*, lacam, lacam*-noswap, lacam-noswap")->delimiter(',');
  bench_cmd->add_option("-j,--jobs", b_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  bench_cmd->add_option("-s,--seed", b_seed, "Suite seed");
  bench_cmd->add_option("-o,--output", b_csv, "Result CSV path");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random map and scenario");
  std::string g_size, g_prefix;
  double g_density = 0, g_fill = 0;
  int g_agents = 0;
  std::uint64_t g_seed = 0;
  gen_cmd->add_option("--size", g_size, "WxH")->required();
  gen_cmd->add_option("--obstacle-density", g_density, "Fraction of blocked cells")->check(CLI::Range(0.0, 1.0));
  auto* n_opt = gen_cmd->add_option("--agents", g_agents, "Number of agents");
  auto* fill_opt = gen_cmd->add_option("--fill-ratio", g_fill, "Agents as a fraction of |V|")->check(CLI::Range(0.0, 1.0));
  n_opt->excludes(fill_opt);
  gen_cmd->add_option("--seed", g_seed, "Random seed");
  gen_cmd->add_option("-o,--output", g_prefix, "Output prefix (writes .map and .scen)")->required();

  // summarize
  auto* sum_cmd = app.add_subcommand("summarize", "Aggregate a result CSV");
  std::string s_csv, s_out;
  sum_cmd->add_option("csv", s_csv, "Result CSV from bench")->required();
  sum_cmd->add_option("-o,--output", s_out, "Write the summary here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*solve_cmd) {
      auto ins = load_instance(map_path, scen_path, agents);
      SolverOptions opts;
      opts.objective = parse_objective_flag(objective);
      if (auto s = parse_budget(budget)) opts.time_budget = std::chrono::duration<double>(*s);
      opts.seed = seed;
      opts.swap_enabled = !no_swap;
      opts.anytime = !no_anytime;
      if (restart < 0 || restart > 1) throw UsageError("--restart-prob must lie in [0, 1]");
      opts.restart_probability = restart;
      if (verbose >= 1) {
        opts.on_solution = [&](const Solution&, Cost c, double ms) {
          err << "[" << std::fixed << std::setprecision(1) << ms << " ms] cost " << c << '\n';
        };
      }
      if (verbose >= 2) {
        err << "agents " << ins.num_agents() << ", vertices " << ins.map().num_vertices() << ", objective "
            << to_string(opts.objective) << '\n';
      }
      auto res = solve(ins, opts);
      out << "status: " << to_string(res.status) << '\n';
      out << "cost: " << (res.cost ? std::to_string(*res.cost) : "-") << '\n';
      out << "iterations: " << res.stats.iterations << '\n';
      out << "nodes: " << res.stats.nodes << '\n';
      out << "elapsed_ms: " << std::fixed << std::setprecision(3) << res.stats.elapsed_ms << '\n';
      if (!solution_out.empty() && res.solution) write_file(solution_out, serialize_solution(ins.map(), *res.solution));
      if (!trace_out.empty()) write_file(trace_out, trace_csv(res.stats.trace));
      return exit_code(res.status);
    }

    if (*validate_cmd) {
      auto ins = load_instance(v_map, v_scen, v_agents);
      SolutionFile file;
      try {
        file = parse_solution(read_file(v_solution), ins.map());
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      if (auto bad = validate(ins, file.solution)) {
        out << "invalid: " << bad->describe() << '\n';
        return 1;
      }
      out << "valid\n";
      return 0;
    }

    if (*bench_cmd) {
      bench::ExperimentConfig cfg;
      if (b_maps.size() != b_scens.size()) throw UsageError("--map and --scen must be given in pairs");
      for (std::size_t k = 0; k < b_maps.size(); ++k) cfg.scenarios.push_back({b_maps[k], b_scens[k]});
      if (!b_random.empty()) {
        auto [w, h] = parse_size(b_random);
        cfg.random = bench::RandomSource{w, h, b_density, b_instances, b_seed, b_gen_dir};
      }
      if (cfg.scenarios.empty() && !cfg.random) throw UsageError("bench needs --map/--scen pairs or --random");
      if (b_start <= 0 || b_step <= 0 || b_max <= 0) throw UsageError("sweep bounds must be positive");
      cfg.n_start = b_start;
      cfg.n_step = b_step;
      cfg.n_max = b_max;
      cfg.time_budget_s = parse_budget(b_budget);
      if (b_iterations > 0) cfg.iteration_budget = b_iterations;
      cfg.objective = parse_objective_flag(b_objective);
      cfg.variants.clear();
      for (const auto& v : b_variants) cfg.variants.push_back(parse_variant(v));
      cfg.jobs = b_jobs;
      cfg.seed = b_seed;
      auto records = bench::run_suite(cfg);
      bench::write_csv(records, b_csv);
      out << records.size() << " runs written to " << b_csv << '\n';
      return 0;
    }

    if (*gen_cmd) {
      auto [w, h] = parse_size(g_size);
      if (!*fill_opt && !*n_opt) throw UsageError("gen needs --agents or --fill-ratio");
      if (g_agents < 0) throw UsageError("--agents must be non-negative");
      std::mt19937_64 rng(g_seed);
      auto map = bench::random_map(w, h, g_density, rng);
      if (map.num_vertices() == 0) {
        err << "error: no passable cells\n";
        return 1;
      }
      const std::size_t n = *fill_opt ? bench::agents_for_fill_ratio(map, g_fill) : static_cast<std::size_t>(g_agents);
      ScenarioAgents placed;
      try {
        placed = bench::random_agents(map, n, rng);
      } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
      }
      const auto stem = std::filesystem::path(g_prefix).filename().string();
      write_file(g_prefix + ".map", map.serialize());
      write_file(g_prefix + ".scen", serialize_scenario(map, stem + ".map", placed.starts, placed.goals));
      out << "wrote " << g_prefix << ".map and " << g_prefix << ".scen (" << n << " agents, " << map.num_vertices()
          << " vertices)\n";
      return 0;
    }

    if (*sum_cmd) {
      std::vector<bench::RunRecord> records;
      try {
        records = bench::parse_csv(read_file(s_csv));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
      bench::attach_distances(records);
      const auto text = bench::summarize(records);
      if (s_out.empty()) out << text;
      else write_file(s_out, text);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace mapf::cli
