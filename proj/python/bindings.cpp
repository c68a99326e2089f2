#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mapf/bench.hpp"
#include "mapf/cli.hpp"
#include "mapf/lacam.hpp"
#include "mapf/oracle.hpp"

namespace py = pybind11;
using namespace mapf;

namespace {

SolveOutcome py_solve(const Instance& ins, Objective objective, std::optional<double> time_budget,
                      std::optional<std::uint64_t> iteration_budget, bool anytime, bool swap, std::uint64_t seed,
                      double restart_probability) {
  SolverOptions opts;
  opts.objective = objective;
  if (time_budget) opts.time_budget = std::chrono::duration<double>(*time_budget);
  opts.iteration_budget = iteration_budget;
  opts.anytime = anytime;
  opts.swap_enabled = swap;
  opts.seed = seed;
  opts.restart_probability = restart_probability;
  py::gil_scoped_release unlocked;
  return solve(ins, opts);
}

std::vector<std::pair<int, int>> coords(const GridMap& map, const Configuration& q) {
  std::vector<std::pair<int, int>> out;
  for (Vertex v : q) out.push_back(map.coord(v));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Anytime multi-agent pathfinding on grid maps";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<oracle::Refusal>(m, "OracleRefusal", PyExc_RuntimeError);

  py::enum_<Objective>(m, "Objective")
      .value("MAKESPAN", Objective::kMakespan)
      .value("SUM_OF_LOSS", Objective::kSumOfLoss)
      .value("SUM_OF_FUELS", Objective::kSumOfFuels);

  py::enum_<Status>(m, "Status")
      .value("OPTIMAL", Status::kOptimal)
      .value("SUBOPTIMAL", Status::kSuboptimal)
      .value("FOUND", Status::kFound)
      .value("NO_SOLUTION", Status::kNoSolution)
      .value("FAILURE", Status::kFailure);

  py::class_<GridMap, std::shared_ptr<GridMap>>(m, "GridMap")
      .def_static("parse", [](const std::string& text) { return std::make_shared<GridMap>(GridMap::parse(text)); })
      .def_static("from_rows",
                  [](const std::vector<std::string>& rows) { return std::make_shared<GridMap>(GridMap::from_rows(rows)); })
      .def_property_readonly("width", &GridMap::width)
      .def_property_readonly("height", &GridMap::height)
      .def_property_readonly("num_vertices", &GridMap::num_vertices)
      .def("vertex_at", &GridMap::vertex_at)
      .def("coord", &GridMap::coord)
      .def("neighbors", [](const GridMap& g, Vertex v) {
        auto nb = g.neighbors(v);
        return std::vector<Vertex>(nb.begin(), nb.end());
      })
      .def("degree", &GridMap::degree)
      .def("distances", [](const GridMap& g, Vertex target) {
        auto t = bfs_dist_table(g, target);
        std::vector<std::optional<int>> out;
        for (int d : t.dist) out.push_back(d == kUnreachable ? std::nullopt : std::optional<int>(d));
        return out;
      })
      .def("serialize", &GridMap::serialize)
      .def("__eq__", [](const GridMap& a, const GridMap& b) { return a == b; });

  py::class_<Instance>(m, "Instance")
      .def(py::init([](std::shared_ptr<GridMap> map, Configuration starts, Configuration goals) {
             return Instance(std::move(map), std::move(starts), std::move(goals));
           }),
           py::arg("map"), py::arg("starts"), py::arg("goals"))
      .def_property_readonly("starts", &Instance::starts)
      .def_property_readonly("goals", &Instance::goals)
      .def_property_readonly("num_agents", &Instance::num_agents)
      .def_property_readonly("map", [](const Instance& ins) { return std::const_pointer_cast<GridMap>(ins.map_ptr()); });

  m.def(
      "load_instance",
      [](const std::string& map_text, const std::string& scen_text, std::size_t n) {
        auto map = std::make_shared<const GridMap>(GridMap::parse(map_text));
        auto agents = parse_scenario(scen_text, *map, n);
        return Instance(map, std::move(agents.starts), std::move(agents.goals));
      },
      py::arg("map_text"), py::arg("scen_text"), py::arg("n"), "Builds an instance from .map and .scen text.");

  py::class_<TracePoint>(m, "TracePoint")
      .def_readonly("elapsed_ms", &TracePoint::elapsed_ms)
      .def_readonly("cost", &TracePoint::cost);

  py::class_<SolveOutcome>(m, "SolveOutcome")
      .def_readonly("status", &SolveOutcome::status)
      .def_readonly("cost", &SolveOutcome::cost)
      .def_property_readonly("solution",
                             [](const SolveOutcome& o) -> std::optional<std::vector<Configuration>> {
                               if (!o.solution) return std::nullopt;
                               return o.solution->configs;
                             })
      .def_property_readonly("iterations", [](const SolveOutcome& o) { return o.stats.iterations; })
      .def_property_readonly("nodes", [](const SolveOutcome& o) { return o.stats.nodes; })
      .def_property_readonly("elapsed_ms", [](const SolveOutcome& o) { return o.stats.elapsed_ms; })
      .def_property_readonly("trace", [](const SolveOutcome& o) { return o.stats.trace; });

  m.def("solve", &py_solve, py::arg("instance"), py::arg("objective") = Objective::kSumOfLoss,
        py::arg("time_budget") = py::none(), py::arg("iteration_budget") = py::none(), py::arg("anytime") = true,
        py::arg("swap") = true, py::arg("seed") = 0, py::arg("restart_probability") = 0.001,
        "Runs LaCAM* (or plain LaCAM with anytime=False). time_budget is in seconds.");

  m.def(
      "validate",
      [](const Instance& ins, const std::vector<Configuration>& configs) -> std::optional<std::string> {
        auto bad = validate(ins, Solution{configs});
        if (!bad) return std::nullopt;
        return bad->describe();
      },
      py::arg("instance"), py::arg("configs"), "None when valid, otherwise a description of the first violation.");

  m.def(
      "solution_cost",
      [](Objective obj, const std::vector<Configuration>& configs, const Configuration& goals) {
        return solution_cost(obj, Solution{configs}, goals);
      },
      py::arg("objective"), py::arg("configs"), py::arg("goals"));

  m.def(
      "serialize_solution",
      [](const GridMap& map, const std::vector<Configuration>& configs) { return serialize_solution(map, Solution{configs}); },
      py::arg("map"), py::arg("configs"));
  m.def(
      "parse_solution",
      [](const GridMap& map, const std::string& text) { return parse_solution(text, map).solution.configs; },
      py::arg("map"), py::arg("text"));

  m.def("coords", &coords, py::arg("map"), py::arg("config"));

  m.def(
      "optimal_cost",
      [](const Instance& ins, Objective obj) {
        py::gil_scoped_release unlocked;
        return oracle::optimal_cost(ins, obj);
      },
      py::arg("instance"), py::arg("objective"), "Brute-force optimum; None when unsolvable.");
  m.def("is_solvable", [](const Instance& ins) { return oracle::is_solvable(ins); }, py::arg("instance"));

  m.def("random_instance", &bench::random_instance, py::arg("width"), py::arg("height"), py::arg("density"),
        py::arg("n"), py::arg("seed"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release unlocked;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
