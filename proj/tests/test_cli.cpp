#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "mapf/bench.hpp"
#include "mapf/cli.hpp"

using namespace mapf;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mapf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("cli solve") {
  auto r = invoke({"solve", "-m", "data/corridor.map", "-i", "data/corridor.scen", "-N", "1", "-t", "none"});
  CHECK(r.code == 0);
  CHECK(r.out.find("status: OPTIMAL") != std::string::npos);
  CHECK(r.out.find("cost: 3") != std::string::npos);

  r = invoke({"solve", "-m", "data/swap2.map", "-i", "data/swap2.scen", "-N", "2", "-t", "none"});
  CHECK(r.code == 1);
  CHECK(r.out.find("NO_SOLUTION") != std::string::npos);

  r = invoke({"solve", "-m", "data/tunnel.map", "-i", "data/tunnel.scen", "-N", "2", "--no-anytime"});
  CHECK(r.code == 0);
  CHECK(r.out.find("status: FOUND") != std::string::npos);

  auto dir = scratch("budget");
  const auto trace = (dir / "trace.csv").string();
  r = invoke({"solve", "-m", "data/random-32-32-20.map", "-i", "data/random-32-32-20.scen", "-N", "30", "-t", "0.2",
           "--objective", "sum-of-fuels", "--trace", trace, "-v", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("SUBOPTIMAL") != std::string::npos);
  CHECK(read_file(trace).rfind("elapsed_ms,cost\n", 0) == 0);
  CHECK(r.err.find("cost") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "data/corridor.map"}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "data/corridor.map", "-i", "data/corridor.scen", "-N", "1", "-t", "soon"}).code ==
        cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "data/corridor.map", "-i", "data/corridor.scen", "-N", "1", "--objective", "flow"}).code ==
        cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "nope.map", "-i", "data/corridor.scen", "-N", "1"}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "data/corridor.map", "-i", "data/corridor.scen", "-N", "5"}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "-m", "data/corridor.map", "-i", "data/corridor.scen", "-N", "1", "--restart-prob", "2"}).code ==
        cli::kExitUsage);
  CHECK(invoke({"gen", "--size", "8x8", "--agents", "3", "--fill-ratio", "0.5", "-o", "x"}).code == cli::kExitUsage);
  CHECK(invoke({"gen", "--size", "8by8", "--agents", "3", "-o", "x"}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "validate"}).code == cli::kExitUsage);
  CHECK(invoke({"solve", "--help"}).code == 0);
}

TEST_CASE("exit codes are a function of status") {
  CHECK(cli::exit_code(Status::kOptimal) == 0);
  CHECK(cli::exit_code(Status::kSuboptimal) == 0);
  CHECK(cli::exit_code(Status::kFound) == 0);
  CHECK(cli::exit_code(Status::kNoSolution) == 1);
  CHECK(cli::exit_code(Status::kFailure) == 2);
}

TEST_CASE("cli validate") {
  auto dir = scratch("validate");
  const auto sol = (dir / "tunnel.sol").string();
  auto r = invoke({"solve", "-m", "data/tunnel.map", "-i", "data/tunnel.scen", "-N", "2", "-o", sol});
  REQUIRE(r.code == 0);
  r = invoke({"validate", "-m", "data/tunnel.map", "-i", "data/tunnel.scen", "-N", "2", "--solution", sol});
  CHECK(r.code == 0);
  CHECK(r.out == "valid\n");

  // corridor: agents cross between steps 1 and 2
  write_file((dir / "line.map").string(), "type octile\nheight 1\nwidth 4\nmap\n....\n");
  write_file((dir / "line.scen").string(),
             "version 1\n0\tline.map\t4\t1\t0\t0\t2\t0\t2\n0\tline.map\t4\t1\t3\t0\t1\t0\t2\n");
  write_file((dir / "swap.sol").string(), "starts=(0,0),(3,0)\n0:(0,0),(3,0)\n1:(1,0),(2,0)\n2:(2,0),(1,0)\n");
  r = invoke({"validate", "-m", (dir / "line.map").string(), "-i", (dir / "line.scen").string(), "-N", "2", "--solution",
           (dir / "swap.sol").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("EDGE") != std::string::npos);
  CHECK(r.out.find("step 2") != std::string::npos);

  write_file((dir / "short.sol").string(), "starts=(0,0),(3,0)\n0:(0,0),(3,0)\n1:(1,0),(2,0)\n");
  r = invoke({"validate", "-m", (dir / "line.map").string(), "-i", (dir / "line.scen").string(), "-N", "2", "--solution",
           (dir / "short.sol").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("GOAL") != std::string::npos);

  r = invoke({"validate", "-m", (dir / "line.map").string(), "-i", (dir / "line.scen").string(), "-N", "2", "--solution",
           (dir / "missing.sol").string()});
  CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("cli gen") {
  auto dir = scratch("gen");
  const auto a = (dir / "a").string(), b = (dir / "b").string();
  auto r = invoke({"gen", "--size", "8x8", "--obstacle-density", "0", "--fill-ratio", "0.9", "--seed", "3", "-o", a});
  CHECK(r.code == 0);
  CHECK(r.out.find("57 agents") != std::string::npos);
  invoke({"gen", "--size", "8x8", "--obstacle-density", "0", "--fill-ratio", "0.9", "--seed", "3", "-o", b});
  CHECK(read_file(a + ".map") == read_file(b + ".map"));
  auto map = GridMap::parse(read_file(a + ".map"));
  auto agents = parse_scenario(read_file(a + ".scen"), map, 57);
  auto again = parse_scenario(read_file(b + ".scen"), map, 57);
  CHECK(agents.starts.size() == 57);
  CHECK(agents.starts == again.starts);
  CHECK(agents.goals == again.goals);

  r = invoke({"gen", "--size", "4x4", "--obstacle-density", "1", "--agents", "1", "-o", a});
  CHECK(r.code == 1);
  r = invoke({"gen", "--size", "4x4", "--agents", "17", "-o", a});
  CHECK(r.code == 1);
}

TEST_CASE("cli bench and summarize") {
  auto dir = scratch("bench");
  const auto csv = (dir / "out.csv").string();
  auto r = invoke({"bench", "-m", "data/tunnel.map", "-i", "data/tunnel.scen", "--n-start", "1", "--n-step", "1",
                "--n-max", "2", "-t", "none", "--variants", "lacam*,lacam-noswap", "-o", csv});
  CHECK(r.code == 0);
  auto records = bench::parse_csv(read_file(csv));
  CHECK(records.size() == 4);
  CHECK(fs::exists(dir / "trace_3.csv"));

  r = invoke({"summarize", csv});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("map,n,variant,runs,solved,success_rate", 0) == 0);

  r = invoke({"bench", "--random", "10x10", "--instances", "2", "--gen-dir", (dir / "gen").string(), "--n-start", "4",
           "--n-max", "8", "--n-step", "4", "--iterations", "200", "-t", "none", "-o", (dir / "r.csv").string()});
  CHECK(r.code == 0);
  CHECK(bench::parse_csv(read_file((dir / "r.csv").string())).size() == 4);
  CHECK(invoke({"bench", "-o", csv}).code == cli::kExitUsage);
  CHECK(invoke({"bench", "-m", "data/tunnel.map", "--variants", "cbs"}).code == cli::kExitUsage);
}
