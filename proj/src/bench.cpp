#include "mapf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mapf::bench {

GridMap random_map(int width, int height, double density, std::mt19937_64& rng) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("map size must be positive");
  if (density < 0 || density > 1) throw std::invalid_argument("obstacle density must lie in [0, 1]");
  const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const auto blocked = static_cast<std::size_t>(std::llround(density * static_cast<double>(cells)));
  std::vector<std::size_t> idx(cells);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<bool> mask(cells, true);
  for (std::size_t k = 0; k < blocked; ++k) mask[idx[k]] = false;
  return GridMap::from_mask(width, height, mask);
}

std::vector<Vertex> largest_component(const GridMap& map) {
  const auto nv = map.num_vertices();
  std::vector<int> label(nv, -1);
  std::vector<Vertex> best;
  for (Vertex root = 0; static_cast<std::size_t>(root) < nv; ++root) {
    if (label[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Vertex> comp{root};
    label[static_cast<std::size_t>(root)] = root;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (Vertex u : map.neighbors(comp[head])) {
        if (label[static_cast<std::size_t>(u)] >= 0) continue;
        label[static_cast<std::size_t>(u)] = root;
        comp.push_back(u);
      }
    }
    if (comp.size() > best.size()) best = std::move(comp);
  }
  std::sort(best.begin(), best.end());
  return best;
}

ScenarioAgents random_agents(const GridMap& map, std::size_t n, std::mt19937_64& rng) {
  auto cells = largest_component(map);
  if (cells.empty() && n > 0) throw std::invalid_argument("map has no passable cells");
  if (cells.size() < n) {
    throw std::invalid_argument(std::to_string(n) + " agents exceed the " + std::to_string(cells.size()) +
                                " cells of the largest component");
  }
  ScenarioAgents out;
  std::shuffle(cells.begin(), cells.end(), rng);
  out.starts.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n));
  std::shuffle(cells.begin(), cells.end(), rng);
  out.goals.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

std::size_t agents_for_fill_ratio(const GridMap& map, double ratio) {
  if (ratio < 0 || ratio > 1) throw std::invalid_argument("fill ratio must lie in [0, 1]");
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(map.num_vertices())));
}

Instance random_instance(int width, int height, double density, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto map = std::make_shared<const GridMap>(random_map(width, height, density, rng));
  auto agents = random_agents(*map, n, rng);
  return Instance(map, std::move(agents.starts), std::move(agents.goals));
}

// ---------------------------------------------------------------------------

std::optional<double> normalized_cost(const RunRecord& r) {
  if (!r.final_cost || r.sum_dist <= 0) return std::nullopt;
  return static_cast<double>(*r.final_cost) / static_cast<double>(r.sum_dist);
}

std::uint64_t derive_seed(std::uint64_t suite_seed, std::size_t source, int n, std::size_t variant) {
  // splitmix64 over the coordinates
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(suite_seed);
  h = mix(h ^ source);
  h = mix(h ^ static_cast<std::uint64_t>(n));
  h = mix(h ^ variant);
  return h;
}

namespace {

struct Source {
  std::string map_path;
  std::string scen_path;
  std::shared_ptr<const GridMap> map;
  std::string scen_text;
  std::string error;
};

std::vector<Source> load_sources(const ExperimentConfig& cfg) {
  std::vector<Source> out;
  for (const auto& ref : cfg.scenarios) {
    Source s{ref.map_path, ref.scen_path, nullptr, {}, {}};
    try {
      s.map = std::make_shared<const GridMap>(GridMap::parse(read_file(ref.map_path)));
      s.scen_text = read_file(ref.scen_path);
    } catch (const std::exception& e) {
      s.error = e.what();
    }
    out.push_back(std::move(s));
  }
  if (cfg.random) {
    const auto& r = *cfg.random;
    std::filesystem::create_directories(r.out_dir);
    for (int k = 0; k < r.instances; ++k) {
      std::mt19937_64 rng(derive_seed(r.seed, static_cast<std::size_t>(k), 0, 0));
      std::ostringstream stem;
      stem << "random-" << r.width << "-" << r.height << "-" << std::llround(r.density * 100) << "-" << k;
      const auto base = (std::filesystem::path(r.out_dir) / stem.str()).string();
      Source s{base + ".map", base + ".scen", nullptr, {}, {}};
      try {
        auto map = std::make_shared<const GridMap>(random_map(r.width, r.height, r.density, rng));
        const auto room = largest_component(*map).size();
        auto agents = random_agents(*map, std::min<std::size_t>(room, static_cast<std::size_t>(cfg.n_max)), rng);
        s.scen_text = serialize_scenario(*map, stem.str() + ".map", agents.starts, agents.goals);
        write_file(s.map_path, map->serialize());
        write_file(s.scen_path, s.scen_text);
        s.map = std::move(map);
      } catch (const std::exception& e) {
        s.error = e.what();
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

RunRecord run_one(const ExperimentConfig& cfg, const Source& src, int n, const Variant& variant,
                  std::uint64_t seed) {
  RunRecord rec;
  rec.map = src.map_path;
  rec.scen = src.scen_path;
  rec.n = n;
  rec.variant = variant.name;
  rec.seed = seed;
  rec.status = to_string(Status::kFailure);
  if (!src.error.empty()) {
    rec.reason = src.error;
    return rec;
  }
  try {
    auto agents = parse_scenario(src.scen_text, *src.map, static_cast<std::size_t>(n));
    Instance ins(src.map, std::move(agents.starts), std::move(agents.goals));
    DistTableCache cache(ins.map());
    for (std::size_t i = 0; i < ins.num_agents(); ++i) {
      const auto& t = cache.get(ins.goals()[i]);
      if (t.reachable(ins.starts()[i])) rec.sum_dist += t[ins.starts()[i]];
    }
    SolverOptions opts;
    opts.objective = cfg.objective;
    if (cfg.time_budget_s) opts.time_budget = std::chrono::duration<double>(*cfg.time_budget_s);
    opts.iteration_budget = cfg.iteration_budget;
    opts.anytime = variant.anytime;
    opts.swap_enabled = variant.swap;
    opts.seed = seed;
    auto out = solve(ins, opts);
    rec.status = to_string(out.status);
    rec.iterations = out.stats.iterations;
    rec.final_cost = out.cost;
    rec.trace = std::move(out.stats.trace);
    if (!rec.trace.empty()) {
      rec.init_time_ms = rec.trace.front().elapsed_ms;
      rec.init_cost = rec.trace.front().cost;
    }
  } catch (const std::exception& e) {
    rec.reason = e.what();
  }
  return rec;
}

template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<RunRecord> run_suite(const ExperimentConfig& cfg) {
  if (cfg.n_start <= 0 || cfg.n_step <= 0 || cfg.n_max <= 0) throw std::invalid_argument("sweep bounds must be positive");
  const auto sources = load_sources(cfg);
  std::vector<bool> active(cfg.variants.size(), true);
  std::vector<RunRecord> records;

  for (int n = cfg.n_start; n <= cfg.n_max; n += cfg.n_step) {
    struct Task {
      std::size_t variant;
      std::size_t source;
    };
    std::vector<Task> tasks;
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) {
      if (!active[v]) continue;
      for (std::size_t s = 0; s < sources.size(); ++s) tasks.push_back({v, s});
    }
    if (tasks.empty()) break;

    std::vector<RunRecord> round(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](std::size_t k) {
      const auto& t = tasks[k];
      round[k] = run_one(cfg, sources[t.source], n, cfg.variants[t.variant], derive_seed(cfg.seed, t.source, n, t.variant));
    });

    std::vector<bool> solved_any(cfg.variants.size(), false);
    for (std::size_t k = 0; k < tasks.size(); ++k) solved_any[tasks[k].variant] = solved_any[tasks[k].variant] || round[k].solved();
    for (std::size_t v = 0; v < cfg.variants.size(); ++v) active[v] = active[v] && solved_any[v];
    for (auto& r : round) records.push_back(std::move(r));
  }
  return records;
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::string fmt_ms(double ms) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << ms;
  return os.str();
}

}  // namespace

std::string to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << csv_field(r.map) << ',' << csv_field(r.scen) << ',' << r.n << ',' << csv_field(r.variant) << ',' << r.seed
       << ',' << r.status << ',' << (r.init_time_ms ? fmt_ms(*r.init_time_ms) : "") << ','
       << (r.init_cost ? std::to_string(*r.init_cost) : "") << ','
       << (r.final_cost ? std::to_string(*r.final_cost) : "") << ',' << r.iterations << '\n';
  }
  return os.str();
}

void write_csv(const std::vector<RunRecord>& records, const std::string& path) {
  write_file(path, to_csv(records));
  const auto dir = std::filesystem::path(path).parent_path();
  for (std::size_t k = 0; k < records.size(); ++k) {
    std::ostringstream os;
    os << "elapsed_ms,cost\n";
    for (const auto& p : records[k].trace) os << fmt_ms(p.elapsed_ms) << ',' << p.cost << '\n';
    write_file((dir / ("trace_" + std::to_string(k) + ".csv")).string(), os.str());
  }
}

std::vector<RunRecord> parse_csv(std::string_view text) {
  std::vector<RunRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError(1, "unexpected CSV header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10) throw ParseError(line_no, "expected 10 fields, got " + std::to_string(f.size()));
    try {
      RunRecord r;
      r.map = f[0];
      r.scen = f[1];
      r.n = std::stoi(f[2]);
      r.variant = f[3];
      r.seed = std::stoull(f[4]);
      r.status = f[5];
      if (!f[6].empty()) r.init_time_ms = std::stod(f[6]);
      if (!f[7].empty()) r.init_cost = std::stoll(f[7]);
      if (!f[8].empty()) r.final_cost = std::stoll(f[8]);
      r.iterations = std::stoull(f[9]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed number");
    }
  }
  return out;
}

void attach_distances(std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, std::string>, std::pair<std::shared_ptr<GridMap>, std::string>> loaded;
  for (auto& r : records) {
    auto key = std::make_pair(r.map, r.scen);
    auto it = loaded.find(key);
    if (it == loaded.end()) {
      std::pair<std::shared_ptr<GridMap>, std::string> entry;
      try {
        entry.first = std::make_shared<GridMap>(GridMap::parse(read_file(r.map)));
        entry.second = read_file(r.scen);
      } catch (const std::exception&) {
        entry.first = nullptr;
      }
      it = loaded.emplace(key, std::move(entry)).first;
    }
    if (!it->second.first) continue;
    try {
      const auto& map = *it->second.first;
      auto agents = parse_scenario(it->second.second, map, static_cast<std::size_t>(r.n));
      r.sum_dist = 0;
      for (std::size_t i = 0; i < agents.starts.size(); ++i) {
        const auto t = bfs_dist_table(map, agents.goals[i]);
        if (t.reachable(agents.starts[i])) r.sum_dist += t[agents.starts[i]];
      }
    } catch (const std::exception&) {
    }
  }
}

std::string summarize(const std::vector<RunRecord>& records) {
  struct Group {
    std::string map;
    int n;
    std::string variant;
    int runs = 0;
    int solved = 0;
    std::vector<double> norm;
    double iterations = 0;
  };
  std::vector<Group> groups;
  std::map<std::tuple<std::string, int, std::string>, std::size_t> index;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.map, r.n, r.variant);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) groups.push_back(Group{r.map, r.n, r.variant, 0, 0, {}, 0});
    auto& g = groups[it->second];
    ++g.runs;
    g.iterations += static_cast<double>(r.iterations);
    if (r.solved()) ++g.solved;
    if (auto c = normalized_cost(r)) g.norm.push_back(*c);
  }
  std::ostringstream os;
  os << "map,n,variant,runs,solved,success_rate,median_normalized_cost,mean_iterations\n";
  os << std::fixed;
  for (auto& g : groups) {
    os << csv_field(g.map) << ',' << g.n << ',' << csv_field(g.variant) << ',' << g.runs << ',' << g.solved << ','
       << std::setprecision(3) << static_cast<double>(g.solved) / g.runs << ',';
    if (!g.norm.empty()) {
      std::sort(g.norm.begin(), g.norm.end());
      const auto m = g.norm.size();
      os << std::setprecision(4) << (m % 2 ? g.norm[m / 2] : (g.norm[m / 2 - 1] + g.norm[m / 2]) / 2);
    }
    os << ',' << std::setprecision(1) << g.iterations / g.runs << '\n';
  }
  return os.str();
}

}  // namespace mapf::bench
