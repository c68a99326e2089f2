#include "mapf/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace mapf {

std::string to_string(Objective obj) {
  switch (obj) {
    case Objective::kMakespan: return "makespan";
    case Objective::kSumOfLoss: return "sum-of-loss";
    case Objective::kSumOfFuels: return "sum-of-fuels";
  }
  return "unknown";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "makespan") return Objective::kMakespan;
  if (name == "sum-of-loss") return Objective::kSumOfLoss;
  if (name == "sum-of-fuels") return Objective::kSumOfFuels;
  return std::nullopt;
}

Instance::Instance(std::shared_ptr<const GridMap> map, Configuration starts, Configuration goals)
    : map_(std::move(map)), starts_(std::move(starts)), goals_(std::move(goals)) {
  if (!map_) throw ContractViolation("instance needs a map");
  if (starts_.size() != goals_.size()) throw ContractViolation("starts and goals differ in length");
  for (std::size_t i = 0; i < starts_.size(); ++i) {
    if (!map_->valid(starts_[i]) || !map_->valid(goals_[i])) {
      throw ContractViolation("agent " + std::to_string(i) + " has an invalid start or goal");
    }
  }
  if (has_vertex_collision(starts_)) throw ContractViolation("starts are not distinct");
  if (has_vertex_collision(goals_)) throw ContractViolation("goals are not distinct");
}

bool has_vertex_collision(const Configuration& q) {
  Configuration sorted = q;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

namespace {

bool is_neighbor_or_self(const GridMap& map, Vertex from, Vertex to) {
  if (from == to) return true;
  const auto nb = map.neighbors(from);
  return std::find(nb.begin(), nb.end(), to) != nb.end();
}

// Agents sharing a vertex in q, as the lowest-indexed colliding pair.
std::optional<std::pair<AgentId, AgentId>> find_vertex_collision(const Configuration& q) {
  std::unordered_map<Vertex, AgentId> seen;
  seen.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    auto [it, inserted] = seen.emplace(q[i], static_cast<AgentId>(i));
    if (!inserted) return std::make_pair(it->second, static_cast<AgentId>(i));
  }
  return std::nullopt;
}

std::optional<std::pair<AgentId, AgentId>> find_edge_collision(const Configuration& from, const Configuration& to) {
  std::unordered_map<Vertex, AgentId> at_from;
  at_from.reserve(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) at_from.emplace(from[i], static_cast<AgentId>(i));
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (from[i] == to[i]) continue;
    auto it = at_from.find(to[i]);
    if (it == at_from.end()) continue;
    const auto j = static_cast<std::size_t>(it->second);
    if (j != i && to[j] == from[i]) {
      return std::make_pair(static_cast<AgentId>(std::min(i, j)), static_cast<AgentId>(std::max(i, j)));
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_connected(const Configuration& from, const Configuration& to, const GridMap& map) {
  if (from.size() != to.size()) throw ContractViolation("configuration length mismatch");
  for (std::size_t i = 0; i < from.size(); ++i) {
    if (!map.valid(to[i]) || !is_neighbor_or_self(map, from[i], to[i])) return false;
  }
  return !find_vertex_collision(to) && !find_edge_collision(from, to);
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kStart: return "START";
    case ViolationKind::kGoal: return "GOAL";
    case ViolationKind::kVertex: return "VERTEX";
    case ViolationKind::kEdge: return "EDGE";
    case ViolationKind::kMove: return "MOVE";
    case ViolationKind::kSize: return "SIZE";
  }
  return "UNKNOWN";
}

std::string Violation::describe() const {
  std::ostringstream out;
  out << to_string(kind) << " at step " << step;
  if (!agents.empty()) {
    out << " agents";
    for (auto a : agents) out << ' ' << a;
  }
  return out.str();
}

std::optional<Violation> validate(const Instance& instance, const Solution& sol) {
  const auto& map = instance.map();
  const std::size_t n = instance.num_agents();
  if (sol.configs.empty()) return Violation{0, ViolationKind::kStart, {}};

  for (std::size_t t = 0; t < sol.configs.size(); ++t) {
    const auto& q = sol.configs[t];
    if (q.size() != n) return Violation{t, ViolationKind::kSize, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (!map.valid(q[i])) return Violation{t, ViolationKind::kMove, {static_cast<AgentId>(i)}};
    }
  }

  const auto& q0 = sol.configs.front();
  if (q0 != instance.starts()) {
    std::vector<AgentId> off;
    for (std::size_t i = 0; i < n; ++i) {
      if (q0[i] != instance.starts()[i]) off.push_back(static_cast<AgentId>(i));
    }
    return Violation{0, ViolationKind::kStart, off};
  }
  if (auto c = find_vertex_collision(q0)) return Violation{0, ViolationKind::kVertex, {c->first, c->second}};

  for (std::size_t t = 1; t < sol.configs.size(); ++t) {
    const auto& from = sol.configs[t - 1];
    const auto& to = sol.configs[t];
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_neighbor_or_self(map, from[i], to[i])) return Violation{t, ViolationKind::kMove, {static_cast<AgentId>(i)}};
    }
    if (auto c = find_vertex_collision(to)) return Violation{t, ViolationKind::kVertex, {c->first, c->second}};
    if (auto c = find_edge_collision(from, to)) return Violation{t, ViolationKind::kEdge, {c->first, c->second}};
  }

  const auto& last = sol.configs.back();
  if (last != instance.goals()) {
    std::vector<AgentId> off;
    for (std::size_t i = 0; i < n; ++i) {
      if (last[i] != instance.goals()[i]) off.push_back(static_cast<AgentId>(i));
    }
    return Violation{sol.configs.size() - 1, ViolationKind::kGoal, off};
  }
  return std::nullopt;
}

Cost edge_cost(Objective obj, const Configuration& from, const Configuration& to, const Configuration& goals) {
  if (from.size() != to.size() || from.size() != goals.size()) {
    throw ContractViolation("configuration length mismatch");
  }
  switch (obj) {
    case Objective::kMakespan:
      return 1;
    case Objective::kSumOfFuels: {
      Cost c = 0;
      for (std::size_t i = 0; i < from.size(); ++i) c += from[i] != to[i] ? 1 : 0;
      return c;
    }
    case Objective::kSumOfLoss: {
      Cost c = 0;
      for (std::size_t i = 0; i < from.size(); ++i) c += (from[i] == goals[i] && to[i] == goals[i]) ? 0 : 1;
      return c;
    }
  }
  return 0;
}

Cost solution_cost(Objective obj, const Solution& sol, const Configuration& goals) {
  Cost total = 0;
  for (std::size_t t = 0; t + 1 < sol.configs.size(); ++t) {
    total += edge_cost(obj, sol.configs[t], sol.configs[t + 1], goals);
  }
  return total;
}

Cost heuristic(Objective obj, const Configuration& q, std::span<const DistTable* const> goal_tables) {
  if (q.size() != goal_tables.size()) throw ContractViolation("configuration length mismatch");
  Cost acc = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const int d = (*goal_tables[i])[q[i]];
    if (d == kUnreachable) return kInfiniteCost;
    acc = obj == Objective::kMakespan ? std::max<Cost>(acc, d) : acc + d;
  }
  return acc;
}

// --- scenario ---------------------------------------------------------------

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  if (line.find('\t') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      auto end = line.find('\t', pos);
      fields.push_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
    return fields;
  }
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

int to_int(std::string_view s, int line_no, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line_no, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

ScenarioAgents parse_scenario(std::string_view text, const GridMap& map, std::size_t n) {
  ScenarioAgents out;
  std::size_t pos = 0;
  int line_no = 0;
  bool saw_version = false;
  std::unordered_map<Vertex, int> start_rows;
  std::unordered_map<Vertex, int> goal_rows;

  while (pos < text.size() && out.starts.size() < n) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (!saw_version) {
      if (!line.starts_with("version")) throw ParseError(line_no, "expected 'version 1' header");
      if (line.find('1') == std::string_view::npos) throw ParseError(line_no, "unsupported scenario version");
      saw_version = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 9) throw ParseError(line_no, "expected 9 fields, got " + std::to_string(f.size()));
    const int sx = to_int(f[4], line_no, "start x");
    const int sy = to_int(f[5], line_no, "start y");
    const int gx = to_int(f[6], line_no, "goal x");
    const int gy = to_int(f[7], line_no, "goal y");
    const Vertex s = map.vertex_at(sx, sy);
    const Vertex g = map.vertex_at(gx, gy);
    if (s == kNoVertex) throw ParseError(line_no, "start (" + std::string(f[4]) + "," + std::string(f[5]) + ") is not passable");
    if (g == kNoVertex) throw ParseError(line_no, "goal (" + std::string(f[6]) + "," + std::string(f[7]) + ") is not passable");
    if (auto [it, ok] = start_rows.emplace(s, line_no); !ok) {
      throw ParseError(line_no, "duplicate start, first used on line " + std::to_string(it->second));
    }
    if (auto [it, ok] = goal_rows.emplace(g, line_no); !ok) {
      throw ParseError(line_no, "duplicate goal, first used on line " + std::to_string(it->second));
    }
    out.starts.push_back(s);
    out.goals.push_back(g);
  }
  if (!saw_version && n > 0) throw ParseError(0, "missing 'version 1' header");
  if (out.starts.size() < n) {
    throw ParseError(0, "scenario has " + std::to_string(out.starts.size()) + " rows, " + std::to_string(n) +
                            " agents requested");
  }
  return out;
}

std::string serialize_scenario(const GridMap& map, const std::string& map_name, const Configuration& starts,
                               const Configuration& goals) {
  std::ostringstream out;
  out << "version 1\n";
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto [sx, sy] = map.coord(starts[i]);
    const auto [gx, gy] = map.coord(goals[i]);
    const int d = bfs_dist_table(map, goals[i])[starts[i]];
    const int bucket = d == kUnreachable ? 0 : d / 4;
    out << bucket << '\t' << map_name << '\t' << map.width() << '\t' << map.height() << '\t' << sx << '\t' << sy
        << '\t' << gx << '\t' << gy << '\t' << std::fixed << std::setprecision(8)
        << (d == kUnreachable ? -1.0 : static_cast<double>(d)) << '\n';
  }
  return out.str();
}

// --- solution text ----------------------------------------------------------

namespace {

void write_config(std::ostream& out, const GridMap& map, const Configuration& q) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto [x, y] = map.coord(q[i]);
    out << (i == 0 ? "" : ",") << '(' << x << ',' << y << ')';
  }
}

Configuration read_config(std::string_view s, const GridMap& map, int line_no) {
  Configuration q;
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s[pos] == ',' || s[pos] == ' ') {
      ++pos;
      continue;
    }
    if (s[pos] != '(') throw ParseError(line_no, "expected '('");
    const auto comma = s.find(',', pos);
    const auto close = s.find(')', pos);
    if (comma == std::string_view::npos || close == std::string_view::npos || comma > close) {
      throw ParseError(line_no, "malformed coordinate");
    }
    const int x = to_int(s.substr(pos + 1, comma - pos - 1), line_no, "x");
    const int y = to_int(s.substr(comma + 1, close - comma - 1), line_no, "y");
    const Vertex v = map.vertex_at(x, y);
    if (v == kNoVertex) {
      throw ParseError(line_no, "(" + std::to_string(x) + "," + std::to_string(y) + ") is not passable");
    }
    q.push_back(v);
    pos = close + 1;
  }
  return q;
}

}  // namespace

std::string serialize_solution(const GridMap& map, const Solution& sol) {
  std::ostringstream out;
  out << "starts=";
  if (!sol.configs.empty()) write_config(out, map, sol.configs.front());
  out << '\n';
  for (std::size_t t = 0; t < sol.configs.size(); ++t) {
    out << t << ':';
    write_config(out, map, sol.configs[t]);
    out << '\n';
  }
  return out.str();
}

SolutionFile parse_solution(std::string_view text, const GridMap& map) {
  SolutionFile file;
  bool saw_starts = false;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.starts_with("starts=")) {
      file.starts = read_config(line.substr(7), map, line_no);
      saw_starts = true;
      continue;
    }
    const auto colon = line.find(':');
    const auto eq = line.find('=');
    if (!saw_starts && eq != std::string_view::npos && (colon == std::string_view::npos || eq < colon)) {
      continue;  // metadata such as `agents=` or `solver=`
    }
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected 't:' prefix");
    const int t = to_int(line.substr(0, colon), line_no, "timestep");
    if (t != static_cast<int>(file.solution.configs.size())) {
      throw ParseError(line_no, "expected timestep " + std::to_string(file.solution.configs.size()));
    }
    file.solution.configs.push_back(read_config(line.substr(colon + 1), map, line_no));
  }
  if (!saw_starts) throw ParseError(0, "missing 'starts=' line");
  return file;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace mapf
