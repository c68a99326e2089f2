#include "mapf/grid.hpp"

#include <algorithm>
#include <charconv>
#include <queue>
#include <sstream>

namespace mapf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

int parse_dimension(std::string_view line, std::string_view key, int line_no) {
  auto rest = trim(line.substr(key.size()));
  int value = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  if (ec != std::errc{} || ptr != rest.data() + rest.size() || value <= 0) {
    throw ParseError(line_no, "invalid " + std::string(key) + " value '" + std::string(rest) + "'");
  }
  return value;
}

}  // namespace

bool is_passable_char(char c) { return c == '.' || c == 'G' || c == 'S'; }

bool is_map_char(char c) {
  return is_passable_char(c) || c == '@' || c == 'O' || c == 'T' || c == 'W';
}

GridMap GridMap::parse(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  int height = 0;
  int width = 0;
  bool saw_type = false;
  bool saw_map = false;

  for (; i < lines.size() && !saw_map; ++i) {
    const int line_no = static_cast<int>(i) + 1;
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.starts_with("type")) {
      saw_type = true;
    } else if (line.starts_with("height")) {
      height = parse_dimension(line, "height", line_no);
    } else if (line.starts_with("width")) {
      width = parse_dimension(line, "width", line_no);
    } else if (line == "map") {
      saw_map = true;
    } else {
      throw ParseError(line_no, "unexpected header line '" + std::string(line) + "'");
    }
  }
  if (!saw_type) throw ParseError(0, "missing 'type' header");
  if (height == 0) throw ParseError(0, "missing 'height' header");
  if (width == 0) throw ParseError(0, "missing 'width' header");
  if (!saw_map) throw ParseError(0, "missing 'map' header");

  std::vector<std::string> rows;
  rows.reserve(static_cast<std::size_t>(height));
  for (; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    auto line = lines[i];
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    if (line.empty()) {
      // trailing blank lines are tolerated; blank lines inside the grid are not
      bool rest_blank = std::all_of(lines.begin() + static_cast<std::ptrdiff_t>(i), lines.end(),
                                    [](std::string_view l) { return trim(l).empty(); });
      if (rest_blank) break;
      throw ParseError(line_no, "empty map row");
    }
    if (static_cast<int>(rows.size()) == height) {
      throw ParseError(line_no, "more than " + std::to_string(height) + " map rows");
    }
    if (static_cast<int>(line.size()) != width) {
      throw ParseError(line_no, "row length " + std::to_string(line.size()) + " != width " +
                                    std::to_string(width));
    }
    for (char c : line) {
      if (!is_map_char(c)) {
        throw ParseError(line_no, std::string("unknown map character '") + c + "'");
      }
    }
    rows.emplace_back(line);
  }
  if (static_cast<int>(rows.size()) != height) {
    throw ParseError(static_cast<int>(lines.size()),
                     "expected " + std::to_string(height) + " map rows, got " + std::to_string(rows.size()));
  }
  return from_rows(rows);
}

GridMap GridMap::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) throw ContractViolation("map needs at least one row");
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  std::vector<bool> mask;
  mask.reserve(static_cast<std::size_t>(width) * height);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != width) throw ContractViolation("ragged map rows");
    for (char c : row) mask.push_back(is_passable_char(c));
  }
  return from_mask(width, height, mask);
}

GridMap GridMap::from_mask(int width, int height, const std::vector<bool>& passable) {
  if (width <= 0 || height <= 0) throw ContractViolation("map dimensions must be positive");
  if (passable.size() != static_cast<std::size_t>(width) * height) {
    throw ContractViolation("mask size does not match dimensions");
  }
  GridMap m;
  m.width_ = width;
  m.height_ = height;
  m.ids_.assign(passable.size(), kNoVertex);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (passable[m.index(x, y)]) {
        m.ids_[m.index(x, y)] = static_cast<Vertex>(m.coords_.size());
        m.coords_.emplace_back(x, y);
      }
    }
  }
  m.build_adjacency();
  return m;
}

void GridMap::build_adjacency() {
  static constexpr int kDx[4] = {0, 1, 0, -1};  // up, right, down, left
  static constexpr int kDy[4] = {-1, 0, 1, 0};
  adj_offset_.assign(coords_.size() + 1, 0);
  adj_.clear();
  for (std::size_t v = 0; v < coords_.size(); ++v) {
    const auto [x, y] = coords_[v];
    for (int d = 0; d < 4; ++d) {
      const Vertex u = vertex_at(x + kDx[d], y + kDy[d]);
      if (u != kNoVertex) adj_.push_back(u);
    }
    adj_offset_[v + 1] = static_cast<std::uint32_t>(adj_.size());
  }
}

std::pair<int, int> GridMap::coord(Vertex v) const {
  if (!valid(v)) throw ContractViolation("invalid vertex id " + std::to_string(v));
  return coords_[static_cast<std::size_t>(v)];
}

std::span<const Vertex> GridMap::neighbors(Vertex v) const {
  if (!valid(v)) throw ContractViolation("invalid vertex id " + std::to_string(v));
  const auto b = adj_offset_[static_cast<std::size_t>(v)];
  const auto e = adj_offset_[static_cast<std::size_t>(v) + 1];
  return {adj_.data() + b, adj_.data() + e};
}

int GridMap::max_degree() const {
  int best = 0;
  for (std::size_t v = 0; v < coords_.size(); ++v) {
    best = std::max(best, static_cast<int>(adj_offset_[v + 1] - adj_offset_[v]));
  }
  return best;
}

std::string GridMap::serialize() const {
  std::ostringstream out;
  out << "type octile\nheight " << height_ << "\nwidth " << width_ << "\nmap\n";
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out << (ids_[index(x, y)] == kNoVertex ? '@' : '.');
    out << '\n';
  }
  return out.str();
}

DistTable bfs_dist_table(const GridMap& map, Vertex target) {
  if (!map.valid(target)) throw ContractViolation("invalid target vertex " + std::to_string(target));
  DistTable table;
  table.target = target;
  table.dist.assign(map.num_vertices(), kUnreachable);
  table.dist[static_cast<std::size_t>(target)] = 0;
  std::queue<Vertex> frontier;
  frontier.push(target);
  while (!frontier.empty()) {
    const Vertex v = frontier.front();
    frontier.pop();
    const int next = table.dist[static_cast<std::size_t>(v)] + 1;
    for (Vertex u : map.neighbors(v)) {
      auto& d = table.dist[static_cast<std::size_t>(u)];
      if (d == kUnreachable) {
        d = next;
        frontier.push(u);
      }
    }
  }
  return table;
}

const DistTable& DistTableCache::get(Vertex target) {
  std::lock_guard lock(mu_);
  auto& slot = tables_[target];
  if (!slot) slot = std::make_unique<DistTable>(bfs_dist_table(*map_, target));
  return *slot;
}

}  // namespace mapf
