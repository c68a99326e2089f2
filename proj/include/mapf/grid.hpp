#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mapf {

using Vertex = std::int32_t;
inline constexpr Vertex kNoVertex = -1;

/// Raised on malformed map or scenario text. Carries the 1-based line number
/// of the offending input line (0 when the error is not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Raised when a caller breaks an operation's precondition (bad vertex id,
/// mismatched configuration lengths, malformed pins).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Four-connected grid graph. Passable cells get dense ids in row-major
/// order; neighbors are listed up, right, down, left.
class GridMap {
 public:
  GridMap() = default;

  /// Parses MovingAI `.map` text (`type`, `height`, `width`, `map` header).
  static GridMap parse(std::string_view text);
  /// Builds a map from rows of map characters; all rows must share a width.
  static GridMap from_rows(const std::vector<std::string>& rows);
  /// Builds a map from a row-major passability mask.
  static GridMap from_mask(int width, int height, const std::vector<bool>& passable);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t num_vertices() const { return coords_.size(); }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool passable(int x, int y) const { return in_bounds(x, y) && ids_[index(x, y)] != kNoVertex; }
  /// Vertex id at (x, y), or kNoVertex for blocked / out-of-range cells.
  Vertex vertex_at(int x, int y) const { return in_bounds(x, y) ? ids_[index(x, y)] : kNoVertex; }
  /// (x, y) = (column, row) of a vertex.
  std::pair<int, int> coord(Vertex v) const;

  bool valid(Vertex v) const { return v >= 0 && static_cast<std::size_t>(v) < coords_.size(); }
  std::span<const Vertex> neighbors(Vertex v) const;
  int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const;

  /// MovingAI text; blocked cells are written as `@`.
  std::string serialize() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.ids_ == b.ids_;
  }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  void build_adjacency();

  int width_ = 0;
  int height_ = 0;
  std::vector<Vertex> ids_;  // per cell
  std::vector<std::pair<int, int>> coords_;
  std::vector<std::uint32_t> adj_offset_;  // CSR over vertices
  std::vector<Vertex> adj_;
};

/// True for map characters that denote traversable terrain.
bool is_passable_char(char c);
/// True for any character the parser accepts in a map row.
bool is_map_char(char c);

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// BFS distances on the unweighted grid graph toward a single target.
struct DistTable {
  Vertex target = kNoVertex;
  std::vector<int> dist;

  int operator[](Vertex v) const { return dist[static_cast<std::size_t>(v)]; }
  bool reachable(Vertex v) const { return dist[static_cast<std::size_t>(v)] != kUnreachable; }
};

DistTable bfs_dist_table(const GridMap& map, Vertex target);

/// Lazily computed per-target distance tables. Safe for concurrent first
/// access; returned references stay valid for the cache's lifetime.
class DistTableCache {
 public:
  explicit DistTableCache(const GridMap& map) : map_(&map) {}
  DistTableCache(const DistTableCache&) = delete;
  DistTableCache& operator=(const DistTableCache&) = delete;

  const DistTable& get(Vertex target);
  const GridMap& map() const { return *map_; }

 private:
  const GridMap* map_;
  std::mutex mu_;
  std::unordered_map<Vertex, std::unique_ptr<DistTable>> tables_;
};

}  // namespace mapf
