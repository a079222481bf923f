#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace listmix {

using Vertex = int;
using Color = int;

/// Largest color id a ColorSet can hold. Colors are 1-based.
inline constexpr Color kMaxColor = 64;

/// A finite subset of the palette {1..64}, stored as a bitmask.
class ColorSet {
 public:
  constexpr ColorSet() = default;
  ColorSet(std::initializer_list<Color> colors);
  static constexpr ColorSet from_bits(std::uint64_t bits) {
    ColorSet s;
    s.bits_ = bits;
    return s;
  }
  /// {1..q}
  static ColorSet palette(Color q);

  constexpr std::uint64_t bits() const { return bits_; }
  bool contains(Color c) const {
    return c >= 1 && c <= kMaxColor && ((bits_ >> (c - 1)) & 1U) != 0;
  }
  int size() const { return __builtin_popcountll(bits_); }
  bool empty() const { return bits_ == 0; }
  /// Largest member, 0 when empty.
  Color max() const { return bits_ == 0 ? 0 : 64 - __builtin_clzll(bits_); }

  ColorSet& insert(Color c);
  ColorSet& erase(Color c);
  ColorSet without(Color c) const { return ColorSet(*this).erase(c); }

  /// Members in ascending order.
  std::vector<Color> colors() const;

  friend constexpr bool operator==(ColorSet, ColorSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

std::ostream& operator<<(std::ostream& os, ColorSet s);

/// Raised by the text parser and by constructors that reject malformed input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simple undirected graph with one color list per vertex.
///
/// Vertices are 0..n-1, neighbor lists are kept in ascending id order, and
/// every list is a nonempty subset of {1..q} where q is the largest color
/// mentioned. Triangle-freeness is not enforced here; see is_triangle_free.
class GraphListPair {
 public:
  GraphListPair() = default;
  GraphListPair(int n, std::span<const std::pair<Vertex, Vertex>> edges,
                std::vector<ColorSet> lists);

  int size() const { return static_cast<int>(adjacency_.size()); }
  Color q() const { return q_; }
  const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_.at(v); }
  int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const;
  bool adjacent(Vertex u, Vertex v) const;
  ColorSet list(Vertex v) const { return lists_.at(v); }
  const std::vector<ColorSet>& lists() const { return lists_; }
  std::vector<std::pair<Vertex, Vertex>> edges() const;
  std::size_t edge_count() const;
  bool contains(Vertex v) const { return v >= 0 && v < size(); }

  /// Copy with every edge incident to v removed (v keeps its id and list).
  GraphListPair detached(Vertex v) const;
  /// Copy with list(v) replaced; the new list must be nonempty.
  GraphListPair with_list(Vertex v, ColorSet list) const;
  GraphListPair with_lists(std::vector<ColorSet> lists) const;

  friend bool operator==(const GraphListPair&, const GraphListPair&) = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<ColorSet> lists_;
  Color q_ = 0;
};

/// Graph distance, with infinity for vertices in different components.
class Distance {
 public:
  constexpr Distance() = default;
  constexpr explicit Distance(int hops) : hops_(hops) {}
  static constexpr Distance infinite() { return Distance(kInfinite); }

  constexpr bool is_infinite() const { return hops_ == kInfinite; }
  /// Throws std::logic_error on the infinite distance.
  int value() const;

  friend constexpr auto operator<=>(Distance, Distance) = default;

 private:
  static constexpr int kInfinite = std::numeric_limits<int>::max();
  int hops_ = 0;
};

std::ostream& operator<<(std::ostream& os, Distance d);

/// Shortest-path distance between two nonempty vertex sets.
Distance distance(const GraphListPair& pair, std::span<const Vertex> a,
                  std::span<const Vertex> b);
Distance distance(const GraphListPair& pair, Vertex a, Vertex b);

/// Vertices outside psi adjacent to some vertex of psi, ascending.
std::vector<Vertex> boundary(const GraphListPair& pair, std::span<const Vertex> psi);

bool is_triangle_free(const GraphListPair& pair);

/// BFS distances from a single vertex, -1 where unreachable.
std::vector<int> bfs_distances(const GraphListPair& pair, Vertex source);

/// A finite region psi together with its boundary.
class Region {
 public:
  Region(const GraphListPair& pair, std::vector<Vertex> psi);

  const std::vector<Vertex>& vertices() const { return psi_; }
  const std::vector<Vertex>& boundary() const { return boundary_; }
  bool contains(Vertex v) const;
  bool on_boundary(Vertex v) const;

 private:
  std::vector<Vertex> psi_;
  std::vector<Vertex> boundary_;
};

// Text format: "n <count>", "e <u> <v>", "l <v> <c1> <c2> ...", '#' comments.
GraphListPair parse_graph(std::istream& in);
GraphListPair parse_graph(const std::string& text);
GraphListPair read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const GraphListPair& pair);
std::string to_text(const GraphListPair& pair);

}  // namespace listmix
