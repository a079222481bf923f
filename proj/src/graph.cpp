#include "listmix/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

namespace listmix {

ColorSet::ColorSet(std::initializer_list<Color> colors) {
  for (Color c : colors) insert(c);
}

ColorSet ColorSet::palette(Color q) {
  if (q < 0 || q > kMaxColor) throw std::out_of_range("palette size out of range");
  return from_bits(q == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << q) - 1));
}

ColorSet& ColorSet::insert(Color c) {
  if (c < 1 || c > kMaxColor) throw std::out_of_range("color " + std::to_string(c) + " out of range");
  bits_ |= std::uint64_t{1} << (c - 1);
  return *this;
}

ColorSet& ColorSet::erase(Color c) {
  if (c >= 1 && c <= kMaxColor) bits_ &= ~(std::uint64_t{1} << (c - 1));
  return *this;
}

std::vector<Color> ColorSet::colors() const {
  std::vector<Color> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(__builtin_ctzll(b) + 1);
  return out;
}

std::ostream& operator<<(std::ostream& os, ColorSet s) {
  os << '{';
  bool first = true;
  for (Color c : s.colors()) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  return os << '}';
}

GraphListPair::GraphListPair(int n, std::span<const std::pair<Vertex, Vertex>> edges,
                             std::vector<ColorSet> lists)
    : adjacency_(static_cast<std::size_t>(std::max(n, 0))), lists_(std::move(lists)) {
  if (n < 0) throw FormatError("negative vertex count");
  if (static_cast<int>(lists_.size()) != n)
    throw FormatError("expected " + std::to_string(n) + " lists, got " + std::to_string(lists_.size()));
  for (auto [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw FormatError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    if (u == v) throw FormatError("self-loop at " + std::to_string(u));
    auto& nu = adjacency_[static_cast<std::size_t>(u)];
    if (std::find(nu.begin(), nu.end(), v) != nu.end())
      throw FormatError("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    nu.push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  for (int v = 0; v < n; ++v) {
    ColorSet l = lists_[static_cast<std::size_t>(v)];
    if (l.empty()) throw FormatError("empty list at vertex " + std::to_string(v));
    q_ = std::max(q_, l.max());
  }
}

int GraphListPair::max_degree() const {
  int d = 0;
  for (const auto& nb : adjacency_) d = std::max(d, static_cast<int>(nb.size()));
  return d;
}

bool GraphListPair::adjacent(Vertex u, Vertex v) const {
  const auto& nu = neighbors(u);
  return std::binary_search(nu.begin(), nu.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> GraphListPair::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (Vertex u = 0; u < size(); ++u)
    for (Vertex v : adjacency_[static_cast<std::size_t>(u)])
      if (u < v) out.emplace_back(u, v);
  return out;
}

std::size_t GraphListPair::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency_) twice += nb.size();
  return twice / 2;
}

GraphListPair GraphListPair::detached(Vertex v) const {
  GraphListPair out = *this;
  for (Vertex u : adjacency_.at(v)) {
    auto& nu = out.adjacency_[static_cast<std::size_t>(u)];
    nu.erase(std::find(nu.begin(), nu.end(), v));
  }
  out.adjacency_[static_cast<std::size_t>(v)].clear();
  return out;
}

GraphListPair GraphListPair::with_list(Vertex v, ColorSet list) const {
  auto lists = lists_;
  lists.at(static_cast<std::size_t>(v)) = list;
  return with_lists(std::move(lists));
}

GraphListPair GraphListPair::with_lists(std::vector<ColorSet> lists) const {
  if (lists.size() != lists_.size()) throw FormatError("list count mismatch");
  GraphListPair out = *this;
  out.lists_ = std::move(lists);
  out.q_ = 0;
  for (std::size_t v = 0; v < out.lists_.size(); ++v) {
    if (out.lists_[v].empty()) throw FormatError("empty list at vertex " + std::to_string(v));
    out.q_ = std::max(out.q_, out.lists_[v].max());
  }
  return out;
}

int Distance::value() const {
  if (is_infinite()) throw std::logic_error("infinite distance has no finite value");
  return hops_;
}

std::ostream& operator<<(std::ostream& os, Distance d) {
  if (d.is_infinite()) return os << "inf";
  return os << d.value();
}

std::vector<int> bfs_distances(const GraphListPair& pair, Vertex source) {
  std::vector<int> dist(static_cast<std::size_t>(pair.size()), -1);
  std::queue<Vertex> frontier;
  dist.at(static_cast<std::size_t>(source)) = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    Vertex u = frontier.front();
    frontier.pop();
    for (Vertex w : pair.neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

Distance distance(const GraphListPair& pair, std::span<const Vertex> a, std::span<const Vertex> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("distance between empty vertex sets");
  std::vector<int> dist(static_cast<std::size_t>(pair.size()), -1);
  std::queue<Vertex> frontier;
  for (Vertex s : a) {
    if (!pair.contains(s)) throw std::out_of_range("vertex " + std::to_string(s) + " out of range");
    if (dist[static_cast<std::size_t>(s)] < 0) {
      dist[static_cast<std::size_t>(s)] = 0;
      frontier.push(s);
    }
  }
  while (!frontier.empty()) {
    Vertex u = frontier.front();
    frontier.pop();
    for (Vertex w : pair.neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(w);
      }
    }
  }
  Distance best = Distance::infinite();
  for (Vertex t : b) {
    if (!pair.contains(t)) throw std::out_of_range("vertex " + std::to_string(t) + " out of range");
    int d = dist[static_cast<std::size_t>(t)];
    if (d >= 0) best = std::min(best, Distance(d));
  }
  return best;
}

Distance distance(const GraphListPair& pair, Vertex a, Vertex b) {
  return distance(pair, std::span<const Vertex>(&a, 1), std::span<const Vertex>(&b, 1));
}

std::vector<Vertex> boundary(const GraphListPair& pair, std::span<const Vertex> psi) {
  std::vector<char> inside(static_cast<std::size_t>(pair.size()), 0);
  for (Vertex v : psi) {
    if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
    inside[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<Vertex> out;
  for (Vertex u = 0; u < pair.size(); ++u) {
    if (inside[static_cast<std::size_t>(u)]) continue;
    for (Vertex w : pair.neighbors(u)) {
      if (inside[static_cast<std::size_t>(w)]) {
        out.push_back(u);
        break;
      }
    }
  }
  return out;
}

bool is_triangle_free(const GraphListPair& pair) {
  for (auto [u, v] : pair.edges()) {
    const auto& nu = pair.neighbors(u);
    const auto& nv = pair.neighbors(v);
    auto i = nu.begin();
    auto j = nv.begin();
    while (i != nu.end() && j != nv.end()) {
      if (*i == *j) return false;
      if (*i < *j) ++i; else ++j;
    }
  }
  return true;
}

Region::Region(const GraphListPair& pair, std::vector<Vertex> psi) : psi_(std::move(psi)) {
  std::sort(psi_.begin(), psi_.end());
  psi_.erase(std::unique(psi_.begin(), psi_.end()), psi_.end());
  boundary_ = listmix::boundary(pair, psi_);
}

bool Region::contains(Vertex v) const { return std::binary_search(psi_.begin(), psi_.end(), v); }

bool Region::on_boundary(Vertex v) const {
  return std::binary_search(boundary_.begin(), boundary_.end(), v);
}

namespace {

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

int parse_int(std::istringstream& fields, int line, const char* what) {
  std::string token;
  if (!(fields >> token)) fail_at(line, std::string("missing ") + what);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(token, &used);
  } catch (const std::exception&) {
    fail_at(line, std::string("bad ") + what + " '" + token + "'");
  }
  if (used != token.size()) fail_at(line, std::string("bad ") + what + " '" + token + "'");
  return value;
}

}  // namespace

GraphListPair parse_graph(std::istream& in) {
  int n = -1;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::set<std::pair<Vertex, Vertex>> seen;
  std::vector<ColorSet> lists;
  std::vector<char> has_list;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream fields(raw);
    std::string directive;
    if (!(fields >> directive)) continue;
    if (directive == "n") {
      if (n >= 0) fail_at(line, "vertex count given twice");
      n = parse_int(fields, line, "vertex count");
      if (n < 0) fail_at(line, "negative vertex count");
      lists.assign(static_cast<std::size_t>(n), ColorSet{});
      has_list.assign(static_cast<std::size_t>(n), 0);
    } else if (directive == "e") {
      if (n < 0) fail_at(line, "edge before vertex count");
      int u = parse_int(fields, line, "vertex");
      int v = parse_int(fields, line, "vertex");
      if (u < 0 || u >= n || v < 0 || v >= n) fail_at(line, "vertex id out of range");
      if (u == v) fail_at(line, "self-loop");
      if (!seen.insert(std::minmax(u, v)).second) fail_at(line, "duplicate edge");
      edges.emplace_back(u, v);
    } else if (directive == "l") {
      if (n < 0) fail_at(line, "list before vertex count");
      int v = parse_int(fields, line, "vertex");
      if (v < 0 || v >= n) fail_at(line, "vertex id out of range");
      if (has_list[static_cast<std::size_t>(v)]) fail_at(line, "list given twice");
      ColorSet l;
      std::string token;
      while (fields >> token) {
        std::istringstream one(token);
        int c = parse_int(one, line, "color");
        if (c < 1 || c > kMaxColor) fail_at(line, "color out of range");
        l.insert(c);
      }
      if (l.empty()) fail_at(line, "empty list");
      lists[static_cast<std::size_t>(v)] = l;
      has_list[static_cast<std::size_t>(v)] = 1;
      continue;
    } else {
      fail_at(line, "unknown directive '" + directive + "'");
    }
    std::string extra;
    if (fields >> extra) fail_at(line, "trailing token '" + extra + "'");
  }
  if (n < 0) throw FormatError("missing vertex count");
  for (int v = 0; v < n; ++v)
    if (!has_list[static_cast<std::size_t>(v)]) throw FormatError("vertex " + std::to_string(v) + " has no list");
  return GraphListPair(n, edges, std::move(lists));
}

GraphListPair parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

GraphListPair read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_graph(in);
}

void write_graph(std::ostream& out, const GraphListPair& pair) {
  out << "n " << pair.size() << '\n';
  for (auto [u, v] : pair.edges()) out << "e " << u << ' ' << v << '\n';
  for (Vertex v = 0; v < pair.size(); ++v) {
    out << "l " << v;
    for (Color c : pair.list(v).colors()) out << ' ' << c;
    out << '\n';
  }
}

std::string to_text(const GraphListPair& pair) {
  std::ostringstream out;
  write_graph(out, pair);
  return out.str();
}

}  // namespace listmix
