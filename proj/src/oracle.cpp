#include "listmix/oracle.hpp"

#include <algorithm>
#include <boost/container_hash/hash.hpp>
#include <numeric>
#include <sstream>

namespace listmix {

namespace {

constexpr std::uint64_t bit(int i) { return std::uint64_t{1} << i; }

}  // namespace

std::optional<Color> BoundaryCondition::color(Vertex v) const {
  auto it = assigned_.find(v);
  if (it == assigned_.end()) return std::nullopt;
  return it->second;
}

BoundaryCondition BoundaryCondition::with(Vertex v, Color c) const {
  BoundaryCondition out = *this;
  out.assigned_[v] = c;
  return out;
}

BoundaryCondition BoundaryCondition::without(Vertex v) const {
  BoundaryCondition out = *this;
  out.assigned_.erase(v);
  return out;
}

void BoundaryCondition::validate(const GraphListPair& pair) const {
  for (auto [v, c] : assigned_) {
    if (!pair.contains(v)) throw std::invalid_argument("condition assigns unknown vertex " + std::to_string(v));
    if (!pair.list(v).contains(c))
      throw std::invalid_argument("condition color " + std::to_string(c) + " not in list of vertex " +
                                  std::to_string(v));
  }
}

std::string to_string(const BoundaryCondition& c) {
  std::ostringstream out;
  bool first = true;
  for (auto [v, col] : c.assignments()) {
    if (!first) out << ',';
    out << v << '=' << col;
    first = false;
  }
  return out.str();
}

BoundaryCondition parse_condition(const std::string& text) {
  BoundaryCondition out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw FormatError("condition item '" + item + "' is not v=c");
    try {
      std::size_t used_v = 0;
      std::size_t used_c = 0;
      std::string vs = item.substr(0, eq);
      std::string cs = item.substr(eq + 1);
      int v = std::stoi(vs, &used_v);
      int c = std::stoi(cs, &used_c);
      if (used_v != vs.size() || used_c != cs.size()) throw std::invalid_argument(item);
      if (out.is_assigned(v)) throw FormatError("vertex " + vs + " assigned twice");
      out.assign(v, c);
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("condition item '" + item + "' is not v=c");
    }
  }
  return out;
}

double MarginalVector::operator()(Color j) const {
  auto it = std::lower_bound(colors.begin(), colors.end(), j);
  if (it == colors.end() || *it != j) return 0.0;
  return probabilities[static_cast<std::size_t>(it - colors.begin())];
}

double MarginalVector::sum() const { return std::accumulate(probabilities.begin(), probabilities.end(), 0.0); }

BigInt ExactMarginals::count(Color j) const {
  auto it = std::lower_bound(colors.begin(), colors.end(), j);
  if (it == colors.end() || *it != j) return 0;
  return counts[static_cast<std::size_t>(it - colors.begin())];
}

Rational ExactMarginals::probability(Color j) const {
  if (total == 0) throw UncolorableRegion("no coloring extends the condition");
  return Rational(count(j), total);
}

MarginalVector ExactMarginals::to_vector() const {
  MarginalVector out;
  out.vertex = vertex;
  out.colors = colors;
  out.probabilities.reserve(colors.size());
  for (const auto& c : counts) out.probabilities.push_back(to_double(Rational(c, total)));
  return out;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::size_t ColoringCounter::KeyHash::operator()(const std::vector<std::uint64_t>& key) const noexcept {
  return boost::hash_range(key.begin(), key.end());
}

ColoringCounter::ColoringCounter(const GraphListPair& pair) : pair_(pair) {
  if (pair_.size() > 64) throw std::invalid_argument("exact counting supports at most 64 vertices");
  neighbor_mask_.assign(static_cast<std::size_t>(pair_.size()), 0);
  for (Vertex v = 0; v < pair_.size(); ++v)
    for (Vertex u : pair_.neighbors(v)) neighbor_mask_[static_cast<std::size_t>(v)] |= bit(u);
  residual_.assign(static_cast<std::size_t>(pair_.size()), 0);
}

BigInt ColoringCounter::count(const BoundaryCondition& condition) {
  condition.validate(pair_);
  std::uint64_t free_mask = 0;
  for (Vertex v = 0; v < pair_.size(); ++v) {
    residual_[static_cast<std::size_t>(v)] = pair_.list(v).bits();
    if (!condition.is_assigned(v)) free_mask |= bit(v);
  }
  for (auto [v, c] : condition.assignments()) {
    for (Vertex u : pair_.neighbors(v)) {
      auto other = condition.color(u);
      if (other && *other == c) return 0;
      residual_[static_cast<std::size_t>(u)] &= ~bit(c - 1);
    }
  }
  return count_free(free_mask);
}

BigInt ColoringCounter::count_free(std::uint64_t free_mask) {
  BigInt product = 1;
  std::uint64_t remaining = free_mask;
  while (remaining != 0) {
    std::uint64_t component = remaining & (~remaining + 1);
    std::uint64_t frontier = component;
    while (frontier != 0) {
      int u = __builtin_ctzll(frontier);
      frontier &= frontier - 1;
      std::uint64_t fresh = neighbor_mask_[static_cast<std::size_t>(u)] & remaining & ~component;
      component |= fresh;
      frontier |= fresh;
    }
    remaining &= ~component;
    BigInt part = count_component(component);
    if (part == 0) return 0;
    product *= part;
  }
  return product;
}

BigInt ColoringCounter::count_component(std::uint64_t component) {
  if ((component & (component - 1)) == 0) {
    return __builtin_popcountll(residual_[static_cast<std::size_t>(__builtin_ctzll(component))]);
  }
  std::vector<std::uint64_t> key;
  key.reserve(static_cast<std::size_t>(__builtin_popcountll(component)) + 1);
  key.push_back(component);
  int branch = -1;
  int best_colors = 65;
  int best_degree = -1;
  for (std::uint64_t rest = component; rest != 0; rest &= rest - 1) {
    int u = __builtin_ctzll(rest);
    std::uint64_t colors = residual_[static_cast<std::size_t>(u)];
    if (colors == 0) return 0;
    key.push_back(colors);
    int k = __builtin_popcountll(colors);
    int d = __builtin_popcountll(neighbor_mask_[static_cast<std::size_t>(u)] & component);
    if (k < best_colors || (k == best_colors && d > best_degree)) {
      branch = u;
      best_colors = k;
      best_degree = d;
    }
  }
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const std::uint64_t touched = neighbor_mask_[static_cast<std::size_t>(branch)] & component;
  std::vector<std::uint64_t> saved;
  for (std::uint64_t rest = touched; rest != 0; rest &= rest - 1)
    saved.push_back(residual_[static_cast<std::size_t>(__builtin_ctzll(rest))]);

  BigInt total = 0;
  for (std::uint64_t colors = residual_[static_cast<std::size_t>(branch)]; colors != 0; colors &= colors - 1) {
    const std::uint64_t c = colors & (~colors + 1);
    for (std::uint64_t rest = touched; rest != 0; rest &= rest - 1)
      residual_[static_cast<std::size_t>(__builtin_ctzll(rest))] &= ~c;
    total += count_free(component & ~bit(branch));
    std::size_t k = 0;
    for (std::uint64_t rest = touched; rest != 0; rest &= rest - 1)
      residual_[static_cast<std::size_t>(__builtin_ctzll(rest))] = saved[k++];
  }
  memo_.emplace(std::move(key), total);
  return total;
}

BigInt count_colorings(const GraphListPair& pair, const BoundaryCondition& condition) {
  ColoringCounter counter(pair);
  return counter.count(condition);
}

ExactMarginals exact_marginals(ColoringCounter& counter, const BoundaryCondition& condition, Vertex v) {
  const auto& pair = counter.pair();
  if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  if (condition.is_assigned(v))
    throw std::invalid_argument("marginal requested at assigned vertex " + std::to_string(v));
  ExactMarginals out;
  out.vertex = v;
  out.colors = pair.list(v).colors();
  out.counts.reserve(out.colors.size());
  for (Color j : out.colors) {
    out.counts.push_back(counter.count(condition.with(v, j)));
    out.total += out.counts.back();
  }
  if (out.total == 0) throw UncolorableRegion("no coloring extends condition {" + to_string(condition) + "}");
  return out;
}

ExactMarginals exact_marginals(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v) {
  ColoringCounter counter(pair);
  return exact_marginals(counter, condition, v);
}

Rational marginal_exact(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v, Color j) {
  if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
  if (!pair.list(v).contains(j)) return 0;
  return exact_marginals(pair, condition, v).probability(j);
}

double marginal(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v, Color j) {
  return to_double(marginal_exact(pair, condition, v, j));
}

MarginalVector marginal_vector(const GraphListPair& pair, const BoundaryCondition& condition, Vertex v) {
  return exact_marginals(pair, condition, v).to_vector();
}

JointCounts joint_counts(ColoringCounter& counter, const BoundaryCondition& condition,
                         std::span<const Vertex> lambda) {
  const auto& pair = counter.pair();
  JointCounts out;
  out.vertices.assign(lambda.begin(), lambda.end());
  std::sort(out.vertices.begin(), out.vertices.end());
  if (std::adjacent_find(out.vertices.begin(), out.vertices.end()) != out.vertices.end())
    throw std::invalid_argument("lambda contains a repeated vertex");
  for (Vertex v : out.vertices) {
    if (!pair.contains(v)) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
    if (condition.is_assigned(v))
      throw std::invalid_argument("lambda vertex " + std::to_string(v) + " is assigned by the condition");
  }
  std::vector<std::vector<Color>> lists;
  for (Vertex v : out.vertices) lists.push_back(pair.list(v).colors());

  std::vector<Color> tuple(out.vertices.size());
  BoundaryCondition extended = condition;
  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == out.vertices.size()) {
      out.tuples.push_back(tuple);
      out.counts.push_back(counter.count(extended));
      out.total += out.counts.back();
      return;
    }
    for (Color c : lists[k]) {
      tuple[k] = c;
      extended.assign(out.vertices[k], c);
      self(self, k + 1);
    }
    extended.clear(out.vertices[k]);
  };
  recurse(recurse, 0);
  if (out.total == 0) throw UncolorableRegion("no coloring extends condition {" + to_string(condition) + "}");
  return out;
}

namespace {

void check_tv_preconditions(const GraphListPair& pair, const Region& psi, const BoundaryCondition& c,
                            std::span<const Vertex> lambda) {
  for (auto [v, col] : c.assignments()) {
    if (psi.contains(v)) throw std::invalid_argument("condition assigns vertex " + std::to_string(v) + " inside psi");
  }
  for (Vertex v : lambda) {
    if (!psi.contains(v)) throw std::invalid_argument("lambda vertex " + std::to_string(v) + " is outside psi");
  }
  c.validate(pair);
}

}  // namespace

Rational tv_distance_exact(const GraphListPair& pair, const Region& psi, const BoundaryCondition& c1,
                           const BoundaryCondition& c2, std::span<const Vertex> lambda) {
  check_tv_preconditions(pair, psi, c1, lambda);
  check_tv_preconditions(pair, psi, c2, lambda);
  ColoringCounter counter(pair);
  JointCounts a = joint_counts(counter, c1, lambda);
  JointCounts b = joint_counts(counter, c2, lambda);
  BigInt numerator = 0;
  for (std::size_t k = 0; k < a.counts.size(); ++k) {
    BigInt diff = a.counts[k] * b.total - b.counts[k] * a.total;
    numerator += abs(diff);
  }
  return Rational(numerator, a.total * b.total);
}

double tv_distance_restricted(const GraphListPair& pair, const Region& psi, const BoundaryCondition& c1,
                              const BoundaryCondition& c2, std::span<const Vertex> lambda) {
  return to_double(tv_distance_exact(pair, psi, c1, c2, lambda));
}

}  // namespace listmix
