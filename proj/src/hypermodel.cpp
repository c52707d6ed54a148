#include "hyperex/hypermodel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "hyperex/errors.hpp"
#include "hyperex/statespace.hpp"

namespace hyperex {

// ---------------------------------------------------------------------------
// Hypergraph

Hypergraph::Hypergraph(std::vector<long long> labels,
                       const std::vector<std::vector<long long>>& edges_by_label)
    : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
    throw InvalidInput("vertex labels must be distinct");
  edges_.reserve(edges_by_label.size());
  for (std::size_t e = 0; e < edges_by_label.size(); ++e) {
    std::vector<Vertex> edge;
    for (long long l : edges_by_label[e]) edge.push_back(index_of(l));
    std::sort(edge.begin(), edge.end());
    if (edge.size() < 2)
      throw InvalidInput("edge " + std::to_string(e) + " has fewer than two vertices");
    if (std::adjacent_find(edge.begin(), edge.end()) != edge.end())
      throw InvalidInput("edge " + std::to_string(e) + " repeats a vertex");
    edges_.push_back(std::move(edge));
  }
}

Vertex Hypergraph::index_of(long long label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label)
    throw InvalidInput("unknown vertex label " + std::to_string(label));
  return static_cast<Vertex>(it - labels_.begin());
}

std::vector<std::size_t> Hypergraph::degrees() const {
  std::vector<std::size_t> deg(num_vertices(), 0);
  for (const auto& e : edges_)
    for (Vertex v : e) ++deg[v];
  return deg;
}

bool Hypergraph::contains(std::size_t e, Vertex v) const {
  const auto& edge = edges_.at(e);
  return std::binary_search(edge.begin(), edge.end(), v);
}

// ---------------------------------------------------------------------------
// EdgeMeasure

EdgeMeasure::EdgeMeasure(std::size_t edge_size,
                         std::vector<std::pair<CycleType, double>> weights)
    : edge_size_(edge_size), weights_(std::move(weights)) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const auto& [type, w] = weights_[i];
    if (!(w >= 0.0 && w <= 1.0))
      throw InvalidInput("weight for type " + type.to_string() + " outside [0,1]");
    if (type.moved() > edge_size)
      throw InvalidInput("type " + type.to_string() + " does not fit an edge of size " +
                         std::to_string(edge_size));
    for (std::size_t j = 0; j < i; ++j)
      if (weights_[j].first == type) throw InvalidInput("duplicate type " + type.to_string());
    total += w;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidInput("edge weights sum to " + std::to_string(total) + ", expected 1");
}

double EdgeMeasure::weight(const CycleType& t) const {
  for (const auto& [type, w] : weights_)
    if (type == t) return w;
  return 0.0;
}

std::vector<std::pair<CycleType, double>> EdgeMeasure::support() const {
  std::vector<std::pair<CycleType, double>> s;
  for (const auto& tw : weights_)
    if (tw.second > 0.0) s.push_back(tw);
  return s;
}

std::size_t EdgeMeasure::sample_type(Rng& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  for (std::size_t i = 0; i < cumulative_.size(); ++i)
    if (u < cumulative_[i] && weights_[i].second > 0.0) return i;
  // Rounding at the top end: return the last positive-weight type.
  for (std::size_t i = weights_.size(); i-- > 0;)
    if (weights_[i].second > 0.0) return i;
  return 0;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(Hypergraph g, std::vector<EdgeMeasure> m)
    : graph(std::move(g)), measures(std::move(m)) {
  if (measures.size() != graph.num_edges())
    throw InvalidInput("expected one measure per edge: " + std::to_string(graph.num_edges()) +
                       " edges, " + std::to_string(measures.size()) + " measures");
  for (std::size_t e = 0; e < measures.size(); ++e)
    if (measures[e].edge_size() != graph.edge(e).size())
      throw InvalidInput("measure " + std::to_string(e) + " has the wrong edge size");
}

double fixed_point_prob(const Model& m, std::size_t e, Vertex v) {
  if (!m.graph.contains(e, v))
    throw InvalidInput("vertex " + std::to_string(v) + " is not in edge " + std::to_string(e));
  const std::size_t size = m.graph.edge(e).size();
  double p = 0.0;
  for (const auto& [type, w] : m.measures[e].weights())
    p += w * static_cast<double>(type.fixed_points(size)) / static_cast<double>(size);
  return p;
}

std::vector<std::pair<Permutation, double>> edge_support(const Model& m, std::size_t e) {
  std::vector<std::pair<Permutation, double>> out;
  const auto& edge = m.graph.edge(e);
  for (const auto& [type, w] : m.measures[e].support()) {
    const double each = w / static_cast<double>(type.class_size(edge.size()));
    for (auto& p : enumerate_class(type, edge, m.num_vertices())) out.emplace_back(std::move(p), each);
  }
  return out;
}

bool irreducible(const Model& m, std::size_t k, std::size_t cap) {
  const std::size_t n = m.num_vertices();
  if (k < 1 || k + 1 > n) throw InvalidInput("irreducibility needs 1 <= k <= |V|-1");
  const StateSpace space(StateKind::ip, n, k, cap);

  std::vector<std::vector<Permutation>> gens(m.num_edges());
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    for (auto& [p, w] : edge_support(m, e)) gens[e].push_back(std::move(p));

  // The support of each class measure is closed under inversion, so the
  // reachable set from any state is its orbit; one BFS decides it.
  std::vector<bool> seen(space.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  std::vector<Vertex> buf;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    const auto& st = space.state(s);
    for (std::size_t e = 0; e < gens.size(); ++e) {
      for (const auto& g : gens[e]) {
        buf.assign(st.begin(), st.end());
        for (auto& v : buf) v = g(v);
        const std::size_t t = space.index(buf);
        if (!seen[t]) {
          seen[t] = true;
          ++reached;
          queue.push_back(t);
        }
      }
    }
  }
  return reached == space.size();
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::irreducible_ok() const {
  for (const auto& row : irreducibility)
    if (!row.irreducible.value_or(false)) return false;
  return true;
}

bool ValidationReport::all_pass() const {
  return class_function && fixed_point_ok && regular && irreducible_ok();
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  if (!class_function) out.push_back("class-function");
  if (!fixed_point_ok) out.push_back("fixed-point probability");
  if (!regular) out.push_back("regularity");
  for (const auto& row : irreducibility) {
    if (!row.irreducible.has_value())
      out.push_back("irreducibility (k=" + std::to_string(row.k) + ", undecided at state cap)");
    else if (!*row.irreducible)
      out.push_back("irreducibility (k=" + std::to_string(row.k) + ")");
  }
  return out;
}

ValidationReport validate(const Model& m, std::span<const std::size_t> ks, std::size_t cap) {
  ValidationReport r;
  for (std::size_t e = 0; e < m.num_edges(); ++e)
    for (Vertex v : m.graph.edge(e))
      r.max_fixed_point_prob = std::max(r.max_fixed_point_prob, fixed_point_prob(m, e, v));
  r.fixed_point_ok = r.max_fixed_point_prob <= kFixedPointBound + 1e-12;

  r.degrees = m.graph.degrees();
  r.regular = std::adjacent_find(r.degrees.begin(), r.degrees.end(), std::not_equal_to<>()) ==
              r.degrees.end();

  std::vector<std::size_t> want(ks.begin(), ks.end());
  if (want.empty())
    for (std::size_t k = 1; k + 1 <= m.num_vertices(); ++k) want.push_back(k);
  for (std::size_t k : want) {
    IrreducibilityRow row;
    row.k = k;
    try {
      row.irreducible = irreducible(m, k, cap);
    } catch (const StateCapExceeded& e) {
      row.note = e.what();
    }
    r.irreducibility.push_back(std::move(row));
  }
  return r;
}

}  // namespace hyperex
