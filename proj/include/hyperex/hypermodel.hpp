#pragma once

// Hypergraphs with per-edge conjugacy-class measures, and the checks a model
// must pass before its exclusion process is analysed: no edge fixes a vertex
// with probability above 1/5, the hypergraph is regular, and the interchange
// process is irreducible for every particle count.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hyperex/permgroup.hpp"

namespace hyperex {

inline constexpr std::size_t kDefaultStateCap = 200'000;
inline constexpr double kFixedPointBound = 0.2;

/// Vertices are stored as indices 0..n-1 in increasing label order, so label
/// order and index order agree; the original labels are kept for I/O.
class Hypergraph {
 public:
  Hypergraph() = default;
  /// Throws InvalidInput if labels repeat, an edge has fewer than two
  /// vertices, repeats a vertex, or names an unknown label.
  Hypergraph(std::vector<long long> labels,
             const std::vector<std::vector<long long>>& edges_by_label);

  std::size_t num_vertices() const noexcept { return labels_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  /// Edge vertex indices, ascending.
  const std::vector<Vertex>& edge(std::size_t e) const { return edges_.at(e); }
  const std::vector<std::vector<Vertex>>& edges() const noexcept { return edges_; }

  long long label(Vertex v) const { return labels_.at(v); }
  const std::vector<long long>& labels() const noexcept { return labels_; }
  /// Throws InvalidInput for an unknown label.
  Vertex index_of(long long label) const;

  std::vector<std::size_t> degrees() const;
  bool contains(std::size_t e, Vertex v) const;

 private:
  std::vector<long long> labels_;
  std::vector<std::vector<Vertex>> edges_;
};

/// A class function on the permutations of one edge, stored as a weight per
/// cycle type. Each permutation of type t has probability weight(t)/|class|.
class EdgeMeasure {
 public:
  EdgeMeasure() = default;
  /// Throws InvalidInput on weights outside [0,1], duplicate types, types
  /// that do not fit the edge, or a total weight differing from 1 by more
  /// than 1e-12.
  EdgeMeasure(std::size_t edge_size, std::vector<std::pair<CycleType, double>> weights);

  std::size_t edge_size() const noexcept { return edge_size_; }
  const std::vector<std::pair<CycleType, double>>& weights() const noexcept { return weights_; }
  double weight(const CycleType& t) const;

  /// Types with positive weight.
  std::vector<std::pair<CycleType, double>> support() const;

  /// Samples a type index into weights() proportionally to weight.
  std::size_t sample_type(Rng& rng) const;

 private:
  std::size_t edge_size_ = 0;
  std::vector<std::pair<CycleType, double>> weights_;
  std::vector<double> cumulative_;
};

/// The pair (measures, hypergraph); measures[e] belongs to edge e.
struct Model {
  Hypergraph graph;
  std::vector<EdgeMeasure> measures;

  /// Throws InvalidInput unless there is exactly one measure per edge with a
  /// matching edge size.
  Model(Hypergraph g, std::vector<EdgeMeasure> m);
  Model() = default;

  std::size_t num_vertices() const noexcept { return graph.num_vertices(); }
  std::size_t num_edges() const noexcept { return graph.num_edges(); }
};

/// Probability that a given vertex of the edge is a fixed point:
/// sum_t weight(t) * fixed(t) / |e|. The same for every v in e, since the
/// class sample is exchangeable. Throws InvalidInput if v is not in edge e.
double fixed_point_prob(const Model& m, std::size_t e, Vertex v);

/// Breadth-first reachability over IP(k) states using every permutation of
/// every positive-weight type. Throws StateCapExceeded when |(V)_k| > cap and
/// InvalidInput unless 1 <= k <= |V|-1.
bool irreducible(const Model& m, std::size_t k, std::size_t cap = kDefaultStateCap);

struct IrreducibilityRow {
  std::size_t k = 0;
  std::optional<bool> irreducible;  // empty when undecided at the cap
  std::string note;
};

struct ValidationReport {
  bool class_function = true;  // holds by construction
  double max_fixed_point_prob = 0.0;
  bool fixed_point_ok = true;
  std::vector<std::size_t> degrees;
  bool regular = true;
  std::vector<IrreducibilityRow> irreducibility;

  bool irreducible_ok() const;
  bool all_pass() const;
  /// Names of failed checks; undecided irreducibility counts as failed.
  std::vector<std::string> failures() const;
};

/// Runs every check. `ks` empty means all k in 1..|V|-1.
ValidationReport validate(const Model& m, std::span<const std::size_t> ks = {},
                          std::size_t cap = kDefaultStateCap);

/// Every permutation of edge e with positive probability, with its
/// probability. Cached per (edge size, measure) by the caller if needed.
std::vector<std::pair<Permutation, double>> edge_support(const Model& m, std::size_t e);

}  // namespace hyperex
