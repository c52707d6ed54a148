#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hyperex/hypermodel.hpp"
#include "hyperex/io.hpp"

namespace testing_support {

using Weights = std::vector<std::pair<std::string, double>>;

// Vertices 0..n-1; one weight table per edge.
inline hyperex::Model make_model(std::size_t n, const std::vector<std::vector<long long>>& edges,
                                 const std::vector<Weights>& weights) {
  std::vector<long long> labels;
  for (std::size_t v = 0; v < n; ++v) labels.push_back(static_cast<long long>(v));
  hyperex::Hypergraph g(labels, edges);
  std::vector<hyperex::EdgeMeasure> ms;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::vector<std::pair<hyperex::CycleType, double>> w;
    for (const auto& [t, p] : weights[e]) w.emplace_back(hyperex::CycleType::parse(t), p);
    ms.emplace_back(edges[e].size(), w);
  }
  return hyperex::Model(g, ms);
}

inline hyperex::Model same_measure(std::size_t n, const std::vector<std::vector<long long>>& edges,
                                   const Weights& w) {
  return make_model(n, edges, std::vector<Weights>(edges.size(), w));
}

inline std::string model_path(const std::string& file) {
  return std::string(HYPEREX_MODELS_DIR) + "/" + file;
}

inline hyperex::Model corpus_model(const std::string& file) {
  return hyperex::load_model(model_path(file)).model;
}

// The ten valid models used for corpus-wide checks.
inline const std::vector<std::string>& corpus_files() {
  static const std::vector<std::string> files{
      "square_d03.json",    "triangle_d05.json", "cycle4_pairs.json", "cycle5_pairs.json",
      "k4_pairs.json",      "pentagon_mixed.json", "prism6.json",     "ring6_quads.json",
      "single5.json",       "tetra_triples.json"};
  return files;
}

}  // namespace testing_support
