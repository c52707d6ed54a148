#include "hyperex/io.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "hyperex/errors.hpp"

namespace hyperex {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ParseError(what + " at " + (path.empty() ? "/" : path), ParseError::npos, path);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

long long as_label(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "vertex labels must be integers");
  return v.get<long long>();
}

}  // namespace

NamedModel parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) fail("", "model must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "vertices" && key != "edges" && key != "measures" && key != "name")
      fail("/" + key, "unknown field '" + key + "'");

  NamedModel out;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) fail("/name", "name must be a string");
    out.name = it->get<std::string>();
  }

  const json& vs = field(doc, "vertices", "");
  if (!vs.is_array() || vs.empty()) fail("/vertices", "vertices must be a nonempty array");
  std::vector<long long> labels;
  for (std::size_t i = 0; i < vs.size(); ++i)
    labels.push_back(as_label(vs[i], "/vertices/" + std::to_string(i)));

  const json& es = field(doc, "edges", "");
  if (!es.is_array() || es.empty()) fail("/edges", "edges must be a nonempty array");
  std::vector<std::vector<long long>> edges;
  for (std::size_t e = 0; e < es.size(); ++e) {
    const std::string p = "/edges/" + std::to_string(e);
    if (!es[e].is_array()) fail(p, "an edge must be an array of labels");
    std::vector<long long> edge;
    for (std::size_t j = 0; j < es[e].size(); ++j)
      edge.push_back(as_label(es[e][j], p + "/" + std::to_string(j)));
    edges.push_back(std::move(edge));
  }

  Hypergraph g;
  try {
    g = Hypergraph(labels, edges);
  } catch (const InvalidInput& e) {
    fail("/edges", e.what());
  }

  const json& ms = field(doc, "measures", "");
  if (!ms.is_array()) fail("/measures", "measures must be an array");
  std::vector<std::optional<EdgeMeasure>> measures(g.num_edges());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string p = "/measures/" + std::to_string(i);
    const json& mj = ms[i];
    if (!mj.is_object()) fail(p, "a measure must be an object");
    for (const auto& [key, value] : mj.items())
      if (key != "edge" && key != "weights") fail(p + "/" + key, "unknown field '" + key + "'");
    const json& ej = field(mj, "edge", p);
    if (!ej.is_number_unsigned() || ej.get<std::size_t>() >= g.num_edges())
      fail(p + "/edge", "edge must be an index into edges");
    const auto e = ej.get<std::size_t>();
    if (measures[e]) fail(p + "/edge", "edge " + std::to_string(e) + " has two measures");
    const json& wj = field(mj, "weights", p);
    if (!wj.is_object() || wj.empty()) fail(p + "/weights", "weights must be a nonempty object");
    std::vector<std::pair<CycleType, double>> weights;
    for (const auto& [key, value] : wj.items()) {
      const std::string wp = p + "/weights/" + key;
      if (!value.is_number()) fail(wp, "weight must be a number");
      try {
        weights.emplace_back(CycleType::parse(key), value.get<double>());
      } catch (const ParseError& err) {
        fail(wp, err.what());
      }
    }
    try {
      measures[e] = EdgeMeasure(g.edge(e).size(), std::move(weights));
    } catch (const InvalidInput& err) {
      fail(p + "/weights", err.what());
    }
  }
  std::vector<EdgeMeasure> ordered;
  for (std::size_t e = 0; e < measures.size(); ++e) {
    if (!measures[e]) fail("/measures", "edge " + std::to_string(e) + " has no measure");
    ordered.push_back(std::move(*measures[e]));
  }
  out.model = Model(std::move(g), std::move(ordered));
  return out;
}

NamedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

json model_to_json(const Model& m, const std::string& name) {
  json j;
  if (!name.empty()) j["name"] = name;
  j["vertices"] = m.graph.labels();
  json edges = json::array();
  for (const auto& e : m.graph.edges()) {
    json edge = json::array();
    for (Vertex v : e) edge.push_back(m.graph.label(v));
    edges.push_back(std::move(edge));
  }
  j["edges"] = std::move(edges);
  json measures = json::array();
  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    json w = json::object();
    for (const auto& [type, p] : m.measures[e].weights()) w[type.to_string()] = p;
    measures.push_back({{"edge", e}, {"weights", std::move(w)}});
  }
  j["measures"] = std::move(measures);
  return j;
}

}  // namespace hyperex
