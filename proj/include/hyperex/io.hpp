#pragma once

// Model files:
//   { "vertices": [1, 2, 3, 4],
//     "edges": [[1, 2, 3, 4]],
//     "measures": [ {"edge": 0, "weights": {"2+2": 0.9, "4": 0.1}} ] }
// Cycle types are "+"-joined cycle lengths; "id" is the identity. An
// optional "name" string is kept. Anything else is rejected.

#include <string>
#include <string_view>

#include "json.hpp"

#include "hyperex/hypermodel.hpp"

namespace hyperex {

struct NamedModel {
  std::string name;
  Model model;
};

/// Throws ParseError carrying a byte offset for malformed JSON and a JSON
/// pointer for structural or semantic problems.
NamedModel parse_model(std::string_view text);
NamedModel load_model(const std::string& path);

nlohmann::json model_to_json(const Model& m, const std::string& name = {});

}  // namespace hyperex
