#include "doctest.h"
#include "support.hpp"

#include "hyperex/errors.hpp"
#include "hyperex/io.hpp"

using namespace hyperex;

namespace {

ParseError parse_error_of(std::string_view text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError("unreachable");
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("parse a model file") {
  const NamedModel nm = parse_model(R"({
    "name": "square",
    "vertices": [1, 2, 3, 4],
    "edges": [[1, 2, 3, 4]],
    "measures": [{"edge": 0, "weights": {"2+2": 0.9, "4": 0.1}}]
  })");
  CHECK(nm.name == "square");
  CHECK(nm.model.num_vertices() == 4);
  CHECK(nm.model.measures[0].weight(CycleType::parse("4")) == doctest::Approx(0.1));
  CHECK(nm.model.graph.label(0) == 1);
}

TEST_CASE("identity type and round trip") {
  const NamedModel nm = parse_model(R"({"vertices": [0, 5, 7], "edges": [[0, 5, 7], [0, 7]],
    "measures": [{"edge": 1, "weights": {"2": 1}}, {"edge": 0, "weights": {"id": 0.1, "3": 0.9}}]})");
  CHECK(nm.model.measures[0].weight(CycleType{}) == doctest::Approx(0.1));
  CHECK(nm.model.measures[1].edge_size() == 2);
  const auto j = model_to_json(nm.model, "x");
  const NamedModel back = parse_model(j.dump());
  CHECK(back.name == "x");
  CHECK(back.model.graph.labels() == nm.model.graph.labels());
  CHECK(back.model.graph.edges() == nm.model.graph.edges());
  for (std::size_t e = 0; e < 2; ++e) CHECK(back.model.measures[e].weights() == nm.model.measures[e].weights());
}

TEST_CASE("malformed JSON reports a byte position") {
  const ParseError e = parse_error_of(R"({"vertices": [1, 2,, 3]})");
  CHECK(e.position() != ParseError::npos);
  CHECK(e.position() <= 20);
}

TEST_CASE("structural errors carry a JSON pointer") {
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]], "measures": [], "extra": 1})").path() == "/extra");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]], "measures": []})").path() == "/measures");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, "b"]], "measures": []})").path() == "/edges/0/1");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]],
      "measures": [{"edge": 0, "weights": {"2": 0.5}}]})").path() == "/measures/0/weights");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]],
      "measures": [{"edge": 0, "weights": {"2": 1.0 }}, {"edge": 0, "weights": {"2": 1.0}}]})").path() == "/measures/1/edge");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]],
      "measures": [{"edge": 3, "weights": {"2": 1.0}}]})").path() == "/measures/0/edge");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 2]],
      "measures": [{"edge": 0, "weights": {"2*2": 1.0}}]})").path() == "/measures/0/weights/2*2");
  CHECK(parse_error_of(R"({"vertices": [1, 2], "edges": [[1, 3]], "measures": []})").path() == "/edges");
  CHECK(parse_error_of(R"([1, 2])").path() == "");
}

TEST_CASE("weights must sum to one within 1e-12") {
  CHECK_NOTHROW(parse_model(R"({"vertices": [1, 2, 3, 4], "edges": [[1, 2, 3, 4]],
      "measures": [{"edge": 0, "weights": {"2+2": 0.7, "4": 0.3000000000001}}]})"));
  CHECK_THROWS_AS(parse_model(R"({"vertices": [1, 2, 3, 4], "edges": [[1, 2, 3, 4]],
      "measures": [{"edge": 0, "weights": {"2+2": 0.7, "4": 0.30001}}]})"), ParseError);
}

TEST_CASE("missing files") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), ParseError);
  CHECK_NOTHROW(load_model(testing_support::model_path("square_d03.json")));
}

}  // TEST_SUITE
