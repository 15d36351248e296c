#include <doctest.h>

#include "wgt/config.hpp"
#include "wgt/errors.hpp"

using namespace wgt;
using nlohmann::json;

TEST_CASE("defaults describe the estimation scenario") {
  const auto c = parse_config(json{{"schema", 1}});
  CHECK(c.graph_preset == "ring6_chords");
  CHECK(c.mode == Mode::wgt);
  CHECK(c.alpha == std::vector<double>{0.1});
  CHECK(c.lambda_e == 0.8);
  CHECK(c.lambda_m == 10.0);
  CHECK(c.regularization == 0.01);
  const auto sc = build_scenario(c);
  CHECK(sc.graph().size() == 6);
  CHECK(sc.objective.dim() == 2);
}

TEST_CASE("round trip through the resolved form") {
  const json doc = {
      {"schema", 1},
      {"graph", {{"n", 3}, {"edges", {{1, 2}, {2, 3}, {3, 1}, {1, 3}}}}},
      {"weights", {{"scheme", "dithered"}, {"jitter", 0.25}, {"seed", 5}}},
      {"algorithm", {{"mode", "WGT"}, {"alpha", {0.1, 0.2, 0.05}}, {"lambda", {{"e", 0.7}, {"m", 3}}},
                     {"iterations", 12}}},
      {"attack", {{"target", 2}}},
      {"sweep", {{"alpha", {0.1, 0.2}}, {"seeds", {1, 2, 3}}}},
  };
  const auto c = parse_config(doc);
  CHECK(c.graph_preset.empty());
  CHECK(c.edges.size() == 4);
  CHECK(c.edges[0] == Edge{0, 1});
  CHECK(c.attack.target == 1);
  const auto again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));
  CHECK(build_scenario(c).steps.max() == 0.2);
}

TEST_CASE("invalid configs") {
  auto bad = [](json doc) { CHECK_THROWS_AS(parse_config(doc), ConfigError); };
  bad(json::object());                                          // no schema
  bad({{"schema", 2}});                                         // unsupported schema
  bad({{"schema", 1}, {"colour", "red"}});                      // unknown section
  bad({{"schema", 1}, {"algorithm", {{"alpah", 0.1}}}});        // unknown key
  bad({{"schema", 1}, {"algorithm", {{"alpha", -0.1}}}});
  bad({{"schema", 1}, {"algorithm", {{"alpha", "big"}}}});
  bad({{"schema", 1}, {"algorithm", {{"lambda", {{"e", 0.0}}}}}});
  bad({{"schema", 1}, {"algorithm", {{"lambda", {{"m", -1.0}}}}}});
  bad({{"schema", 1}, {"algorithm", {{"iterations", 0}}}});
  bad({{"schema", 1}, {"algorithm", {{"mode", "ADMM"}}}});
  bad({{"schema", 1}, {"graph", {{"n", 3}, {"edges", {{1, 4}}}}}});
  bad({{"schema", 1}, {"graph", {{"n", 3}, {"edges", {{0, 1}}}}}});
  bad({{"schema", 1}, {"graph", {{"preset", "cycle3"}, {"n", 3}}}});
  bad({{"schema", 1}, {"attack", {{"target", 0}}}});

  auto bad_scenario = [](json doc) { CHECK_THROWS_AS(build_scenario(parse_config(doc)), ConfigError); };
  bad_scenario({{"schema", 1}, {"graph", {{"n", 3}, {"edges", {{1, 2}, {2, 3}}}}}});  // not strongly connected
  bad_scenario({{"schema", 1}, {"algorithm", {{"alpha", {0.1, 0.2}}}}});               // wrong list length
  bad_scenario({{"schema", 1}, {"algorithm", {{"mode", "AB"}, {"alpha", {0.1, 0.1, 0.1, 0.1, 0.1, 0.2}}}}});
  bad_scenario({{"schema", 1}, {"attack", {{"target", 7}}}});
  bad_scenario({{"schema", 1}, {"graph", {{"preset", "pentagon"}}}});
}
