#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fci/errors.hpp"
#include "fci/io.hpp"

using namespace fci;

TEST_CASE("population CSV round-trips at full precision") {
  Population pop;
  pop.y.resize(4, 2);
  pop.y << 0.1, -2.5, 1.0 / 3.0, 4e-17, 12345.678901234567, -1, 0, 2;
  pop.x.resize(4, 1);
  pop.x << 0.5, -0.25, 1e-8, 3.75;

  std::ostringstream out;
  write_population_csv(out, pop);
  std::istringstream in(out.str());
  const Population back = read_population_csv(in);
  CHECK(back.y == pop.y);
  CHECK(back.x == pop.x);
}

TEST_CASE("population CSV header is strict") {
  std::istringstream missing("1,2\n3,4\n");
  CHECK_THROWS_AS(read_population_csv(missing), std::invalid_argument);

  std::istringstream wrong_order("x_1,y_1\n1,2\n");
  CHECK_THROWS_AS(read_population_csv(wrong_order), std::invalid_argument);

  std::istringstream stray("y_1,y_2,z_1\n1,2,3\n1,2,3\n1,2,3\n1,2,3\n");
  CHECK_THROWS_AS(read_population_csv(stray), std::invalid_argument);

  // an observed-data header is pointed at the estimate schema
  std::istringstream observed("unit,arm,y\n1,1,0.5\n");
  try {
    read_population_csv(observed);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("unit,arm,y") != std::string::npos);
  }
}

TEST_CASE("population CSV rejects ragged rows and non-numbers") {
  std::istringstream ragged("y_1,y_2\n1,2\n3\n");
  CHECK_THROWS_AS(read_population_csv(ragged), std::invalid_argument);
  std::istringstream alpha("y_1\n1\nbanana\n");
  CHECK_THROWS_AS(read_population_csv(alpha), std::invalid_argument);
}

TEST_CASE("population JSON carries explicit k and p") {
  std::istringstream in(R"({
    "k": 1, "p": 1,
    "y": [[1, 2], [3, 4], [5, 6], [7, 8]],
    "x": [[0.5], [0.25], [-0.5], [-0.25]]
  })");
  const Population pop = read_population_json(in);
  CHECK(pop.n() == 4);
  CHECK(pop.arms() == 2);
  CHECK(pop.y(1, 1) == 4.0);
  CHECK(pop.x(3, 0) == -0.25);

  std::istringstream bad(R"({"k": 1, "p": 0, "y": [[1], [2]]})");
  CHECK_THROWS_AS(read_population_json(bad), std::invalid_argument);
}

TEST_CASE("observed table schema and validation") {
  std::istringstream in(
      "unit,arm,y,x_1\n"
      "1,1,0.5,0.1\n"
      "2,1,0.7,0.2\n"
      "3,2,1.5,-0.1\n"
      "4,2,1.7,-0.2\n");
  const ObservedTable table = read_observed_csv(in, 2);
  CHECK(table.unit_ids == std::vector<long long>{1, 2, 3, 4});
  CHECK(table.data.arm(2) == 2);
  CHECK(table.data.y(3) == 1.7);
  CHECK(table.data.x(1, 0) == 0.2);

  std::istringstream bad_arm(
      "unit,arm,y\n1,1,0\n2,1,0\n3,5,0\n4,2,0\n");
  CHECK_THROWS_AS(read_observed_csv(bad_arm, 4), std::invalid_argument);

  std::istringstream dup(
      "unit,arm,y\n1,1,0\n1,1,0\n3,2,0\n4,2,0\n");
  CHECK_THROWS_AS(read_observed_csv(dup, 2), std::invalid_argument);

  std::istringstream thin_arm(
      "unit,arm,y\n1,1,0\n2,1,0\n3,1,0\n4,2,0\n");
  try {
    read_observed_csv(thin_arm, 2);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("arm 2") != std::string::npos);
  }

  // a potential-outcome header is rejected with a pointer to `theory`
  std::istringstream pop_header("y_1,y_2\n1,2\n");
  CHECK_THROWS_AS(read_observed_csv(pop_header, 2), std::invalid_argument);
}

TEST_CASE("the observed schema has no room for counterfactual columns") {
  std::istringstream poison(
      "unit,arm,y,y_2\n1,1,0,99\n2,1,0,99\n3,2,0,99\n4,2,0,99\n");
  CHECK_THROWS_AS(read_observed_csv(poison, 2), std::invalid_argument);
}

TEST_CASE("model matrix CSV round-trips") {
  const ModelMatrix m = build_model_matrix(3);
  std::istringstream in(model_matrix_csv(m));
  const ModelMatrix back = parse_model_matrix_csv(in);
  CHECK(back.k == 3);
  CHECK(back.h == m.h);
  CHECK(back.effect_labels == m.effect_labels);
}

TEST_CASE("model matrix JSON lists labels in construction order") {
  const auto doc = model_matrix_json(build_model_matrix(3));
  CHECK(doc["labels"] ==
        nlohmann::ordered_json({"A", "B", "C", "AB", "AC", "BC", "ABC"}));
  CHECK(doc["columns"].size() == 8);
}

TEST_CASE("study config parsing, defaults, and diagnostics") {
  const auto doc = nlohmann::json::parse(R"({
    "population": {"synthetic": {"n": 64, "k": 1, "p": 1, "seed": 3,
                                  "coef": [[1.0], [0.5]], "noise_sd": 0.5}},
    "counts": [32, 32],
    "replicates": 500,
    "seed": 42
  })");
  const StudyConfig cfg = parse_study_config(doc);
  CHECK(cfg.replicates == 500);
  CHECK(cfg.master_seed == 42);
  CHECK(cfg.ks_alpha == 1e-3);
  CHECK(cfg.counts(0) == 32);
  const auto& recipe = std::get<SyntheticRecipe>(cfg.population);
  CHECK(recipe.coef(0, 1) == 0.5);
  CHECK(recipe.noise_sd(0) == 0.5);

  const auto bad = nlohmann::json::parse(R"({"population": {}, "counts": [2,2],
                                            "replicates": 500})");
  CHECK_THROWS_AS(parse_study_config(bad), std::invalid_argument);

  const auto bad_coef = nlohmann::json::parse(R"({
    "population": {"synthetic": {"n": 8, "k": 1, "p": 2, "coef": [[1.0]]}},
    "counts": [4, 4], "replicates": 500})");
  CHECK_THROWS_AS(parse_study_config(bad_coef), std::invalid_argument);
}

TEST_CASE("missing files raise io errors") {
  CHECK_THROWS_AS(read_population_file("/nonexistent/pop.csv"), io_error);
  CHECK_THROWS_AS(read_text_file("/nonexistent/x.json"), io_error);
}
