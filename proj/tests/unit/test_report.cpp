#include <gtest/gtest.h>

#include <random>

#include "bklab/report.hpp"

using namespace bklab;

TEST(Report, CanonicalJsonSortsKeysAndPrints17Digits) {
  const Json j = {{"b", 0.1}, {"a", 1}, {"c", Json::array({1.0 / 3.0})}};
  EXPECT_EQ(canonical_json(j),
            "{\n  \"a\": 1,\n  \"b\": 0.10000000000000001,\n  \"c\": [\n    "
            "0.33333333333333331\n  ]\n}\n");
  EXPECT_EQ(canonical_json(Json{{"x", std::nan("")}}), "{\n  \"x\": null\n}\n");
}

TEST(Report, StepFunctionRoundTrip) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto phi = random_step_function(rng, 3, 3);
    const auto text = canonical_json(to_json(phi));
    const auto back = step_function_from_json(Json::parse(text), 3);
    EXPECT_EQ(back.normalized(), phi.normalized());
    EXPECT_EQ(canonical_json(to_json(back)), text);
  }
}

TEST(Report, RationalRoundTrip) {
  std::mt19937_64 rng(6);
  const auto phi = random_rational_function(rng, 2, 4);
  const auto back = rational_step_function_from_json(to_json(phi), 2);
  EXPECT_EQ(back.normalized(), phi.normalized());
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(format_rational(Rational(3, 2)), "3/2");
  EXPECT_THROW(parse_rational("1/0"), DomainError);
  EXPECT_THROW(parse_rational("x"), DomainError);
}

TEST(Report, ObjectFormAndMalformedInput) {
  const auto j = Json::parse(R"({"m": 3, "pieces": [
      {"start": {"num": 0, "den_pow": 0}, "end": {"num": 1, "den_pow": 1}, "value": 2},
      {"start": {"num": 1, "den_pow": 1}, "end": {"num": 1, "den_pow": 0}, "value": "1/2"}]})");
  const auto phi = step_function_from_json(j);
  EXPECT_EQ(phi.branching(), 3);
  EXPECT_DOUBLE_EQ(phi.integral(), 2.0 / 3.0 + 1.0 / 3.0);
  EXPECT_THROW(step_function_from_json(Json::array()), DomainError);
  EXPECT_THROW(step_function_from_json(Json::parse(R"([{"start": 1}])")), DomainError);
  const auto gap = Json::parse(R"([
      {"start": {"num": 0, "den_pow": 0}, "end": {"num": 1, "den_pow": 2}, "value": 1},
      {"start": {"num": 1, "den_pow": 1}, "end": {"num": 1, "den_pow": 0}, "value": 1}])");
  EXPECT_THROW(step_function_from_json(gap), DomainError);
}

TEST(Report, SearchReportIsByteStable) {
  const auto p = BellmanParams::make(0.5, 1.0, 0.8, 1.2);
  SearchOptions o;
  o.restarts = 2;
  const auto a = canonical_json(to_json(local_search(p, TreeSpec::make(2, 3), 5, 500, o)));
  const auto b = canonical_json(to_json(local_search(p, TreeSpec::make(2, 3), 5, 500, o)));
  EXPECT_EQ(a, b);
  const auto j = Json::parse(a);
  for (const char* key : {"objective", "bound", "gap", "gap_ratio", "residual", "excess", "N"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

TEST(Report, CsvHeaders) {
  StudyResult s;
  s.rows.push_back({4, 1.0, 2.0, 1.0, 0.5, 0.5, 1.75});
  EXPECT_EQ(study_csv(s), "N,objective,bound,gap,residual,k,B_over_k\n4,1,2,1,0.5,0.5,1.75\n");
  EXPECT_EQ(gap_rows_csv({}), "inequality,phi_id,family_id,beta,lhs,rhs,slack\n");
}

TEST(Report, IoErrors) {
  EXPECT_THROW(read_text("/nonexistent/dir/file.json"), IoError);
  EXPECT_THROW(write_text("/nonexistent/dir/file.json", "x"), IoError);
}
