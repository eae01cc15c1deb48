#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "wavetree/coefficients.hpp"
#include "wavetree/csv.hpp"

using namespace wavetree;

TEST_CASE("field layout: one scaling slot, 2^j detail slots") {
  CoefficientField f(3);
  CHECK(f.max_level() == 3);
  CHECK(f.level_values(-1).size() == 1);
  CHECK(f.level_values(0).size() == 1);
  CHECK(f.level_values(1).size() == 2);
  CHECK(f.level_values(2).size() == 4);
  CHECK(CoefficientField::slots(-1) == 1);
  CHECK(CoefficientField::slots(10) == 1024);
  CHECK_THROWS_AS(CoefficientField(-1), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientField::slots(-2), std::invalid_argument);
}

TEST_CASE("zero field has zero norm at any depth") {
  for (int L : {0, 1, 5}) {
    CHECK(squared_norm(zero_field(L)) == 0.0);
  }
}

TEST_CASE("set/at round-trips values exactly") {
  CoefficientField f(4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> stored;
  for (int j = -1; j < 4; ++j) {
    for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
      double v = u(rng);
      f.set(j, k, v);
      stored.push_back(v);
    }
  }
  std::size_t i = 0;
  for (int j = -1; j < 4; ++j) {
    for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
      CHECK(f.at(j, k) == stored[i++]);
    }
  }
  CHECK_THROWS_AS(f.at(4, 0), std::out_of_range);
  CHECK_THROWS_AS(f.at(1, 2), std::out_of_range);
  CHECK_THROWS_AS(f.at(-2, 0), std::out_of_range);
}

TEST_CASE("tail energy worked values") {
  CoefficientField f(3);
  f.set(1, 0, 3.0);
  f.set(2, 1, 4.0);
  CHECK(tail_energy(f, 1) == 25.0);
  CHECK(tail_energy(f, 2) == 16.0);
  CHECK(tail_energy(f, 3) == 0.0);
  CHECK(tail_energy(f, 7) == 0.0);
  CHECK(tail_energy(f, -1) == squared_norm(f));
  CHECK_THROWS_AS(tail_energy(f, -2), std::invalid_argument);

  CoefficientField g(1);
  g.set(0, 0, 1.0);
  CHECK(tail_energy(g, 0) == 1.0);
  CHECK(tail_energy(g, 1) == 0.0);
}

TEST_CASE("tail energy is non-increasing in the start level") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  CoefficientField f(6);
  for (int j = -1; j < 6; ++j) {
    for (auto& v : f.level_values(j)) v = u(rng);
  }
  double prev = tail_energy(f, -1);
  for (int J = 0; J <= 6; ++J) {
    double cur = tail_energy(f, J);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("squared distance worked values and properties") {
  CoefficientField a(2), b(2);
  CHECK(squared_distance(a, b) == 0.0);
  a.set(0, 0, 1.0);
  a.set(1, 1, 2.0);
  CHECK(squared_distance(a, b) == 5.0);
  CHECK(squared_distance(b, a) == 5.0);
  CHECK(squared_distance(a, a) == 0.0);

  CoefficientField c(3);
  CHECK_THROWS_AS(squared_distance(a, c), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CoefficientField x(4), y(4);
  for (int j = -1; j < 4; ++j) {
    for (auto& v : x.level_values(j)) v = u(rng);
    for (auto& v : y.level_values(j)) v = u(rng);
  }
  CHECK(squared_distance(x, y) == squared_norm(x - y));
}

TEST_CASE("padded and truncated copies") {
  CoefficientField f(2);
  f.set(-1, 0, 0.5);
  f.set(1, 1, 2.5);
  CoefficientField p = f.padded(4);
  CHECK(p.max_level() == 4);
  CHECK(p.at(1, 1) == 2.5);
  CHECK(p.at(3, 5) == 0.0);
  CHECK(p.truncated(2) == f);
  CHECK_THROWS_AS(f.padded(1), std::invalid_argument);
  CHECK_THROWS_AS(f.truncated(3), std::invalid_argument);
  CHECK(squared_norm(p) == squared_norm(f));
}

TEST_CASE("scaling a field scales energies quadratically") {
  CoefficientField f(3);
  f.set(0, 0, 1.5);
  f.set(2, 3, -0.25);
  CoefficientField g = f.scaled(2.0);
  CHECK(g.at(0, 0) == 3.0);
  CHECK(g.at(2, 3) == -0.5);
  CHECK(squared_norm(g) == 4.0 * squared_norm(f));
}

TEST_CASE("format_double is shortest and parses back exactly") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(-2.0) == "-2");
  for (double v : {1.0 / 3.0, 1e-300, 6.02e23, -0.49999999999999994}) {
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("field csv round-trip is bitwise exact") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  CoefficientField f(5);
  for (int j = -1; j < 5; ++j) {
    for (auto& v : f.level_values(j)) v = u(rng);
  }
  const std::string csv = field_to_csv(f);
  CHECK(csv.substr(0, 21) == "level,position,value\n");
  CHECK(field_from_csv(csv) == f);

  auto path = std::filesystem::temp_directory_path() / "wavetree_field.csv";
  write_field_csv(path, f);
  CHECK(read_field_csv(path) == f);
  std::filesystem::remove(path);
}

TEST_CASE("field csv rows are ordered level-major with ascending positions") {
  CoefficientField f(2);
  f.set(1, 0, 7.0);
  const std::string csv = field_to_csv(f);
  CHECK(csv ==
        "level,position,value\n"
        "-1,0,0\n"
        "0,0,0\n"
        "1,0,7\n"
        "1,1,0\n");
}

TEST_CASE("field csv rejects malformed input") {
  CHECK_THROWS(field_from_csv("level,position,value\n0,0\n"));
  CHECK_THROWS(field_from_csv("level,position,value\n0,1,0.5\n"));   // k >= 2^j
  CHECK_THROWS(field_from_csv("level,position,value\n-2,0,0.5\n"));
  CHECK_THROWS(field_from_csv("level,position,value\n0,0,abc\n"));
}

TEST_CASE("series csv formatting") {
  CHECK(series_to_csv("lambda", "value", {0.5, 0.25}, {1.0, 2.0}) ==
        "lambda,value\n0.5,1\n0.25,2\n");
  CHECK_THROWS_AS(series_to_csv("a", "b", {1.0}, {}), std::invalid_argument);
}
