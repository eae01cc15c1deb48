#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <utility>

#include "wavetree/dyadic.hpp"

using namespace wavetree;

namespace {

std::vector<DyadicNode> collect(const TreeScope& sc) {
  std::vector<DyadicNode> out;
  for (DyadicNode n : sc) out.push_back(n);
  return out;
}

CoefficientField random_field(int depth, std::uint64_t seed,
                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  CoefficientField f(depth);
  for (int j = -1; j < depth; ++j) {
    for (auto& v : f.level_values(j)) v = u(rng);
  }
  return f;
}

}  // namespace

TEST_CASE("node arithmetic") {
  DyadicNode n{2, 3};
  CHECK(n.parent() == DyadicNode{1, 1});
  CHECK(n.left_child() == DyadicNode{3, 6});
  CHECK(n.right_child() == DyadicNode{3, 7});
  CHECK(n.left_child().parent() == n);
  CHECK(n.right_child().parent() == n);
  CHECK_THROWS_AS(DyadicNode({0, 0}).parent(), std::logic_error);
}

TEST_CASE("scope of the root at lambda one half") {
  auto members = collect(scope({0, 0}, 0.5, 1.0));
  REQUIRE(members.size() == 3);
  CHECK(members[0] == DyadicNode{0, 0});
  CHECK(members[1] == DyadicNode{1, 0});
  CHECK(members[2] == DyadicNode{1, 1});
}

TEST_CASE("scope of a node just above the cutoff is itself") {
  auto members = collect(scope({1, 1}, 0.5, 1.0));
  REQUIRE(members.size() == 1);
  CHECK(members[0] == DyadicNode{1, 1});
}

TEST_CASE("scope rejects roots at or beyond the cutoff") {
  CHECK_THROWS_AS(scope({2, 0}, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scope({5, 3}, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scope({-1, 0}, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(scope({1, 2}, 0.5, 1.0), std::invalid_argument);  // k >= 2^j
}

TEST_CASE("scope level populations double and positions are contiguous") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = std::uniform_real_distribution<double>(0.02, 0.9)(rng);
    const double eta = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
    const int cutoff = max_scale(lambda, eta);
    const int j = std::uniform_int_distribution<int>(0, cutoff - 1)(rng);
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(
        0, CoefficientField::slots(j) - 1)(rng);
    TreeScope sc = scope({j, k}, lambda, eta);
    CHECK(sc.cutoff_level() == cutoff);
    std::int64_t total = 0;
    for (int jp = j; jp < cutoff; ++jp) {
      const auto count = sc.count_at(jp);
      CHECK(count == (std::int64_t{1} << (jp - j)));
      CHECK(sc.first_position(jp) == k << (jp - j));
      CHECK(sc.last_position(jp) - sc.first_position(jp) + 1 == count);
      total += count;
    }
    CHECK(static_cast<std::int64_t>(collect(sc).size()) == total);
  }
}

TEST_CASE("ancestors climb to the root, node first") {
  auto chain = ancestors({2, 3});
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == DyadicNode{2, 3});
  CHECK(chain[1] == DyadicNode{1, 1});
  CHECK(chain[2] == DyadicNode{0, 0});

  auto top = ancestors({0, 0});
  REQUIRE(top.size() == 1);
  CHECK(top[0] == DyadicNode{0, 0});
}

TEST_CASE("ancestor and scope membership are dual") {
  std::mt19937_64 rng(1234);
  const double lambda = 0.08, eta = 1.0;
  const int cutoff = max_scale(lambda, eta);
  REQUIRE(cutoff >= 4);
  auto in_scope = [&](DyadicNode root, DyadicNode n) {
    for (DyadicNode m : scope(root, lambda, eta)) {
      if (m == n) return true;
    }
    return false;
  };
  for (int trial = 0; trial < 30; ++trial) {
    const int j = std::uniform_int_distribution<int>(0, cutoff - 1)(rng);
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(
        0, CoefficientField::slots(j) - 1)(rng);
    const DyadicNode n{j, k};
    for (DyadicNode a : ancestors(n)) {
      CHECK(in_scope(a, n));
    }
    // nodes not on the ancestor chain never contain n
    std::set<std::pair<int, std::int64_t>> chain;
    for (DyadicNode a : ancestors(n)) chain.insert({a.level, a.position});
    for (int jp = 0; jp <= j; ++jp) {
      for (std::int64_t kp = 0; kp < CoefficientField::slots(jp); ++kp) {
        if (!chain.count({jp, kp})) {
          CHECK(!in_scope({jp, kp}, n));
        }
      }
    }
  }
}

TEST_CASE("tree max worked example") {
  CoefficientField f(2);
  f.set(0, 0, 0.1);
  f.set(1, 0, -0.8);
  f.set(1, 1, 0.2);
  CHECK(tree_max(f, {0, 0}, 0.5, 1.0) == 0.8);
  CHECK(tree_max(f, {1, 0}, 0.5, 1.0) == 0.8);
  CHECK(tree_max(f, {1, 1}, 0.5, 1.0) == 0.2);
}

TEST_CASE("tree max of a zero field is zero") {
  CHECK(tree_max(zero_field(4), {0, 0}, 0.3, 1.0) == 0.0);
}

TEST_CASE("tree max equals the root's magnitude for a lone coefficient") {
  CoefficientField f(3);
  f.set(1, 1, -0.45);
  CHECK(tree_max(f, {1, 1}, 0.4, 1.0) == 0.45);
  CHECK(tree_max(f, {0, 0}, 0.4, 1.0) == 0.45);
  CHECK(tree_max(f, {1, 0}, 0.4, 1.0) == 0.0);
}

TEST_CASE("tree max needs all scope levels present") {
  CoefficientField f(2);
  CHECK_THROWS_AS(tree_max(f, {0, 0}, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("tree max grows as lambda shrinks") {
  CoefficientField f = random_field(11, 5);  // deep enough for lam = 0.03
  double prev = 0.0;
  for (double lam : {0.6, 0.3, 0.15, 0.07, 0.03}) {
    double cur = tree_max(f, {0, 0}, lam, 1.0);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("tree max early exit honors its contract") {
  CoefficientField f(3);
  f.set(2, 2, 5.0);
  f.set(0, 0, 1.0);
  const double full = tree_max(f, {0, 0}, 0.4, 1.0);  // scope cutoff 3
  CHECK(full == 5.0);
  const double bailed = tree_max(f, {0, 0}, 0.4, 1.0, 0.5);
  CHECK(bailed > 0.5);  // may stop scanning once past the bound
  CHECK(tree_max(f, {0, 0}, 0.4, 1.0, 100.0) == 5.0);
}

TEST_CASE("subtree maxima match per-node scope scans") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CoefficientField f = random_field(6, 900 + seed);
    const double lambda = 0.07;  // max_scale = 8 > stored depth
    const int cutoff = 6;
    CoefficientField m = subtree_abs_max(f, cutoff);
    for (int j = 0; j < cutoff; ++j) {
      for (std::int64_t k = 0; k < CoefficientField::slots(j); ++k) {
        double best = 0.0;
        TreeScope sc({j, k}, cutoff);
        for (DyadicNode n : sc) {
          best = std::max(best, std::abs(f.at(n.level, n.position)));
        }
        CHECK(m.at(j, k) == best);
        // the lazy route agrees when the scope cutoff matches
        if (max_scale(lambda, 1.0) >= cutoff) {
          CHECK(m.at(j, k) ==
                tree_max(f.padded(max_scale(lambda, 1.0)), {j, k}, lambda, 1.0));
        }
      }
    }
  }
}

TEST_CASE("subtree maxima validate the cutoff") {
  CoefficientField f(3);
  CHECK_THROWS_AS(subtree_abs_max(f, 4), std::invalid_argument);
  CHECK_THROWS_AS(subtree_abs_max(f, -1), std::invalid_argument);
  CHECK(subtree_abs_max(f, 0).max_level() == 0);
}
