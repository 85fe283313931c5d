#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "colme/engine.hpp"
#include "colme/strategies.hpp"
#include "support/properties.hpp"

using namespace colme;

namespace {

// Radius whose value at n = 10 is exactly 0.5, so interval endpoints below are exact.
ConfidenceRadius half_at_ten() {
  const double unit = confidence_radius(make_bound_config(0.001, 2, 1.0), 10);
  double sigma = 0.5 / unit;
  for (int i = 0; i < 200; ++i) {
    const double r = confidence_radius(make_bound_config(0.001, 2, sigma), 10);
    if (r == 0.5) break;
    sigma = std::nextafter(sigma, r < 0.5 ? 10.0 : 0.0);
  }
  const ConfidenceRadius radius(make_bound_config(0.001, 2, sigma));
  REQUIRE(radius(10) == 0.5);
  return radius;
}

double sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

}  // namespace

TEST_CASE("names round trip") {
  for (auto s : {QueryStrategy::none, QueryStrategy::round_robin, QueryStrategy::restricted_round_robin,
                 QueryStrategy::oracle_restricted}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  for (auto s : {WeightScheme::simple, WeightScheme::soft, WeightScheme::aggressive, WeightScheme::class_uniform,
                 WeightScheme::oracle_simple, WeightScheme::local}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_FALSE(parse_strategy("zigzag").has_value());
  CHECK_FALSE(parse_scheme("").has_value());
}

TEST_CASE("round robin cycles over the peers") {
  AgentMemory mem(0, 3);
  mem.set_cursor(1);
  CHECK(choose_agent(QueryStrategy::round_robin, mem, {}) == AgentId{1});
  CHECK(choose_agent(QueryStrategy::round_robin, mem, {}) == AgentId{2});
  CHECK(choose_agent(QueryStrategy::round_robin, mem, {}) == AgentId{1});
  CHECK(choose_agent(QueryStrategy::round_robin, mem, {}) == AgentId{2});
}

TEST_CASE("restricted round robin skips non-members and the owner") {
  AgentMemory mem(0, 3);
  mem.set_cursor(1);
  CHECK(choose_agent(QueryStrategy::restricted_round_robin, mem, {0, 2}) == AgentId{2});
  CHECK(mem.cursor() == 0);
  CHECK(choose_agent(QueryStrategy::restricted_round_robin, mem, {0, 2}) == AgentId{2});

  AgentMemory lonely(1, 4);
  lonely.set_cursor(3);
  CHECK_FALSE(choose_agent(QueryStrategy::restricted_round_robin, lonely, {1}).has_value());
  CHECK(lonely.cursor() == 3);
  CHECK_FALSE(choose_agent(QueryStrategy::oracle_restricted, lonely, {1}).has_value());
  CHECK_FALSE(choose_agent(QueryStrategy::none, lonely, {0, 1, 2, 3}).has_value());
}

TEST_CASE("restricted round robin covers a fixed allowed set once per cycle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const AgentId owner = trial % n;
    AgentSet allowed{owner};
    std::bernoulli_distribution keep(0.5);
    for (AgentId l = 0; l < n; ++l) {
      if (l != owner && keep(rng)) allowed.push_back(l);
    }
    std::sort(allowed.begin(), allowed.end());
    const std::size_t k = allowed.size() - 1;
    AgentMemory mem(owner, n);
    mem.set_cursor(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    std::vector<AgentId> picks;
    for (std::size_t s = 0; s < 4 * k + 3; ++s) {
      const auto p = choose_agent(QueryStrategy::restricted_round_robin, mem, allowed);
      if (k == 0) {
        REQUIRE_FALSE(p.has_value());
        continue;
      }
      REQUIRE(p.has_value());
      REQUIRE(*p != owner);
      REQUIRE(contains(allowed, *p));
      picks.push_back(*p);
    }
    for (std::size_t start = 0; k > 0 && start + k <= picks.size(); ++start) {
      std::vector<AgentId> window(picks.begin() + static_cast<std::ptrdiff_t>(start),
                                  picks.begin() + static_cast<std::ptrdiff_t>(start + k));
      std::sort(window.begin(), window.end());
      REQUIRE(std::adjacent_find(window.begin(), window.end()) == window.end());
    }
  }
}

TEST_CASE("simple weights") {
  AgentMemory mem(0, 3);
  mem.set_local(0.1, 10);
  mem.store(1, 0.3, 5);
  CHECK(weights_simple(mem, {0}) == std::vector<double>{1.0});
  const auto w = weights_simple(mem, {0, 1});
  CHECK(w[0] == doctest::Approx(2.0 / 3.0));
  CHECK(w[1] == doctest::Approx(1.0 / 3.0));
  // never-queried member gets nothing
  const auto w3 = weights_simple(mem, {0, 1, 2});
  CHECK(w3[2] == 0.0);
  CHECK(sum(w3) == doctest::Approx(1.0));

  AgentMemory empty(0, 2);
  CHECK_THROWS_AS(weights_simple(empty, {0, 1}), DegenerateSupport);
  CHECK_THROWS_AS(weights_simple(mem, {}), DegenerateSupport);
}

TEST_CASE("soft weights use the overlap ratio") {
  const auto radius = half_at_ten();
  AgentMemory mem(0, 3);
  mem.set_local(0.5, 10);  // [0, 1]
  mem.store(1, 1.0, 10);   // [0.5, 1.5]
  const auto w = weights_soft(mem, {0, 1}, radius);
  CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-15));

  mem.store(2, 5.0, 10);  // disjoint
  const auto w2 = weights_soft(mem, {0, 1, 2}, radius);
  CHECK(w2[2] == 0.0);
}

TEST_CASE("aggressive gate is strict") {
  const auto radius = half_at_ten();
  AgentMemory mem(0, 2);
  mem.set_local(0.5, 10);
  mem.store(1, 1.0, 10);
  // overlap 0.5 equals the smaller radius 0.5: the peer is gated out
  const auto w = weights_aggressive(mem, {0, 1}, radius);
  CHECK(w == std::vector<double>{1.0, 0.0});
  CHECK(estimate(mem, {0, 1}, WeightScheme::aggressive, radius) == 0.5);

  mem.store(1, std::nextafter(1.0, 0.0), 10);
  const auto w_open = weights_aggressive(mem, {0, 1}, radius);
  CHECK(w_open[1] > 0.0);
}

TEST_CASE("soft falls back to the owner when every peer weight vanishes") {
  const ConfidenceRadius radius(make_bound_config(0.001, 3, 0.0));  // zero-width intervals
  AgentMemory mem(1, 3);
  mem.set_local(0.4, 10);
  mem.store(0, 0.1, 10);
  mem.store(2, 0.9, 10);
  CHECK(weights_soft(mem, {0, 1, 2}, radius) == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(estimate(mem, {0, 1, 2}, WeightScheme::soft, radius) == 0.4);
  CHECK(estimate(mem, {0, 1, 2}, WeightScheme::aggressive, radius) == 0.4);
  CHECK_THROWS_AS(estimate(mem, {0, 2}, WeightScheme::soft, radius), DegenerateSupport);
}

TEST_CASE("class-uniform weights") {
  AgentMemory mem(0, 4);
  mem.set_local(0.2, 10);
  mem.store(1, 0.4, 3);
  CHECK(weights_class_uniform({0, 1, 2}, mem) == std::vector<double>{0.5, 0.5, 0.0});
  CHECK(weights_class_uniform({0}, mem) == std::vector<double>{1.0});
  mem.store(2, 0.0, 1);
  mem.store(3, 0.0, 1);
  CHECK(weights_class_uniform({0, 1, 2, 3}, mem) == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  const ConfidenceRadius radius(make_bound_config(0.001, 4, 0.5));
  CHECK(estimate(mem, {0, 1}, WeightScheme::class_uniform, radius) == doctest::Approx(0.3));
}

TEST_CASE("local estimate ignores the support") {
  const ConfidenceRadius radius(make_bound_config(0.001, 3, 0.5));
  AgentMemory mem(2, 3);
  mem.set_local(0.123, 7);
  mem.store(0, 9.0, 7);
  CHECK(estimate(mem, {0, 1, 2}, WeightScheme::local, radius) == 0.123);
  CHECK(estimate(mem, {}, WeightScheme::local, radius) == 0.123);
}

TEST_CASE("weights are normalized and supports nest") {
  const auto tally = colme_test::weight_properties(4242, 2000);
  CHECK(tally.checked > 8000);
  CHECK(tally.violations == 0);
}

TEST_CASE("simple weighting equals the pooled mean of the raw samples") {
  CHECK(colme_test::pooled_mean_deviation(31) <= 1e-12);
}
