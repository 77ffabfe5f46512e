#include <cmath>
#include <map>
#include <numbers>

#include "coarse/errors.hpp"
#include "coarse/randomwalk.hpp"
#include "coarse/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace coarse;
using coarse::testing::bidirectional_length;

namespace {

double central_binomial_over_4n(int n) {
  double v = 1;
  for (int k = 1; k <= n; ++k) v *= (n + k) / (4.0 * k);
  return v;
}

// Every trajectory of n steps by depth-first search over words, with word lengths
// from a meet-in-the-middle search: no Ball, no convolution.
struct WordOracle {
  double p_return = 0;
  double drift = 0;
  double cautious = 0;
};

WordOracle enumerate_walks(const StepDistribution& mu, int n, int rho) {
  const auto& g = mu.group();
  std::map<std::string, int> memo;
  auto len = [&](const Element& x) {
    auto [it, fresh] = memo.emplace(g.encode(x), 0);
    if (fresh) it->second = bidirectional_length(g, x, 4 * n + 4).value();
    return it->second;
  };
  WordOracle out;
  auto walk = [&](auto&& self, const Element& x, int depth, double prob, int mx) -> void {
    if (depth == n) {
      if (g.is_identity(x)) out.p_return += prob;
      out.drift += prob * len(x);
      if (mx <= rho) out.cautious += prob;
      return;
    }
    for (std::size_t j = 0; j < mu.atoms().size(); ++j) {
      const Element y = g.multiply(x, mu.atoms()[j]);
      self(self, y, depth + 1, prob * mu.probs()[j], std::max(mx, len(y)));
    }
  };
  walk(walk, g.identity(), 0, 1.0, 0);
  return out;
}

const char* const kGroups[] = {"z1", "z2", "z3", "heis", "lamp", "bs12", "f2"};

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter RNG streams") {
  CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  CounterRng u(1, 0);
  double sum = 0;
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 60000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
    ++hits[u.below(6)];
  }
  CHECK(sum / 60000 == doctest::Approx(0.5).epsilon(0.01));
  for (int h : hits) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("return probabilities on Z and Z^2") {
  const auto z1 = StepDistribution::uniform(GroupModel::from_name("z1"));
  for (auto mode : {ReturnMode::Midpoint, ReturnMode::Direct}) {
    const auto p = return_probability_exact(z1, 25, mode);
    REQUIRE(p.size() == 26);
    CHECK(p[0] == 1.0);
    CHECK(p[2] == doctest::Approx(0.5));
    CHECK(p[4] == doctest::Approx(0.375));
    for (int n = 1; n <= 12; ++n) {
      CHECK(std::abs(p[static_cast<std::size_t>(2 * n)] - central_binomial_over_4n(n)) < 1e-12);
      CHECK(p[static_cast<std::size_t>(2 * n - 1)] == 0.0);
    }
  }
  const auto z2 = StepDistribution::uniform(GroupModel::from_name("z2"));
  const auto p = return_probability_exact(z2, 16);
  for (int n = 1; n <= 8; ++n) {
    const double q = central_binomial_over_4n(n);
    CHECK(std::abs(p[static_cast<std::size_t>(2 * n)] - q * q) < 1e-12);
  }
}

TEST_CASE("midpoint and direct return probabilities agree") {
  for (const auto* name : kGroups) {
    const auto mu = StepDistribution::uniform(GroupModel::from_name(name));
    // Direct mode needs B(e, nmax): keep the exponential-growth balls small.
    const std::map<std::string, int> reach{{"bs12", 8}, {"f2", 10}, {"lamp", 12}};
    const int nmax = reach.contains(name) ? reach.at(name) : 14;
    const auto a = return_probability_exact(mu, nmax, ReturnMode::Midpoint);
    const auto b = return_probability_exact(mu, nmax, ReturnMode::Direct);
    for (int n = 0; n <= nmax; ++n) {
      CAPTURE(name);
      CAPTURE(n);
      CHECK(std::abs(a[static_cast<std::size_t>(n)] - b[static_cast<std::size_t>(n)]) < 1e-10);
    }
  }
}

TEST_CASE("exact statistics against word enumeration") {
  for (const auto* name : kGroups) {
    const auto g = GroupModel::from_name(name);
    const auto mu = StepDistribution::uniform(g);
    const int nmax = mu.atoms().size() > 4 ? 4 : 6;
    const auto p = return_probability_exact(mu, nmax);
    const auto l = drift_exact(mu, nmax);
    for (int n = 1; n <= nmax; ++n) {
      const double eps = 1.0;
      const auto w = enumerate_walks(mu, n, cautious_radius(n, eps));
      CAPTURE(name);
      CAPTURE(n);
      CHECK(p[static_cast<std::size_t>(n)] == doctest::Approx(w.p_return).epsilon(1e-12));
      CHECK(l[static_cast<std::size_t>(n)] == doctest::Approx(w.drift).epsilon(1e-12));
      CHECK(cautiousness_exact(mu, n, eps) == doctest::Approx(w.cautious).epsilon(1e-12));
      CHECK(cautiousness_enumerate(mu, n, eps) == doctest::Approx(w.cautious).epsilon(1e-12));
    }
  }
  // A lazy walk with a length-2 atom.
  const auto z2 = GroupModel::from_name("z2");
  std::vector<Element> atoms{z2.identity(), ZdElem{{1, 0, 0}}, ZdElem{{-1, 0, 0}}, ZdElem{{1, 1, 0}}, ZdElem{{-1, -1, 0}}};
  StepDistribution skew(z2, atoms, {0.2, 0.2, 0.2, 0.2, 0.2});
  for (int n = 1; n <= 5; ++n) {
    const auto w = enumerate_walks(skew, n, cautious_radius(n, 1.5));
    CHECK(return_probability_exact(skew, n)[static_cast<std::size_t>(n)] == doctest::Approx(w.p_return).epsilon(1e-12));
    CHECK(drift_exact(skew, n)[static_cast<std::size_t>(n)] == doctest::Approx(w.drift).epsilon(1e-12));
    CHECK(cautiousness_exact(skew, n, 1.5) == doctest::Approx(w.cautious).epsilon(1e-12));
  }
}

TEST_CASE("drift and cautiousness fixtures on Z") {
  const auto z1 = StepDistribution::uniform(GroupModel::from_name("z1"));
  const auto l = drift_exact(z1, 100);
  CHECK(l[1] == doctest::Approx(1.0));
  CHECK(l[2] == doctest::Approx(1.0));
  CHECK(l[100] / 10 >= 0.7);
  CHECK(l[100] / 10 <= 0.9);
  CHECK(l[100] / 10 == doctest::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(0.01));

  CHECK(cautiousness_exact(z1, 4, 1.0) == doctest::Approx(0.75));
  CHECK(cautiousness_enumerate(z1, 4, 1.0) == doctest::Approx(0.75));
  for (auto* name : kGroups) {
    const auto mu = StepDistribution::uniform(GroupModel::from_name(name));
    CHECK(cautiousness_exact(mu, 9, 3.0) == 1.0);
    CHECK(cautiousness_enumerate(mu, 4, 2.0) == doctest::Approx(1.0));
  }
  CHECK(cautious_radius(4, 1.0) == 2);
  CHECK(cautious_radius(100, 0.5) == 5);
  CHECK(cautious_radius(1600, 0.5) == 20);
  CHECK_THROWS_AS(cautious_radius(4, 0.0), DomainError);
  CHECK_THROWS_AS(cautiousness_enumerate(z1, 20, 1.0), DomainError);

  const auto est = drift_estimate(z1, 100, {100'000, 7, kernels::Backend::Parallel});
  CHECK(est.value / 10 >= 0.7);
  CHECK(est.value / 10 <= 0.9);
  CHECK(std::abs(est.value - l[100]) < 4 * est.stderr_);
}

TEST_CASE("Monte Carlo agrees with exact values at small n") {
  for (const auto* name : {"z1", "z2", "heis", "lamp"}) {
    const auto g = GroupModel::from_name(name);
    const auto mu = StepDistribution::uniform(g);
    const std::vector<int> grid{1, 2, 5, 10, 20};
    const auto s = sample_walks(mu, grid, {20'000, 3, kernels::Backend::Parallel}, LengthOracle::for_reach(g, 20), true);
    const auto p = return_probability_exact(mu, 20);
    const auto l = drift_exact(mu, 20);
    const auto rp = return_estimates(s), dl = drift_estimates(s), ct = cautiousness_estimates(s, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto n = static_cast<std::size_t>(grid[i]);
      CAPTURE(name);
      CAPTURE(n);
      CHECK(rp[i].censored == 0);
      CHECK(std::abs(rp[i].value - p[n]) <= 4 * rp[i].stderr_ + 1e-12);
      CHECK(std::abs(dl[i].value - l[n]) <= 4 * dl[i].stderr_ + 1e-12);
      const double c = cautiousness_exact(mu, grid[i], 1.0);
      CHECK(std::abs(ct[i].value - c) <= 4 * ct[i].stderr_ + 1e-12);
    }
  }
}

TEST_CASE("Monte Carlo does not depend on the backend") {
  const auto g = GroupModel::from_name("heis");
  const auto mu = StepDistribution::uniform(g);
  const auto oracle = LengthOracle::for_reach(g, 50);
  const auto a = sample_walks(mu, {10, 50}, {3000, 5, kernels::Backend::Serial}, oracle, true);
  const auto b = sample_walks(mu, {10, 50}, {3000, 5, kernels::Backend::Parallel}, oracle, true);
  CHECK(a.length == b.length);
  CHECK(a.running_max == b.running_max);
  CHECK(a.at_identity == b.at_identity);
  CHECK(drift_estimates(a)[1].value == drift_estimates(b)[1].value);

  const auto e1 = return_probability_exact(mu, 12, ReturnMode::Midpoint, kernels::Backend::Serial);
  const auto e2 = return_probability_exact(mu, 12, ReturnMode::Midpoint, kernels::Backend::Parallel);
  CHECK(e1 == e2);
}

TEST_CASE("simulated trajectories") {
  for (const auto* name : kGroups) {
    const auto g = GroupModel::from_name(name);
    const auto mu = StepDistribution::uniform(g);
    const auto oracle = LengthOracle::for_reach(g, 10'000);
    const auto t = simulate_walk(mu, 10'000, 42, 0, oracle);
    CAPTURE(name);
    CHECK(t.lengths == simulate_walk(mu, 10'000, 42, 0, oracle).lengths);
    CHECK(t.lengths != simulate_walk(mu, 10'000, 42, 1, oracle).lengths);
    REQUIRE(!t.lengths.empty());
    CHECK(t.lengths[0] == 1);
    for (std::size_t k = 1; k < t.lengths.size(); ++k) CHECK(std::abs(t.lengths[k] - t.lengths[k - 1]) <= 1);
    // Table-backed oracles stop trajectories that leave them.
    if (oracle.coverage())
      CHECK(t.censored_at.has_value() == (t.lengths.size() < 10'000));
    else
      CHECK_FALSE(t.censored_at);
  }
}

TEST_CASE("censoring is reported, never approximated") {
  const auto bs = GroupModel::from_name("bs12");
  const auto mu = StepDistribution::uniform(bs);
  const auto oracle = LengthOracle::for_group(bs, 8);
  const auto s = sample_walks(mu, {4, 8, 30}, {2000, 1, kernels::Backend::Parallel}, oracle, true);
  const auto d = drift_estimates(s);
  CHECK(d[0].censored == 0);
  CHECK(d[1].censored == 0);
  CHECK(d[2].censored > 0);
  // The running max past the table is known to exceed small thresholds.
  const auto c = cautiousness_estimates(s, 1.0);
  CHECK(c[2].censored == 0);
  CHECK_THROWS_AS(cautiousness_estimates(sample_walks(mu, {4}, {10, 1}, oracle, false), 1.0), DomainError);
  // Long BS(1,2) walks overflow 63-bit numerators; those trials are censored instead of aborting.
  const auto big = sample_walks(mu, {2000}, {200, 1, kernels::Backend::Parallel}, LengthOracle::for_group(bs), false);
  CHECK(return_estimates(big)[0].censored > 0);
  // Censored entries are left out of power fits.
  std::vector<Estimate> series{{10, 3.0, 0.1, false, 0}, {20, 4.2, 0.1, false, 0}, {40, 6.0, 0.1, false, 0},
                               {80, 1.0, 0.1, false, 5}};
  CHECK(power_law_fit(series).exponent == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("drift exponents and subadditivity") {
  const auto grid = geometric_grid(25, 400);
  CHECK(grid == std::vector<int>{25, 50, 100, 200, 400});
  std::map<std::string, double> exponent;
  for (const auto* name : {"z1", "z2", "heis", "lamp", "f2"}) {
    const auto g = GroupModel::from_name(name);
    const auto mu = StepDistribution::uniform(g);
    const auto s = sample_walks(mu, grid, {10'000, 9, kernels::Backend::Parallel}, LengthOracle::for_reach(g, 400), false);
    const auto d = drift_estimates(s);
    exponent[name] = power_law_fit(d).exponent;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      // L(2n) <= 2 L(n), with three joint standard errors of slack.
      const double joint = std::hypot(d[i + 1].stderr_, 2 * d[i].stderr_);
      CHECK(d[i + 1].value <= 2 * d[i].value + 3 * joint);
    }
  }
  CHECK(exponent["z1"] <= 0.55);
  CHECK(exponent["z2"] <= 0.55);
  CHECK(exponent["heis"] <= 0.55);
  CHECK(exponent["f2"] >= 0.9);
  // Regression fixture: the lamplighter is still far from its square-root regime at n <= 400.
  CHECK(exponent["lamp"] == doctest::Approx(0.622).epsilon(0.02));
}

TEST_CASE("return bound check") {
  const auto z1 = return_probability_exact(StepDistribution::uniform(GroupModel::from_name("z1")), 200);
  const auto a = return_bound_check(z1);
  CHECK_FALSE(a.violation);
  CHECK(a.late_slope < a.early_slope);
  const auto lamp = return_probability_exact(StepDistribution::uniform(GroupModel::from_name("lamp")), 30);
  CHECK_FALSE(return_bound_check(lamp).violation);
  CHECK(lamp[2] == doctest::Approx(1.0 / 3));

  std::vector<double> fast(31);
  for (int n = 0; n <= 30; ++n) fast[static_cast<std::size_t>(n)] = std::exp(-n);
  CHECK(return_bound_check(fast).violation);
  CHECK_THROWS_AS(return_bound_check(std::vector<double>(31, 0.0)), DomainError);
  CHECK_THROWS_AS(return_bound_check({1.0, 0.0, 0.5}), DomainError);
}

TEST_CASE("resource and argument errors") {
  const auto heis = StepDistribution::uniform(GroupModel::from_name("heis"));
  CHECK_THROWS_AS(return_probability_exact(heis, 40, ReturnMode::Direct, kernels::Backend::Parallel, 1000), ResourceError);
  CHECK_THROWS_AS(return_probability_exact(heis, -1), DomainError);
  CHECK_THROWS_AS(sample_walks(heis, {5, 5}, {}, LengthOracle::for_group(heis.group(), 10), false), DomainError);
  CHECK_THROWS_AS(sample_walks(heis, {5}, {0, 1}, LengthOracle::for_group(heis.group(), 10), false), DomainError);
  CHECK_THROWS_AS(sample_walks(heis, {5}, {}, LengthOracle::for_group(GroupModel::from_name("z1")), false), DomainError);
  CHECK_THROWS_AS(geometric_grid(0, 10), DomainError);
}
