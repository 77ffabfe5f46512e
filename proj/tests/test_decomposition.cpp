#include <algorithm>
#include <cstdlib>

#include "coarse/decomposition.hpp"
#include "coarse/errors.hpp"
#include "doctest.h"

using namespace coarse;

namespace {

std::int64_t l1(const Ball& b, Index i, Index j) {
  const auto& x = std::get<ZdElem>(b.element(i)).x;
  const auto& y = std::get<ZdElem>(b.element(j)).x;
  return std::llabs(x[0] - y[0]) + std::llabs(x[1] - y[1]) + std::llabs(x[2] - y[2]);
}

struct Truth {
  std::int64_t diameter = 0;
  std::int64_t gap = -1;  // -1: no two pieces share a color
};

// Pairwise l1 oracle for Z^d partitions.
Truth brute_force(const Partition& p) {
  Truth t;
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (Index i : p.pieces[a])
      for (Index j : p.pieces[a]) t.diameter = std::max(t.diameter, l1(*p.ambient, i, j));
    for (std::size_t c = a + 1; c < p.size(); ++c) {
      if (p.color[a] != p.color[c]) continue;
      for (Index i : p.pieces[a])
        for (Index j : p.pieces[c]) {
          const auto d = l1(*p.ambient, i, j);
          if (t.gap < 0 || d < t.gap) t.gap = d;
        }
    }
  }
  return t;
}

std::int64_t coord(const Partition& p, Index i) { return std::get<ZdElem>(p.ambient->element(i)).x[0]; }

}  // namespace

TEST_CASE("canonical Z, r = 3") {
  auto p = canonical_decomposition_zd(1, 3, 20);
  CHECK(p.colors == 2);
  CHECK(p.stretch == Rational(2));
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::int64_t lo = 1000, hi = -1000;
    for (Index i : p.pieces[k]) {
      lo = std::min(lo, coord(p, i));
      hi = std::max(hi, coord(p, i));
    }
    // [6q .. 6q+5] cut to [-20, 20], colored by the parity of q.
    const std::int64_t q = lo >= 0 ? lo / 6 : -((-lo + 5) / 6);
    CHECK(lo == std::max<std::int64_t>(6 * q, -20));
    CHECK(hi == std::min<std::int64_t>(6 * q + 5, 20));
    CHECK(p.color[k] == static_cast<int>(((q % 2) + 2) % 2));
    CHECK(static_cast<bool>(p.clipped[k]) == (6 * q < -20 || 6 * q + 5 > 20));
  }
  auto rep = verify_decomposition(p);
  CHECK(rep.invariants_ok);
  CHECK(rep.valid);
  CHECK(rep.max_piece_diameter == 5);
  CHECK(rep.diameter_exact);
  // Same-colored intervals [6q..6q+5] and [6q+12..] are 7 apart in the word metric.
  CHECK(rep.min_same_color_gap == 7);
  CHECK(rep.gap_exact);
}

TEST_CASE("recoloring one piece breaks r-disjointness") {
  auto p = canonical_decomposition_zd(1, 3, 20);
  auto piece_of = [&](std::int64_t x) {
    for (std::size_t k = 0; k < p.size(); ++k)
      for (Index i : p.pieces[k])
        if (coord(p, i) == x) return k;
    return p.size();
  };
  for (std::int64_t left = -18; left <= 12; left += 6) {
    auto q = p;
    q.color[piece_of(left)] = q.color[piece_of(left + 6)];
    auto rep = verify_decomposition(q);
    CHECK_FALSE(rep.valid);
    CHECK(rep.min_same_color_gap.value() <= 3);
  }
}

TEST_CASE("canonical Z^2, r = 2") {
  auto p = canonical_decomposition_zd(2, 2, 10);
  CHECK(p.colors == 4);
  CHECK(p.stretch == Rational(3));
  auto rep = verify_decomposition(p);
  CHECK(rep.valid);
  CHECK(rep.max_piece_diameter == 6);
  CHECK(rep.min_same_color_gap.value() >= 4);
  const auto truth = brute_force(p);
  CHECK(truth.diameter == rep.max_piece_diameter);
  CHECK(truth.gap == rep.min_same_color_gap.value());
}

TEST_CASE("degenerate window") {
  auto p = canonical_decomposition_zd(1, 2, 2);
  // Cubes [-4..-1] and [0..3] cut to [-2, 2].
  CHECK(p.size() == 2);
  CHECK(p.clipped == std::vector<char>{1, 1});
  CHECK(verify_decomposition(p).valid);
}

TEST_CASE("canonical partitions against the l1 oracle") {
  for (int d = 1; d <= 2; ++d)
    for (int r = 2; r <= 5; ++r)
      for (int w : {4, 11, 20}) {
        auto p = canonical_decomposition_zd(d, r, w);
        auto rep = verify_decomposition(p);
        const auto truth = brute_force(p);
        CHECK(rep.valid);
        CHECK(rep.max_piece_diameter == truth.diameter);
        if (truth.gap >= 0) {
          CHECK(rep.min_same_color_gap.value() == truth.gap);
          CHECK(truth.gap >= 2 * r);
        }
        if (w >= 8 * r) {
          CHECK(truth.gap == 2 * r + 1);
          CHECK(truth.diameter == d * (2 * r - 1));
        }
      }
}

TEST_CASE("canonical rejects r <= 1 and bad dimensions") {
  CHECK_THROWS_AS(canonical_decomposition_zd(1, 1, 10), DomainError);
  CHECK_THROWS_AS(canonical_decomposition_zd(4, 2, 10), DomainError);
}

TEST_CASE("greedy on Z") {
  auto b = Ball::build(GroupModel::from_name("z1"), 30);
  auto ok = greedy_decomposition(b, 3, 2, Rational(2), 0);
  REQUIRE(std::holds_alternative<Partition>(ok));
  const auto& p = std::get<Partition>(ok);
  auto rep = verify_decomposition(p);
  CHECK(rep.valid);
  CHECK(rep.max_piece_diameter <= 6);
  CHECK(brute_force(p).gap == rep.min_same_color_gap.value());

  auto bad = greedy_decomposition(b, 3, 1, Rational(2), 0);
  REQUIRE(std::holds_alternative<GreedyFailure>(bad));
  const auto& f = std::get<GreedyFailure>(bad);
  CHECK(f.blocking.size() == 1);
  CHECK_FALSE(f.piece.empty());

  CHECK_THROWS_AS(greedy_decomposition(b, 1, 2, Rational(2), 0), DomainError);
  CHECK_THROWS_AS(greedy_decomposition(b, 3, 2, Rational(2), 0, 29), MarginError);
}

TEST_CASE("greedy on F2 either verifies or certifies failure") {
  auto b = Ball::build(GroupModel::from_name("f2"), 8);
  auto res = greedy_decomposition(b, 2, 2, Rational(4), 0);
  if (auto* p = std::get_if<Partition>(&res)) {
    CHECK(verify_decomposition(*p).valid);
  } else {
    const auto& f = std::get<GreedyFailure>(res);
    // Every blocking piece really is within distance r of the stuck piece.
    REQUIRE(f.blocking.size() == 2);
    CHECK(f.element != kOutside);
  }
  // Fixture: at this radius two colors suffice.
  CHECK(std::holds_alternative<Partition>(res));
}

TEST_CASE("greedy is deterministic per seed") {
  auto b = Ball::build(GroupModel::from_name("z2"), 14);
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    auto x = greedy_decomposition(b, 3, 9, Rational(2), seed);
    auto y = greedy_decomposition(b, 3, 9, Rational(2), seed);
    REQUIRE(std::holds_alternative<Partition>(x));
    CHECK(std::get<Partition>(x).pieces == std::get<Partition>(y).pieces);
    CHECK(std::get<Partition>(x).color == std::get<Partition>(y).color);
  }
}

TEST_CASE("observed control") {
  std::vector<Partition> z1, z2;
  for (int r : {2, 4, 8}) {
    z1.push_back(canonical_decomposition_zd(1, r, 40));
    z2.push_back(canonical_decomposition_zd(2, r, 20));
  }
  auto f1 = observed_control(z1);
  REQUIRE(f1.samples.size() == 3);
  CHECK(f1.samples[0].max_piece_diameter == 3);
  CHECK(f1.samples[1].max_piece_diameter == 7);
  CHECK(f1.samples[2].max_piece_diameter == 15);
  CHECK(f1.slope.value() == doctest::Approx(2.0));
  CHECK(observed_control(z2).slope.value() == doctest::Approx(4.0));

  auto single = observed_control({z1[0]});
  CHECK(single.samples.size() == 1);
  CHECK_FALSE(single.slope.has_value());

  CHECK_THROWS_AS(observed_control({z1[0], z2[0]}), DomainError);
}
