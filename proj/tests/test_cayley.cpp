#include <algorithm>
#include <set>

#include "coarse/cayley.hpp"
#include "coarse/errors.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace coarse;
using coarse::testing::subset_of;
using coarse::testing::z1_range;

namespace {

std::vector<Element> z2_box(std::int64_t lo, std::int64_t hi) {
  std::vector<Element> out;
  for (auto x = lo; x <= hi; ++x)
    for (auto y = lo; y <= hi; ++y) out.push_back(ZdElem{{x, y, 0}});
  return out;
}

// Every word of length <= r, evaluated and deduplicated.
std::size_t word_enumeration_count(const GroupModel& g, int r) {
  std::set<std::string> keys;
  std::vector<int> w;
  auto rec = [&](auto&& self, int depth) -> void {
    keys.insert(g.encode(g.evaluate(w)));
    if (depth == r) return;
    for (int s = 0; s < static_cast<int>(g.generators().size()); ++s) {
      w.push_back(s);
      self(self, depth + 1);
      w.pop_back();
    }
  };
  rec(rec, 0);
  return keys.size();
}

}  // namespace

TEST_CASE("ball sizes") {
  auto z1 = GroupModel::from_name("z1");
  auto b = Ball::build(z1, 3);
  CHECK(b->size() == 7);
  CHECK(b->sphere_sizes() == std::vector<std::size_t>{1, 2, 2, 2});

  auto z2 = GroupModel::from_name("z2");
  std::size_t l1 = 0;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y) l1 += std::abs(x) + std::abs(y) <= 2;
  CHECK(Ball::build(z2, 2)->size() == l1);

  auto heis = GroupModel::from_name("heis");
  CHECK(Ball::build(heis, 2)->size() == word_enumeration_count(heis, 2));
  CHECK(Ball::build(heis, 2)->size() == 17);

  for (const auto& name : {"lamp", "bs12", "f2", "z3"}) {
    auto g = GroupModel::from_name(name);
    CHECK(Ball::build(g, 4)->size() == word_enumeration_count(g, 4));
  }
}

TEST_CASE("ball invariants") {
  for (auto name : GroupModel::catalogue()) {
    auto g = GroupModel::from_name(name);
    auto b = Ball::build(g, 5);
    CHECK(b->length(0) == 0);
    CHECK(g.is_identity(b->element(0)));
    for (Index i = 1; i < static_cast<Index>(b->size()); ++i) {
      bool has_parent = false;
      for (Index j : b->neighbors(i)) has_parent |= j != kOutside && b->length(j) == b->length(i) - 1;
      CHECK(has_parent);
    }
    std::size_t prev = 0;
    for (int r = 0; r <= 5; ++r) {
      CHECK(b->count_within(r) > prev);
      prev = b->count_within(r);
    }
  }
}

TEST_CASE("memory cap is enforced") {
  auto f2 = GroupModel::from_name("f2");
  CHECK_THROWS_AS(Ball::build(f2, 10, 1000), ResourceError);
  try {
    Ball::build(f2, 10, 1000);
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("1000") != std::string::npos);
  }
}

TEST_CASE("boundary examples") {
  auto z1 = GroupModel::from_name("z1");
  for (int n : {1, 3, 6}) {
    auto b = Ball::build(z1, n + 1);
    auto a = subset_of(b, z1_range(-n, n));
    CHECK(boundary(a) == subset_of(b, {ZdElem{{-n, 0, 0}}, ZdElem{{n, 0, 0}}}));
  }
  {
    auto b = Ball::build(z1, 3);
    CHECK_THROWS_AS(boundary(FiniteSubset::window(b, 3)), MarginError);
  }

  auto z2 = GroupModel::from_name("z2");
  auto b2 = Ball::build(z2, 2);
  auto bd = boundary(FiniteSubset::window(b2, 1));
  CHECK(bd.size() == 4);
  CHECK_FALSE(bd.contains(0));

  auto f2 = GroupModel::from_name("f2");
  auto b3 = Ball::build(f2, 3);
  auto bf = boundary(FiniteSubset::window(b3, 2));
  CHECK(bf.size() == 12);
  for (Index i : bf.members) CHECK(b3->length(i) == 2);
}

TEST_CASE("neighborhood examples") {
  auto z1 = GroupModel::from_name("z1");
  auto b = Ball::build(z1, 10);
  CHECK(neighborhood(subset_of(b, {ZdElem{{0, 0, 0}}}), 2) == subset_of(b, z1_range(-2, 2)));
  CHECK(neighborhood(subset_of(b, z1_range(0, 3)), 1) == subset_of(b, z1_range(-1, 4)));
  CHECK_THROWS_AS(neighborhood(subset_of(b, z1_range(0, 8)), 3), MarginError);

  auto heis = GroupModel::from_name("heis");
  auto bh = Ball::build(heis, 4);
  CHECK(neighborhood(FiniteSubset::window(bh, 1), 1) == FiniteSubset::window(bh, 2));
}

TEST_CASE("distance and diameter examples") {
  auto z1 = GroupModel::from_name("z1");
  auto b = Ball::build(z1, 16);
  CHECK(set_distance(subset_of(b, z1_range(0, 3)), subset_of(b, z1_range(8, 11))) == 5);
  CHECK(diameter(subset_of(b, z1_range(0, 3))) == 3);

  auto z2 = GroupModel::from_name("z2");
  auto b2 = Ball::build(z2, 6);
  CHECK(diameter(subset_of(b2, z2_box(-1, 1))) == 4);

  CHECK_THROWS_AS(set_distance(FiniteSubset::of(b, {}), subset_of(b, z1_range(0, 1))), DomainError);
  CHECK_THROWS_AS(diameter(FiniteSubset::of(b, {})), DomainError);

  // Near the edge nothing can be certified.
  auto small = Ball::build(z1, 4);
  CHECK_THROWS_AS(diameter(subset_of(small, z1_range(-4, 4))), MarginError);
  auto bound = diameter_bound(subset_of(small, z1_range(-4, 4)));
  CHECK(bound.value == 8);
  CHECK_FALSE(bound.exact);
}

TEST_CASE("growth closed forms") {
  auto z1 = GroupModel::from_name("z1");
  auto v = growth(z1, 12);
  for (int n = 0; n <= 12; ++n) CHECK(v[static_cast<std::size_t>(n)] == static_cast<std::size_t>(2 * n + 1));

  auto f2 = GroupModel::from_name("f2");
  auto vf = growth(f2, 8);
  std::size_t p3 = 1;
  for (int n = 0; n <= 8; ++n, p3 *= 3) CHECK(vf[static_cast<std::size_t>(n)] == 2 * p3 - 1);

  // Lamplighter: word enumeration oracle, then pinned as a regression fixture.
  auto lamp = GroupModel::from_name("lamp");
  auto vl = growth(lamp, 6);
  for (int r = 0; r <= 6; ++r) CHECK(vl[static_cast<std::size_t>(r)] == word_enumeration_count(lamp, r));
  CHECK(vl == std::vector<std::size_t>{1, 4, 10, 22, 44, 84, 155});
}

TEST_CASE("ball lengths match bidirectional search") {
  for (auto name : GroupModel::catalogue()) {
    auto g = GroupModel::from_name(name);
    const int radius = g.kind() == GroupKind::Free2 || g.kind() == GroupKind::BS12 ? 7 : 9;
    auto b = Ball::build(g, radius);
    CounterRng rng(11, 0);
    for (int k = 0; k < 200; ++k) {
      const auto i = static_cast<Index>(rng.below(static_cast<std::uint32_t>(b->size())));
      CHECK(coarse::testing::bidirectional_length(g, b->element(i), radius + 1) == b->length(i));
    }
  }
}

TEST_CASE("triangle inequality on random triples") {
  for (const auto& name : {"z2", "heis", "lamp", "bs12"}) {
    auto g = GroupModel::from_name(name);
    auto b = Ball::build(g, 10);
    const auto inner = static_cast<std::uint32_t>(b->count_within(3));
    CounterRng rng(5, 0);
    for (int k = 0; k < 500; ++k) {
      auto pick = [&] { return FiniteSubset::of(b, {static_cast<Index>(rng.below(inner))}); };
      auto x = pick(), y = pick(), z = pick();
      CHECK(set_distance(x, z) <= set_distance(x, y) + set_distance(y, z));
      CHECK(set_distance(x, y) == set_distance(y, x));
    }
  }
}

TEST_CASE("boundary and neighborhood laws") {
  for (const auto& name : {"z2", "heis", "lamp"}) {
    auto g = GroupModel::from_name(name);
    auto b = Ball::build(g, 9);
    CounterRng rng(3, 0);
    const auto inner = static_cast<std::uint32_t>(b->count_within(3));
    for (int k = 0; k < 30; ++k) {
      std::vector<Index> m;
      for (int j = 0; j < 6; ++j) m.push_back(static_cast<Index>(rng.below(inner)));
      auto a = FiniteSubset::of(b, m);
      auto bd = boundary(a);
      CHECK(std::includes(a.members.begin(), a.members.end(), bd.members.begin(), bd.members.end()));
      CHECK(neighborhood(a, 0) == a);
      CHECK(neighborhood(neighborhood(a, 2), 3) == neighborhood(a, 5));
    }
  }
}

TEST_CASE("separation equivalence") {
  // d(F', ambient \ F) >= n  iff  neighborhood(F', n-1) is inside F.
  for (const auto& name : {"z1", "z2"}) {
    auto g = GroupModel::from_name(name);
    auto b = Ball::build(g, 14);
    CounterRng rng(9, 0);
    const auto inner = static_cast<std::uint32_t>(b->count_within(4));
    for (int k = 0; k < 100; ++k) {
      std::vector<Index> f;
      for (int j = 0; j < 12; ++j) f.push_back(static_cast<Index>(rng.below(inner)));
      auto big = neighborhood(FiniteSubset::of(b, f), static_cast<int>(rng.below(3)));
      std::vector<Index> fp;
      for (Index i : big.members)
        if (rng.below(2) == 0) fp.push_back(i);
      if (fp.empty()) fp.push_back(big.members.front());
      auto small = FiniteSubset::of(b, fp);

      std::vector<Index> outside;
      auto mask = big.mask();
      for (Index i = 0; i < static_cast<Index>(b->count_within(8)); ++i)
        if (!mask[static_cast<std::size_t>(i)]) outside.push_back(i);
      const int sep = set_distance(small, FiniteSubset::of(b, outside));
      for (int n = 1; n <= 3; ++n) {
        auto nb = neighborhood(small, n - 1);
        const bool inside = std::includes(big.members.begin(), big.members.end(), nb.members.begin(), nb.members.end());
        CHECK((sep >= n) == inside);
      }
    }
  }
}

TEST_CASE("pruned diameter equals all-pairs BFS") {
  for (const auto& name : {"z2", "heis", "lamp", "f2"}) {
    auto g = GroupModel::from_name(name);
    auto b = Ball::build(g, 8);
    CounterRng rng(21, 0);
    const auto inner = static_cast<std::uint32_t>(b->count_within(4));
    for (int k = 0; k < 40; ++k) {
      std::vector<Index> m;
      const auto count = 1 + rng.below(25);
      for (std::uint32_t j = 0; j < count; ++j) m.push_back(static_cast<Index>(rng.below(inner)));
      auto a = FiniteSubset::of(b, m);
      int brute = 0;
      BfsWorkspace ws(b->size());
      for (Index s : a.members) {
        ws.run(*b, std::span<const Index>(&s, 1), -1);
        for (Index t : a.members) brute = std::max(brute, ws.distance(t));
      }
      CHECK(diameter_bound(a).value == brute);
    }
  }
}
