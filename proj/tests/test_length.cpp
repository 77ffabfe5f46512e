#include "coarse/errors.hpp"
#include "coarse/length.hpp"
#include "doctest.h"

using namespace coarse;

namespace {

void check_against_ball(const LengthOracle& o, const Ball& b) {
  for (Index i = 0; i < static_cast<Index>(b.size()); ++i) {
    auto l = o.length(b.element(i));
    REQUIRE(l.has_value());
    CHECK(*l == b.length(i));
  }
}

}  // namespace

TEST_CASE("closed-form lengths agree with BFS") {
  for (const auto& name : {"z1", "z2", "z3", "f2", "lamp"}) {
    auto g = GroupModel::from_name(name);
    auto o = LengthOracle::for_group(g);
    CHECK_FALSE(o.coverage().has_value());
    check_against_ball(o, *Ball::build(g, g.kind() == GroupKind::Free2 ? 8 : 11));
  }
}

TEST_CASE("lamplighter length examples") {
  CHECK(lamplighter_length(LampElem{0, {}}) == 0);
  CHECK(lamplighter_length(LampElem{0, {0}}) == 1);
  CHECK(lamplighter_length(LampElem{3, {}}) == 3);
  // Light -2 and 3, end at 1: go left to -2, right to 3, back to 1 = 2+5+2 = 9, plus 2 toggles.
  CHECK(lamplighter_length(LampElem{1, {-2, 3}}) == 11);
}

TEST_CASE("Heisenberg table agrees with BFS") {
  auto g = GroupModel::from_name("heis");
  auto o = LengthOracle::for_group(g, 16);
  CHECK(o.coverage() == 16);
  check_against_ball(o, *Ball::build(g, 16));
  // Just outside coverage: X^17 has length 17.
  CHECK_FALSE(o.length(HeisElem{17, 0, 0}).has_value());
  CHECK_FALSE(o.length(HeisElem{0, 0, 1000}).has_value());
}

TEST_CASE("Heisenberg table sized from walk reach") {
  auto g = GroupModel::from_name("heis");
  CHECK(LengthOracle::for_reach(g, 30).coverage() == 30);
  CHECK(LengthOracle::for_reach(g, 100000).coverage() == kMaxHeisWalkRadius);
  CHECK(LengthOracle::for_reach(g, 100000, 20).coverage() == 20);
}

TEST_CASE("BS(1,2) lengths come from the ball") {
  auto g = GroupModel::from_name("bs12");
  auto o = LengthOracle::for_group(g, 9);
  check_against_ball(o, *Ball::build(g, 9));
  CHECK_FALSE(o.length(BsElem{{0, 0}, 10}).has_value());
}

TEST_CASE("length table respects the element cap") {
  CHECK_THROWS_AS(LengthOracle::for_group(GroupModel::from_name("heis"), 40, 1000), ResourceError);
}
