#include "coarse/length.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>

#include "coarse/errors.hpp"

namespace coarse {

std::int64_t zd_length(const ZdElem& e) {
  return std::llabs(e.x[0]) + std::llabs(e.x[1]) + std::llabs(e.x[2]);
}

int free_length(const FreeElem& e) { return static_cast<int>(e.word.size()); }

int lamplighter_length(const LampElem& e) {
  std::int64_t lo = std::min<std::int64_t>(0, e.cursor);
  std::int64_t hi = std::max<std::int64_t>(0, e.cursor);
  if (!e.lamps.empty()) {
    lo = std::min(lo, e.lamps.front());
    hi = std::max(hi, e.lamps.back());
  }
  // Sweep left first, or right first, then walk back to the cursor.
  const std::int64_t left_first = -lo + (hi - lo) + (hi - e.cursor);
  const std::int64_t right_first = hi + (hi - lo) + (e.cursor - lo);
  return static_cast<int>(static_cast<std::int64_t>(e.lamps.size()) + std::min(left_first, right_first));
}

namespace {

struct HeisRep {
  std::int64_t x, y, z;
};

// Orbit representative under (x,y,z) -> (-x,y,-z) and (x,-y,-z). On the axes
// one of the flips fixes x and y, so z is only defined up to sign there.
HeisRep heis_canonical(std::int64_t x, std::int64_t y, std::int64_t z) {
  if (x < 0) x = -x, z = -z;
  if (y < 0) y = -y, z = -z;
  if ((x == 0 || y == 0) && z < 0) z = -z;
  return {x, y, z};
}

}  // namespace

std::shared_ptr<const LengthOracle::HeisTable> LengthOracle::build_heis(int radius, std::size_t cap) {
  if (radius > 254) throw DomainError("Heisenberg length table radius must be <= 254");
  auto t = std::make_shared<HeisTable>();
  t->radius = radius;
  t->zmax = static_cast<std::int64_t>(radius) * radius / 4;
  const std::size_t cells = static_cast<std::size_t>(radius + 1) * static_cast<std::size_t>(radius + 1) *
                            static_cast<std::size_t>(2 * t->zmax + 1);
  t->cells.assign(cells, 0xff);

  using Rep = HeisRep;
  static constexpr std::array<std::array<int, 2>, 4> kSteps = {{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

  std::vector<Rep> frontier{{0, 0, 0}}, next;
  t->cells[t->slot(0, 0, 0)] = 0;
  std::size_t stored = 1;
  for (int level = 1; level <= radius; ++level) {
    next.clear();
    for (const Rep& r : frontier) {
      for (const auto& s : kSteps) {
        // (x,y,z) * (dx,dy,0) = (x+dx, y+dy, z + x*dy)
        const Rep c = heis_canonical(r.x + s[0], r.y + s[1], r.z + r.x * s[1]);
        if (c.x > radius || c.y > radius || c.z > t->zmax || c.z < -t->zmax)
          throw NumericalError("Heisenberg length table box violated; bound on |z| is wrong");
        auto& cell = t->cells[t->slot(c.x, c.y, c.z)];
        if (cell != 0xff) continue;
        cell = static_cast<std::uint8_t>(level);
        next.push_back(c);
      }
    }
    stored += next.size();
    if (stored > cap)
      throw ResourceError("Heisenberg length table of radius " + std::to_string(radius) + " exceeds the element cap of " +
                          std::to_string(cap));
    frontier.swap(next);
  }
  return t;
}

LengthOracle LengthOracle::for_group(const GroupModel& g, int radius, std::size_t cap) {
  LengthOracle o(g);
  switch (g.kind()) {
    case GroupKind::Zd:
    case GroupKind::Free2:
    case GroupKind::Lamplighter: break;
    case GroupKind::Heisenberg: {
      const int r = radius > 0 ? radius : kDefaultLengthRadius;
      o.heis_ = build_heis(r, cap);
      o.coverage_ = r;
      break;
    }
    case GroupKind::BS12: {
      const int r = radius > 0 ? radius : kDefaultBsLengthRadius;
      o.ball_ = Ball::build(g, r, cap);
      o.coverage_ = r;
      break;
    }
  }
  return o;
}

LengthOracle LengthOracle::for_reach(const GroupModel& g, int reach, int radius, std::size_t cap) {
  if (radius <= 0 && g.kind() == GroupKind::Heisenberg) radius = std::clamp(reach, 1, kMaxHeisWalkRadius);
  return for_group(g, radius, cap);
}

std::optional<int> LengthOracle::length(const Element& e) const {
  switch (group_.kind()) {
    case GroupKind::Zd: return static_cast<int>(zd_length(std::get<ZdElem>(e)));
    case GroupKind::Free2: return free_length(std::get<FreeElem>(e));
    case GroupKind::Lamplighter: return lamplighter_length(std::get<LampElem>(e));
    case GroupKind::Heisenberg: {
      const auto& h = std::get<HeisElem>(e);
      const auto [x, y, z] = heis_canonical(h.x, h.y, h.z);
      if (x > heis_->radius || y > heis_->radius || z > heis_->zmax || z < -heis_->zmax) return std::nullopt;
      const auto cell = heis_->cells[heis_->slot(x, y, z)];
      if (cell == 0xff) return std::nullopt;
      return static_cast<int>(cell);
    }
    case GroupKind::BS12: {
      auto idx = ball_->find(e);
      if (!idx) return std::nullopt;
      return ball_->length(*idx);
    }
  }
  return std::nullopt;
}

}  // namespace coarse
