#pragma once

// Word-length oracles for the walk engines.
//
//   z1..z3  l1 norm
//   f2      reduced word length
//   lamp    #lamps + shortest cursor tour from 0 over all lit lamps ending at the cursor
//   heis    BFS table over x, y >= 0 (the automorphisms X -> X^-1 and Y -> Y^-1
//           map (x,y,z) to (-x,y,-z) and (x,-y,-z)), |z| <= R^2/4
//   bs12    BFS ball lookup
//
// Table-backed oracles cover lengths <= radius and report anything beyond as
// censored (nullopt), never as an approximation.

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "coarse/cayley.hpp"
#include "coarse/group.hpp"

namespace coarse {

inline constexpr int kDefaultLengthRadius = 40;
/// BS(1,2) grows exponentially; its BFS table stops at this radius unless overridden.
inline constexpr int kDefaultBsLengthRadius = 18;
/// Heisenberg tables hold about R^4/9 orbit representatives; walks get one this large at most.
inline constexpr int kMaxHeisWalkRadius = 110;

int lamplighter_length(const LampElem& e);
int free_length(const FreeElem& e);
std::int64_t zd_length(const ZdElem& e);

class LengthOracle {
 public:
  /// `radius` applies to table-backed groups only; <= 0 picks the default.
  static LengthOracle for_group(const GroupModel& g, int radius = 0, std::size_t cap = default_element_cap());
  /// Oracle sized for lengths up to `reach` (e.g. steps x max atom length): Heisenberg
  /// tables grow to min(reach, kMaxHeisWalkRadius), BS(1,2) keeps its default.
  /// An explicit radius > 0 wins.
  static LengthOracle for_reach(const GroupModel& g, int reach, int radius = 0,
                                std::size_t cap = default_element_cap());

  std::optional<int> length(const Element& e) const;
  /// Largest length the oracle certifies; nullopt for closed forms.
  std::optional<int> coverage() const { return coverage_; }
  std::string_view method() const { return coverage_ ? "bfs-table" : "closed-form"; }
  const GroupModel& group() const { return group_; }

 private:
  explicit LengthOracle(GroupModel g) : group_(std::move(g)) {}

  struct HeisTable {
    int radius = 0;
    std::int64_t zmax = 0;
    std::vector<std::uint8_t> cells;  // 0xff = unreached
    std::size_t slot(std::int64_t x, std::int64_t y, std::int64_t z) const {
      return (static_cast<std::size_t>(x) * static_cast<std::size_t>(radius + 1) + static_cast<std::size_t>(y)) *
                 static_cast<std::size_t>(2 * zmax + 1) +
             static_cast<std::size_t>(z + zmax);
    }
  };
  static std::shared_ptr<const HeisTable> build_heis(int radius, std::size_t cap);

  GroupModel group_;
  std::optional<int> coverage_;
  std::shared_ptr<const HeisTable> heis_;
  BallPtr ball_;
};

}  // namespace coarse
