#pragma once

// Decomposition -> couple extraction on a window, with the method and defaults
// the command-line front end uses.

#include <optional>
#include <string>

#include "coarse/decomposition.hpp"
#include "coarse/folner.hpp"

namespace coarse {

/// Greedy defaults for groups without a canonical decomposition.
inline constexpr int kGreedyColorBudget = 64;
inline const Rational kGreedyStretch{3};

struct DecomposeOptions {
  std::string method = "auto";  // auto | canonical | greedy
  std::optional<int> colors;    // greedy color budget
  std::optional<Rational> stretch;
  std::uint64_t seed = 0;
  /// Greedy only: ambient radius beyond greedy_margin. The canonical ambient margin
  /// r + ceil(K r) already covers couples at n = r / 2.
  int extra_margin = 0;
};

struct DecomposeRun {
  std::string method;
  std::optional<Partition> partition;  // nullopt when greedy failed
  std::optional<GreedyFailure> failure;
  std::optional<DecompositionReport> report;
  int ambient_radius = 0;
};

/// auto = canonical cubes on Z^d unless colors or stretch were requested, greedy
/// otherwise. Scale must exceed 1.
DecomposeRun decompose_window(const GroupModel& g, int r, int window_radius, const DecomposeOptions& opt,
                              std::size_t cap = default_element_cap());

struct CoupleRun {
  DecomposeRun decomposition;
  std::optional<CoupleSearch> search;
  std::optional<CoupleReport> verification;  // against C = color count and the claimed bound
};

/// Scale-2n decomposition of B(e, window_radius), then couple extraction at n.
CoupleRun run_couples(const GroupModel& g, int n, int window_radius, const DecomposeOptions& opt,
                      std::size_t cap = default_element_cap());

}  // namespace coarse
