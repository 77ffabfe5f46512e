#pragma once

// Colored partitions of a finite window: pieces of small diameter, pieces of one
// color far apart. These are finite-scale witnesses of Assouad-Nagata dimension.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coarse/cayley.hpp"
#include "coarse/rational.hpp"

namespace coarse {

struct Partition {
  BallPtr ambient;
  int scale = 0;  // r
  int colors = 0;
  Rational stretch{1};  // claimed bound: piece diameter <= K r
  int window_radius = 0;
  std::vector<std::vector<Index>> pieces;  // each sorted; pieces ordered by smallest member
  std::vector<int> color;
  /// Piece may extend beyond the window in the full group (it was cut by the window edge).
  std::vector<char> clipped;
  std::string method;

  std::size_t size() const { return pieces.size(); }
  FiniteSubset piece(std::size_t i) const { return FiniteSubset::of(ambient, pieces[i]); }
  FiniteSubset window() const { return FiniteSubset::window(ambient, window_radius); }
};

/// Cubes of side 2r in Z^d cut to the window B(e, window_radius).
/// d = 1: alternate two colors, K = 2. d >= 2: 2^d colors by parity of the cube
/// coordinates, K = d(2r-1)/r (the l1 diameter of a cube over r).
Partition canonical_decomposition_zd(int d, int r, int window_radius, std::size_t cap = default_element_cap());

struct GreedyFailure {
  Index element = kOutside;         // center of the piece that found no color
  std::vector<Index> piece;         // that piece
  std::vector<std::size_t> blocking;  // one existing piece per color within distance r
  std::string message;
};

using GreedyResult = std::variant<Partition, GreedyFailure>;

/// Smallest window margin greedy_decomposition needs at scale r, stretch K.
int greedy_margin(int r, const Rational& stretch);

/// Ball carving in the window B(e, window_radius) (default: ambient radius minus
/// greedy_margin). Centers are taken in (length, index) order; seed != 0 reorders
/// ties pseudo-randomly. A piece is every unassigned window element within
/// floor(K r / 2) of its center. It gets the lowest color with no piece at
/// distance <= r, or the run fails with a certificate. On success `colors` is the
/// number of colors actually used (at most the budget).
GreedyResult greedy_decomposition(BallPtr ambient, int r, int colors, const Rational& stretch, std::uint64_t seed = 0,
                                  std::optional<int> window_radius = std::nullopt);

struct DecompositionReport {
  int max_piece_diameter = 0;
  bool diameter_exact = false;  // otherwise an in-ball upper bound
  std::optional<int> min_same_color_gap;  // nullopt: a single piece per color
  bool gap_exact = false;                 // otherwise a certified lower bound
  bool invariants_ok = false;             // disjoint, nonempty, covers the window, colors in range
  bool valid = false;
  std::string problem;  // first failed condition, empty when valid
};

DecompositionReport verify_decomposition(const Partition& p);

struct ControlSample {
  int scale;
  int max_piece_diameter;
};

struct ControlFit {
  std::vector<ControlSample> samples;
  std::optional<double> slope;  // least squares of diameter against scale
};

ControlFit observed_control(const std::vector<Partition>& series);

}  // namespace coarse
