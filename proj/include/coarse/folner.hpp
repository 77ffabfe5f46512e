#pragma once

// Følner ratios, couples F' ⊆ F extracted from colored partitions, and their checks.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coarse/cayley.hpp"
#include "coarse/decomposition.hpp"
#include "coarse/rational.hpp"

namespace coarse {

/// #(inner boundary of F) / #F.
Rational folner_ratio(const FiniteSubset& f);

struct FolnerCouple {
  FiniteSubset f_prime;  // the chosen piece A
  FiniteSubset f;        // B(A, n)
  int n = 0;
  Rational C{1};         // ratio the extraction was allowed (the color count)
  Rational ratio{1};     // #F / #F'
  DiameterBound diam_f;
  DiameterBound diam_piece;
  /// K*2n + 2n: diameter promised by the partition's claimed stretch.
  Rational claimed_bound{0};
  /// diam(A) + 2n with the measured piece diameter.
  int observed_bound = 0;
  std::size_t piece = 0;
  int color = 0;
};

struct PieceScan {
  std::size_t piece;
  int color;
  std::size_t size;       // #A
  std::size_t expanded;   // #B(A, n)
  bool qualifies;         // #B(A, n) <= c #A
};

struct CoupleSearch {
  std::optional<FolnerCouple> couple;
  std::vector<int> color_order;    // heaviest color first
  std::vector<PieceScan> scanned;  // every unclipped piece, in scan order
  std::optional<Rational> best_ratio;
};

/// Picks colors by the total size of their unclipped pieces (heaviest first), then
/// the first piece A in index order with #B(A, n) <= c #A. Needs p.scale == 2n.
CoupleSearch couple_from_decomposition(const Partition& p, int n);

struct CoupleReport {
  bool ok_subset = false;
  bool ok_ratio = false;
  bool ok_separation = false;             // d(F', ambient \ F) >= n
  std::optional<bool> ok_diameter;        // only with a bound
  bool valid = false;
};

CoupleReport verify_couple(const FolnerCouple& c, const Rational& C, int n,
                           std::optional<Rational> diameter_bound = std::nullopt);

struct ScanRow {
  int n;
  std::size_t size;
  std::size_t boundary;
  Rational ratio;
};

/// Families: "balls" (B(e, n), any group), "boxes" ([0,n)^d in Z^d, and
/// [0,n) x [0,n) x [0,n^2) in the Heisenberg group), "lamp-intervals"
/// ({(c, L) : c in [0,n), L ⊆ [0,n)} in the lamplighter).
std::vector<ScanRow> folner_scan(const GroupModel& g, std::string_view family, int nmax,
                                 std::size_t cap = default_element_cap());

struct MassTransport {
  bool hypotheses = false;  // A_i ⊆ B_i and #B_i >= λ #A_i for all i
  bool conclusion = false;  // λ #(⊔A_i) <= #(⊔B_i)
  bool equality = false;
  std::size_t union_a = 0;
  std::size_t union_b = 0;
};

/// The finite counting form of the mass transport lemma. Overlapping B_i is a DomainError.
MassTransport mass_transport_check(const std::vector<FiniteSubset>& a, const std::vector<FiniteSubset>& b,
                                   const Rational& lambda);

}  // namespace coarse
