#pragma once

// Random walks W_n = s_1 ... s_n with steps drawn from μ: exact statistics by
// convolution on balls, Monte Carlo statistics from seeded trajectories.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarse/kernels.hpp"
#include "coarse/length.hpp"
#include "coarse/step.hpp"

namespace coarse {

enum class ReturnMode {
  Midpoint,  // p_2m = sum v_m^2, p_2m+1 = sum v_m v_m+1 on B(e, ceil(nmax/2) L)
  Direct,    // p_n = v_n(e) on B(e, nmax L)
};

/// p_n(e, e) for n = 0..nmax. Every distribution vector is checked to sum to 1
/// within 1e-12 (NumericalError otherwise).
std::vector<double> return_probability_exact(const StepDistribution& mu, int nmax, ReturnMode mode = ReturnMode::Midpoint,
                                             kernels::Backend backend = kernels::Backend::Parallel,
                                             std::size_t cap = default_element_cap());

/// L(n) = E l(W_n) for n = 0..nmax, by convolution on B(e, nmax L).
std::vector<double> drift_exact(const StepDistribution& mu, int nmax,
                                kernels::Backend backend = kernels::Backend::Parallel,
                                std::size_t cap = default_element_cap());

/// Largest admissible length for the cautiousness event at time n: floor(eps sqrt n).
int cautious_radius(int n, double eps);

/// P(max_{k<=n} l(W_k) <= eps sqrt n): mass left after n steps of the walk killed on leaving B(e, ρ).
double cautiousness_exact(const StepDistribution& mu, int n, double eps,
                          kernels::Backend backend = kernels::Backend::Parallel,
                          std::size_t cap = default_element_cap());

inline constexpr std::uint64_t kEnumerationLimit = 1'000'000;

/// Same probability by summing over all |supp μ|^n trajectories; DomainError past kEnumerationLimit.
double cautiousness_enumerate(const StepDistribution& mu, int n, double eps);

/// Word lengths l(W_1), ..., l(W_n) of trial `trial`. A trajectory that leaves the
/// oracle's coverage stops there; `censored_at` is that step.
struct Trajectory {
  std::vector<int> lengths;
  std::optional<int> censored_at;
};
Trajectory simulate_walk(const StepDistribution& mu, int n, std::uint64_t seed, std::uint64_t trial,
                         const LengthOracle& oracle);

struct Estimate {
  int n = 0;
  double value = 0;
  double stderr_ = 0;       // 0 for exact entries
  bool exact = false;
  std::size_t censored = 0;  // trials whose outcome at n is unknown (excluded from value)
};

struct McOptions {
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  kernels::Backend backend = kernels::Backend::Parallel;
};

/// Per-trial observations at each grid time, reduced in trial order so the result
/// does not depend on the thread count.
struct WalkSample {
  std::vector<int> grid;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool tracked_max = false;
  std::optional<int> coverage;  // the oracle's, when table-backed
  // [trial * grid.size() + i]; -1 = beyond the oracle's coverage (or unrepresentable)
  std::vector<int> length;
  std::vector<int> running_max;
  std::vector<signed char> at_identity;  // 1, 0, or -1 when unknown
};

/// `track_max` evaluates the length after every step instead of only at grid times.
WalkSample sample_walks(const StepDistribution& mu, std::vector<int> grid, const McOptions& opt,
                        const LengthOracle& oracle, bool track_max);

std::vector<Estimate> drift_estimates(const WalkSample& s);
std::vector<Estimate> return_estimates(const WalkSample& s);
std::vector<Estimate> cautiousness_estimates(const WalkSample& s, double eps);

/// Single-n conveniences; the oracle is sized for the walk's reach.
Estimate drift_estimate(const StepDistribution& mu, int n, const McOptions& opt);
Estimate cautiousness_estimate(const StepDistribution& mu, int n, double eps, const McOptions& opt);

struct PowerFit {
  double exponent = 0;
  double constant = 0;
};
/// log value ~ log constant + exponent log n over entries with n >= 1, value > 0 and
/// no censored trials (a censored mean is biased toward short walks).
PowerFit power_law_fit(const std::vector<Estimate>& series);

struct ReturnBound {
  double c = 0;  // slope of -log p_n against n^(1/3)
  double intercept = 0;
  double early_slope = 0;
  double late_slope = 0;
  bool violation = false;  // late_slope > (1 + slack) max(early_slope, slack)
};

/// Fit on even n >= 2 with p_n > 0; the two halves of the points give the early and
/// late slopes. DomainError when fewer than 4 usable points remain.
ReturnBound return_bound_check(const std::vector<double>& p, double slack = 0.25);

/// Geometric grid first, 2 first, 4 first, ... up to last.
std::vector<int> geometric_grid(int first, int last);

}  // namespace coarse
