#pragma once

// l_p profiles inside balls: the exact Dirichlet eigenvalue at p = 2 and upper
// bounds from explicit test functions.

#include <string>
#include <vector>

#include "coarse/folner.hpp"
#include "coarse/kernels.hpp"
#include "coarse/step.hpp"

namespace coarse {

struct TestFunction {
  FiniteSubset support;
  std::vector<double> values;  // values[k] belongs to support.members[k]; zero elsewhere
};

/// f(x) = min(d(x, G \ F), n) / n on F, zero outside: 1 on F', falling to 1/n at the edge of F.
TestFunction couple_test_function(const FolnerCouple& c);
/// f(x) = (r + 1 - l(x)) / (r + 1) on B(e, r).
TestFunction tent_function(const BallPtr& ambient, int r);

struct Rayleigh {
  double energy = 0;  // (1/2) sum_x sum_s |f(x) - f(xs)|^p μ(s)
  double norm_p = 0;  // sum_x |f(x)|^p
  double quotient = 0;
};

/// f is extended by zero outside its support; p in [1, 2].
Rayleigh lp_rayleigh(const TestFunction& f, double p, const StepDistribution& mu);

struct Eigen {
  double lambda = 0;
  double residual = 0;
  std::size_t iterations = 0;
  std::size_t ball_size = 0;
};

inline constexpr std::size_t kProfileIterationCap = 1'000'000;

/// Smallest eigenvalue of I - P_B on B(e, r) with absorbing exterior. Power
/// iteration on the lazy operator (I + P_B)/2 from the uniform vector, stopped when
/// |P_B v - ν v| < tol |v|; NumericalError past the iteration cap.
Eigen l2_profile_exact(const GroupModel& g, int r, const StepDistribution& mu, double tol = 1e-10,
                       kernels::Backend backend = kernels::Backend::Parallel,
                       std::size_t max_iterations = kProfileIterationCap, std::size_t cap = default_element_cap());

struct CoupleBound {
  double value = 0;  // Rayleigh quotient of the couple test function, p = 2
  int radius = 0;    // F lies in a ball of this radius, so value >= λ(B(e, r)) for r >= radius
};

CoupleBound couple_upper_bound(const FolnerCouple& c, const StepDistribution& mu);

struct ProfileFit {
  double exponent = 0;  // slope of log λ against log r
  double constant = 0;  // C_fit: geometric mean of λ_r r^p (least squares with the slope fixed at -p)
  double c_bound = 0;   // max λ_r r^p: smallest C with λ_r <= C r^-p on the series
  bool violation = false;  // some λ_r > constant r^-p (1 + slack)
};

ProfileFit profile_fit(const std::vector<int>& r, const std::vector<double>& lambda, double p, double slack = 0.3);

}  // namespace coarse
