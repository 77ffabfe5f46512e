#include "coarse/profile.hpp"

#include <algorithm>
#include <cmath>

#include "coarse/errors.hpp"
#include "coarse/stats.hpp"

namespace coarse {

TestFunction couple_test_function(const FolnerCouple& c) {
  const auto& f = c.f;
  if (f.empty()) throw DomainError("couple with an empty F");
  const Ball& b = *f.ambient;
  if (f.max_length() + 1 > b.radius())
    throw MarginError("test function needs the ambient ball to show the outside neighbors of F");
  const auto in = f.mask();
  std::vector<Index> outside;
  for (Index x : f.members)
    for (Index y : b.neighbors(x))
      if (y >= 0 && !in[static_cast<std::size_t>(y)]) outside.push_back(y);
  std::sort(outside.begin(), outside.end());
  outside.erase(std::unique(outside.begin(), outside.end()), outside.end());

  // A shortest path from x to the complement runs inside F until its last step.
  BfsWorkspace ws(b.size());
  ws.run_within(b, outside, c.n, in);
  TestFunction t{f, {}};
  t.values.reserve(f.size());
  for (Index x : f.members) {
    const int d = ws.distance(x);
    t.values.push_back(static_cast<double>(d < 0 ? c.n : std::min(d, c.n)) / c.n);
  }
  return t;
}

TestFunction tent_function(const BallPtr& ambient, int r) {
  if (r < 0 || r > ambient->radius()) throw DomainError("tent radius must lie in [0, ambient radius]");
  TestFunction t{FiniteSubset::window(ambient, r), {}};
  for (Index x : t.support.members) t.values.push_back(static_cast<double>(r + 1 - ambient->length(x)) / (r + 1));
  return t;
}

Rayleigh lp_rayleigh(const TestFunction& f, double p, const StepDistribution& mu) {
  if (!(p >= 1.0 && p <= 2.0)) throw DomainError("p must lie in [1, 2]");
  if (f.support.empty() || f.values.size() != f.support.size()) throw DomainError("malformed test function");
  const Ball& b = *f.support.ambient;
  if (!(b.group() == mu.group())) throw DomainError("test function and step distribution belong to different groups");
  const auto& members = f.support.members;
  auto value_at = [&](Index y) {
    auto it = std::lower_bound(members.begin(), members.end(), y);
    return it != members.end() && *it == y ? f.values[static_cast<std::size_t>(it - members.begin())] : 0.0;
  };
  // Pairs with both ends outside the support contribute nothing. A pair (x, xs) with
  // only x inside is matched by (xs, s^-1), so it is counted twice here.
  Rayleigh out;
  const auto& atoms = mu.atoms();
  for (std::size_t k = 0; k < members.size(); ++k) {
    const Index x = members[k];
    const double fx = f.values[k];
    out.norm_p += std::pow(std::abs(fx), p);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      Index y = kOutside;
      if (const int gi = mu.generator_index()[j]; gi >= 0) {
        y = b.neighbors(x)[static_cast<std::size_t>(gi)];
      } else if (auto hit = b.find(b.group().multiply_unchecked(b.element(x), atoms[j]))) {
        y = *hit;
      }
      const double fy = y >= 0 ? value_at(y) : 0.0;
      const bool y_inside = y >= 0 && std::binary_search(members.begin(), members.end(), y);
      out.energy += mu.probs()[j] * (y_inside ? std::pow(std::abs(fx - fy), p) : 2.0 * std::pow(std::abs(fx), p));
    }
  }
  out.energy *= 0.5;
  if (out.norm_p <= 0) throw DomainError("test function is identically zero");
  out.quotient = out.energy / out.norm_p;
  return out;
}

Eigen l2_profile_exact(const GroupModel& g, int r, const StepDistribution& mu, double tol, kernels::Backend backend,
                       std::size_t max_iterations, std::size_t cap) {
  if (r < 0) throw DomainError("profile radius must be >= 0");
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  auto b = Ball::build(g, r, cap);
  const StepOperator op(*b, mu);
  const auto& k = kernels::ops(backend);
  const std::size_t n = b->size();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), w(n);

  Eigen out;
  out.ball_size = n;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    k.apply(op.table(), v, w);
    const double nu = k.dot(v, w);
    out.residual = std::sqrt(k.diff_norm2(w, v, nu));
    out.iterations = it;
    out.lambda = 1.0 - nu;
    if (out.residual < tol) return out;
    // (I + P)/2 has spectrum in [0, 1], so its top eigenvalue is also the largest in modulus.
    k.average(v, w, v);
    k.scale(v, 1.0 / std::sqrt(k.dot(v, v)));
  }
  throw NumericalError("power iteration for r = " + std::to_string(r) + " stopped after " +
                       std::to_string(max_iterations) + " iterations with residual " + std::to_string(out.residual));
}

CoupleBound couple_upper_bound(const FolnerCouple& c, const StepDistribution& mu) {
  return {lp_rayleigh(couple_test_function(c), 2.0, mu).quotient, set_radius(c.f).value};
}

ProfileFit profile_fit(const std::vector<int>& r, const std::vector<double>& lambda, double p, double slack) {
  if (r.size() != lambda.size() || r.size() < 3) throw DomainError("profile fit needs at least three points");
  std::vector<double> x, y;
  ProfileFit out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0) throw DomainError("profile fit needs radii >= 1");
    if (i > 0 && r[i] <= r[i - 1]) throw DomainError("profile fit needs increasing radii");
    if (!(lambda[i] > 0)) throw DomainError("profile fit needs positive eigenvalues");
    x.push_back(std::log(r[i]));
    y.push_back(std::log(lambda[i]));
    out.c_bound = std::max(out.c_bound, lambda[i] * std::pow(r[i], p));
  }
  out.exponent = least_squares(x, y).slope;
  // C of the claim λ_r <= C r^-p, fitted with the slope held at -p.
  double log_c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) log_c += y[i] + p * x[i];
  out.constant = std::exp(log_c / static_cast<double>(x.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    if (lambda[i] > out.constant * std::pow(r[i], -p) * (1 + slack)) out.violation = true;
  return out;
}

}  // namespace coarse
