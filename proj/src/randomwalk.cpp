#include "coarse/randomwalk.hpp"

#include <algorithm>
#include <cmath>

#include "coarse/errors.hpp"
#include "coarse/rng.hpp"
#include "coarse/stats.hpp"

namespace coarse {

namespace {

constexpr double kConservationTol = 1e-12;

void check_mass(double total, int step) {
  if (std::abs(total - 1.0) > kConservationTol)
    throw NumericalError("distribution at step " + std::to_string(step) + " sums to " + std::to_string(total));
}

// For symmetric μ, sum_s v(g s^-1) μ(s) = sum_s μ(s) v(g s), which is what the step table applies.
struct Convolution {
  BallPtr ball;
  StepOperator op;
  const kernels::Ops& k;
  Convolution(const StepDistribution& mu, int radius, kernels::Backend backend, std::size_t cap)
      : ball(Ball::build(mu.group(), radius, cap)), op(*ball, mu), k(kernels::ops(backend)) {}
  std::vector<double> delta() const {
    std::vector<double> v(ball->size(), 0.0);
    v[0] = 1.0;
    return v;
  }
  void step(const std::vector<double>& in, std::vector<double>& out) const { k.apply(op.table(), in, out); }
};

class AtomSampler {
 public:
  explicit AtomSampler(const StepDistribution& mu) : mu_(mu) {
    double acc = 0;
    for (double p : mu.probs()) cumulative_.push_back(acc += p);
  }
  void step(Element& x, CounterRng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto j = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end() - 1, u) -
                                            cumulative_.begin());
    if (const int gi = mu_.generator_index()[j]; gi >= 0)
      mu_.group().right_multiply_generator(x, gi);
    else
      x = mu_.group().multiply_unchecked(x, mu_.atoms()[j]);
  }

 private:
  const StepDistribution& mu_;
  std::vector<double> cumulative_;
};

void check_grid(const std::vector<int>& grid) {
  if (grid.empty()) throw DomainError("empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1])) throw DomainError("time grid must be increasing and >= 1");
}

// Mean and standard error of the mean over the included trials.
Estimate summarize(int n, const std::vector<double>& xs, std::size_t censored) {
  Estimate e;
  e.n = n;
  e.censored = censored;
  if (xs.empty()) return e;
  double sum = 0;
  for (double x : xs) sum += x;
  e.value = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - e.value) * (x - e.value);
    e.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

template <class Fn>
std::vector<Estimate> reduce(const WalkSample& s, Fn&& observe) {
  std::vector<Estimate> out;
  const std::size_t m = s.grid.size();
  std::vector<double> xs;
  for (std::size_t i = 0; i < m; ++i) {
    xs.clear();
    std::size_t censored = 0;
    for (std::size_t t = 0; t < s.trials; ++t) {
      if (auto v = observe(t * m + i, s.grid[i]))
        xs.push_back(*v);
      else
        ++censored;
    }
    out.push_back(summarize(s.grid[i], xs, censored));
  }
  return out;
}

}  // namespace

std::vector<double> return_probability_exact(const StepDistribution& mu, int nmax, ReturnMode mode,
                                             kernels::Backend backend, std::size_t cap) {
  if (nmax < 0) throw DomainError("nmax must be >= 0");
  const int L = mu.max_atom_length();
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (mode == ReturnMode::Direct) {
    const Convolution c(mu, nmax * L, backend, cap);
    auto v = c.delta();
    std::vector<double> w(v.size());
    p[0] = 1.0;
    for (int n = 1; n <= nmax; ++n) {
      c.step(v, w);
      std::swap(v, w);
      check_mass(c.k.sum(v), n);
      p[static_cast<std::size_t>(n)] = v[0];
    }
    return p;
  }
  const int half = (nmax + 1) / 2;
  const Convolution c(mu, half * L, backend, cap);
  auto v = c.delta();
  std::vector<double> w(v.size());
  for (int m = 0; m <= half; ++m) {
    if (2 * m <= nmax) p[static_cast<std::size_t>(2 * m)] = c.k.dot(v, v);
    if (m == half) break;
    c.step(v, w);
    check_mass(c.k.sum(w), m + 1);
    if (2 * m + 1 <= nmax) p[static_cast<std::size_t>(2 * m + 1)] = c.k.dot(v, w);
    std::swap(v, w);
  }
  return p;
}

std::vector<double> drift_exact(const StepDistribution& mu, int nmax, kernels::Backend backend, std::size_t cap) {
  if (nmax < 0) throw DomainError("nmax must be >= 0");
  const Convolution c(mu, nmax * mu.max_atom_length(), backend, cap);
  std::vector<double> len(c.ball->size());
  for (std::size_t i = 0; i < len.size(); ++i) len[i] = c.ball->length(static_cast<Index>(i));
  auto v = c.delta();
  std::vector<double> w(v.size());
  std::vector<double> out{0.0};
  for (int n = 1; n <= nmax; ++n) {
    c.step(v, w);
    std::swap(v, w);
    check_mass(c.k.sum(v), n);
    out.push_back(c.k.dot(v, len));
  }
  return out;
}

int cautious_radius(int n, double eps) {
  if (!(eps > 0)) throw DomainError("eps must be positive");
  if (n < 0) throw DomainError("n must be >= 0");
  // The slack keeps exact squares such as eps sqrt n = 2 from rounding down.
  return static_cast<int>(std::floor(eps * std::sqrt(static_cast<double>(n)) + 1e-9));
}

double cautiousness_exact(const StepDistribution& mu, int n, double eps, kernels::Backend backend, std::size_t cap) {
  const int rho = cautious_radius(n, eps);
  if (static_cast<std::int64_t>(rho) >= static_cast<std::int64_t>(n) * mu.max_atom_length()) return 1.0;
  const Convolution c(mu, rho, backend, cap);
  auto v = c.delta();
  std::vector<double> w(v.size());
  for (int k = 0; k < n; ++k) {
    c.step(v, w);
    std::swap(v, w);
  }
  return c.k.sum(v);
}

double cautiousness_enumerate(const StepDistribution& mu, int n, double eps) {
  const int rho = cautious_radius(n, eps);
  const std::size_t width = mu.atoms().size();
  std::uint64_t count = 1;
  for (int k = 0; k < n; ++k)
    if ((count *= width) > kEnumerationLimit)
      throw DomainError("enumeration needs more than " + std::to_string(kEnumerationLimit) + " trajectories");
  const auto oracle = LengthOracle::for_reach(mu.group(), n * mu.max_atom_length());
  const auto& g = mu.group();
  double total = 0;
  auto walk = [&](auto&& self, const Element& x, int depth, double prob) -> void {
    if (depth == n) {
      total += prob;
      return;
    }
    for (std::size_t j = 0; j < width; ++j) {
      const Element y = g.multiply(x, mu.atoms()[j]);
      const auto len = oracle.length(y);
      if (!len) throw ResourceError("length oracle does not cover the enumerated walk");
      if (*len <= rho) self(self, y, depth + 1, prob * mu.probs()[j]);
    }
  };
  walk(walk, g.identity(), 0, 1.0);
  return total;
}

Trajectory simulate_walk(const StepDistribution& mu, int n, std::uint64_t seed, std::uint64_t trial,
                         const LengthOracle& oracle) {
  if (n < 0) throw DomainError("n must be >= 0");
  const AtomSampler sampler(mu);
  CounterRng rng(seed, trial);
  Element x = mu.group().identity();
  Trajectory t;
  t.lengths.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::optional<int> len;
    try {
      sampler.step(x, rng);
      len = oracle.length(x);
    } catch (const OverflowError&) {
    }
    if (!len) {
      t.censored_at = k;
      break;
    }
    t.lengths.push_back(*len);
  }
  return t;
}

WalkSample sample_walks(const StepDistribution& mu, std::vector<int> grid, const McOptions& opt,
                        const LengthOracle& oracle, bool track_max) {
  check_grid(grid);
  if (opt.trials < 1) throw DomainError("trials must be >= 1");
  if (!(oracle.group() == mu.group())) throw DomainError("length oracle belongs to another group");
  WalkSample s;
  s.grid = std::move(grid);
  s.trials = opt.trials;
  s.seed = opt.seed;
  s.tracked_max = track_max;
  s.coverage = oracle.coverage();
  const std::size_t m = s.grid.size();
  s.length.assign(opt.trials * m, -1);
  s.running_max.assign(opt.trials * m, -1);
  s.at_identity.assign(opt.trials * m, -1);
  const AtomSampler sampler(mu);
  const auto& g = mu.group();

  auto run_trial = [&](std::size_t t) {
    CounterRng rng(opt.seed, t);
    Element x = g.identity();
    int best = 0;
    bool lost = false;  // the running max left the oracle's coverage
    std::size_t next = 0;
    for (int k = 1; k <= s.grid.back(); ++k) {
      try {
        sampler.step(x, rng);
      } catch (const OverflowError&) {
        // The position is no longer representable, and far outside any length table:
        // every later grid time stays censored.
        return;
      }
      const bool at_grid = k == s.grid[next];
      std::optional<int> len;
      if (at_grid || (track_max && !lost)) {
        len = oracle.length(x);
        if (len)
          best = std::max(best, *len);
        else
          lost = true;
      }
      if (!at_grid) continue;
      const std::size_t slot = t * m + next;
      s.length[slot] = len.value_or(-1);
      s.running_max[slot] = track_max && !lost ? best : -1;
      s.at_identity[slot] = g.is_identity(x) ? 1 : 0;
      ++next;
    }
  };
  if (opt.backend == kernels::Backend::Parallel)
    kernels::omp::for_each_index(opt.trials, run_trial);
  else
    kernels::serial::for_each_index(opt.trials, run_trial);
  return s;
}

std::vector<Estimate> drift_estimates(const WalkSample& s) {
  return reduce(s, [&](std::size_t slot, int) -> std::optional<double> {
    if (s.length[slot] < 0) return std::nullopt;
    return s.length[slot];
  });
}

std::vector<Estimate> return_estimates(const WalkSample& s) {
  return reduce(s, [&](std::size_t slot, int) -> std::optional<double> {
    if (s.at_identity[slot] < 0) return std::nullopt;
    return s.at_identity[slot];
  });
}

std::vector<Estimate> cautiousness_estimates(const WalkSample& s, double eps) {
  if (!s.tracked_max) throw DomainError("walk sample was taken without running maxima");
  return reduce(s, [&](std::size_t slot, int n) -> std::optional<double> {
    const int rho = cautious_radius(n, eps);
    const int mx = s.running_max[slot];
    if (mx >= 0) return mx <= rho ? 1.0 : 0.0;
    // The walk left the oracle's coverage, so its maximum exceeds it.
    if (s.coverage && rho <= *s.coverage) return 0.0;
    return std::nullopt;
  });
}

Estimate drift_estimate(const StepDistribution& mu, int n, const McOptions& opt) {
  const auto oracle = LengthOracle::for_reach(mu.group(), n * mu.max_atom_length());
  return drift_estimates(sample_walks(mu, {n}, opt, oracle, false)).front();
}

Estimate cautiousness_estimate(const StepDistribution& mu, int n, double eps, const McOptions& opt) {
  const auto oracle = LengthOracle::for_reach(mu.group(), n * mu.max_atom_length());
  return cautiousness_estimates(sample_walks(mu, {n}, opt, oracle, true), eps).front();
}

PowerFit power_law_fit(const std::vector<Estimate>& series) {
  std::vector<double> x, y;
  for (const auto& e : series)
    if (e.n >= 1 && e.value > 0 && e.censored == 0) {
      x.push_back(std::log(e.n));
      y.push_back(std::log(e.value));
    }
  const auto fit = least_squares(x, y);
  return {fit.slope, std::exp(fit.intercept)};
}

ReturnBound return_bound_check(const std::vector<double>& p, double slack) {
  std::vector<double> x, y;
  for (std::size_t n = 2; n < p.size(); n += 2) {
    if (p[n] < 0 || p[n] > 1) throw DomainError("return probabilities must lie in [0, 1]");
    if (p[n] > 0) {
      x.push_back(std::cbrt(static_cast<double>(n)));
      y.push_back(-std::log(p[n]));
    }
  }
  if (x.size() < 4) throw DomainError("return bound check needs at least four positive even-time values");
  ReturnBound out;
  const auto all = least_squares(x, y);
  out.c = all.slope;
  out.intercept = all.intercept;
  const std::size_t h = x.size() / 2;
  out.early_slope = least_squares(std::span(x).first(h), std::span(y).first(h)).slope;
  out.late_slope = least_squares(std::span(x).subspan(h), std::span(y).subspan(h)).slope;
  out.violation = out.late_slope > (1 + slack) * std::max(out.early_slope, slack);
  return out;
}

std::vector<int> geometric_grid(int first, int last) {
  if (first < 1 || last < first) throw DomainError("geometric grid needs 1 <= first <= last");
  std::vector<int> g;
  for (std::int64_t n = first; n <= last; n *= 2) g.push_back(static_cast<int>(n));
  return g;
}

}  // namespace coarse
