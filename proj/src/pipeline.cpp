#include "coarse/pipeline.hpp"

#include "coarse/errors.hpp"

namespace coarse {

DecomposeRun decompose_window(const GroupModel& g, int r, int window_radius, const DecomposeOptions& opt,
                              std::size_t cap) {
  if (r <= 1) throw DomainError("scale must exceed 1");
  if (window_radius < 0) throw DomainError("window radius must be >= 0");
  if (opt.colors && *opt.colors < 1) throw DomainError("colors must be >= 1");
  if (opt.stretch && *opt.stretch <= 0) throw DomainError("stretch must be positive");
  if (opt.extra_margin < 0) throw DomainError("extra margin must be >= 0");
  const bool zd = g.kind() == GroupKind::Zd;
  std::string method = opt.method;
  if (method == "auto") method = zd && !opt.colors && !opt.stretch ? "canonical" : "greedy";
  if (method != "canonical" && method != "greedy") throw DomainError("unknown decomposition method '" + opt.method + "'");

  DecomposeRun run;
  run.method = method;
  if (method == "canonical") {
    if (!zd) throw DomainError("canonical decompositions exist for z1, z2 and z3 only");
    auto p = canonical_decomposition_zd(g.rank(), r, window_radius, cap);
    run.ambient_radius = p.ambient->radius();
    run.report = verify_decomposition(p);
    run.partition = std::move(p);
    return run;
  }
  const Rational k = opt.stretch.value_or(kGreedyStretch);
  const int colors = opt.colors.value_or(kGreedyColorBudget);
  auto ambient = Ball::build(g, window_radius + greedy_margin(r, k) + opt.extra_margin, cap);
  run.ambient_radius = ambient->radius();
  auto result = greedy_decomposition(ambient, r, colors, k, opt.seed, window_radius);
  if (auto* f = std::get_if<GreedyFailure>(&result)) {
    run.failure = std::move(*f);
    return run;
  }
  auto& p = std::get<Partition>(result);
  run.report = verify_decomposition(p);
  run.partition = std::move(p);
  return run;
}

CoupleRun run_couples(const GroupModel& g, int n, int window_radius, const DecomposeOptions& opt, std::size_t cap) {
  if (n < 1) throw DomainError("n must be >= 1");
  DecomposeOptions o = opt;
  // F = B(A, n) must stay inside the ambient ball with room for one more layer.
  o.extra_margin = std::max(o.extra_margin, n + 1);
  CoupleRun run{decompose_window(g, 2 * n, window_radius, o, cap), std::nullopt, std::nullopt};
  if (!run.decomposition.partition || !run.decomposition.report->valid) return run;
  const auto& p = *run.decomposition.partition;
  run.search = couple_from_decomposition(p, n);
  if (run.search->couple)
    run.verification = verify_couple(*run.search->couple, Rational(p.colors), n, run.search->couple->claimed_bound);
  return run;
}

}  // namespace coarse
