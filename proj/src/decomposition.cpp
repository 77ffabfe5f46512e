#include "coarse/decomposition.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "coarse/errors.hpp"
#include "coarse/stats.hpp"

namespace coarse {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_times(const Rational& k, int r) { return floor_div(k.numerator() * r, k.denominator()); }
std::int64_t ceil_times(const Rational& k, int r) { return -floor_div(-k.numerator() * r, k.denominator()); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Reorder pieces by smallest member, carrying color and clipped along.
void sort_pieces(Partition& p) {
  std::vector<std::size_t> perm(p.pieces.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return p.pieces[a][0] < p.pieces[b][0]; });
  Partition q = p;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    q.pieces[i] = std::move(p.pieces[perm[i]]);
    q.color[i] = p.color[perm[i]];
    q.clipped[i] = p.clipped[perm[i]];
  }
  p = std::move(q);
}

}  // namespace

Partition canonical_decomposition_zd(int d, int r, int window_radius, std::size_t cap) {
  if (d < 1 || d > 3) throw DomainError("canonical decomposition needs d in {1,2,3}");
  if (r <= 1) throw DomainError("scale r must exceed 1");
  if (window_radius < 0) throw DomainError("window radius must be >= 0");

  Partition p;
  p.scale = r;
  p.stretch = d == 1 ? Rational(2) : Rational(d * (2 * r - 1), r);
  p.colors = d == 1 ? 2 : 1 << d;
  p.window_radius = window_radius;
  p.method = "canonical";
  // Enough room to certify piece diameters and the diameters of couples taken at n = r/2.
  const auto margin = static_cast<int>(r + ceil_times(p.stretch, r));
  p.ambient = Ball::build(GroupModel::from_name("z" + std::to_string(d)), window_radius + margin, cap);

  const std::int64_t side = 2 * r;
  std::map<std::array<std::int64_t, 3>, std::size_t> id;
  const auto n = static_cast<Index>(p.ambient->count_within(window_radius));
  for (Index i = 0; i < n; ++i) {
    const auto& x = std::get<ZdElem>(p.ambient->element(i)).x;
    std::array<std::int64_t, 3> q{};
    for (int k = 0; k < d; ++k) q[static_cast<std::size_t>(k)] = floor_div(x[static_cast<std::size_t>(k)], side);
    auto [it, fresh] = id.try_emplace(q, p.pieces.size());
    if (fresh) {
      p.pieces.emplace_back();
      int c = 0;
      if (d == 1) {
        c = static_cast<int>(floor_div(q[0], 2) * 2 == q[0] ? 0 : 1);
      } else {
        for (int k = 0; k < d; ++k) c |= static_cast<int>(q[static_cast<std::size_t>(k)] & 1) << k;
      }
      p.color.push_back(c);
      // Largest l1 norm over the whole cube.
      std::int64_t far = 0;
      for (int k = 0; k < d; ++k) {
        const std::int64_t lo = q[static_cast<std::size_t>(k)] * side;
        far += std::max(std::abs(lo), std::abs(lo + side - 1));
      }
      p.clipped.push_back(far > window_radius);
    }
    p.pieces[it->second].push_back(i);
  }
  return p;  // indices ascend, so pieces are already sorted and ordered by smallest member
}

int greedy_margin(int r, const Rational& stretch) {
  return static_cast<int>(std::max<std::int64_t>(floor_times(stretch, r) / 2, (r + 1) / 2));
}

GreedyResult greedy_decomposition(BallPtr ambient, int r, int colors, const Rational& stretch, std::uint64_t seed,
                                  std::optional<int> window_radius) {
  if (r <= 1) throw DomainError("scale r must exceed 1");
  if (colors < 1) throw DomainError("color budget must be >= 1");
  if (stretch < 1) throw DomainError("stretch K must be >= 1");
  const Ball& b = *ambient;
  const int margin = greedy_margin(r, stretch);
  const int w = window_radius.value_or(b.radius() - margin);
  if (w < 0 || w + margin > b.radius())
    throw MarginError("greedy decomposition at scale " + std::to_string(r) + " needs ambient radius >= window + " +
                      std::to_string(margin) + " (have " + std::to_string(b.radius()) + ", window " +
                      std::to_string(w) + ")");
  const auto rho = static_cast<int>(floor_times(stretch, r) / 2);

  const auto n = static_cast<Index>(b.count_within(w));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (seed != 0) {
    auto key = [&](Index i) { return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))); };
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) {
      if (b.length(a) != b.length(c)) return b.length(a) < b.length(c);
      return key(a) < key(c);
    });
  }

  Partition p;
  p.ambient = ambient;
  p.scale = r;
  p.colors = colors;
  p.stretch = stretch;
  p.window_radius = w;
  p.method = "greedy";

  std::vector<std::int32_t> owner(b.size(), -1);
  BfsWorkspace ws(b.size());
  std::vector<Index> blocking(static_cast<std::size_t>(colors));
  for (Index c : order) {
    if (owner[static_cast<std::size_t>(c)] >= 0) continue;
    ws.run(b, std::span<const Index>(&c, 1), rho);
    std::vector<Index> piece;
    for (Index v : ws.visited())
      if (v < n && owner[static_cast<std::size_t>(v)] < 0) piece.push_back(v);
    std::sort(piece.begin(), piece.end());

    std::fill(blocking.begin(), blocking.end(), kOutside);
    ws.run(b, piece, r);
    for (Index v : ws.visited()) {
      const auto q = owner[static_cast<std::size_t>(v)];
      if (q >= 0) {
        auto& slot = blocking[static_cast<std::size_t>(p.color[static_cast<std::size_t>(q)])];
        if (slot == kOutside) slot = q;
      }
    }
    auto free = std::find(blocking.begin(), blocking.end(), kOutside);
    if (free == blocking.end()) {
      GreedyFailure f;
      f.element = c;
      f.piece = std::move(piece);
      for (Index q : blocking) f.blocking.push_back(static_cast<std::size_t>(q));
      f.message = "piece around " + b.group().format(b.element(c)) + " has pieces of all " + std::to_string(colors) +
                  " colors within distance " + std::to_string(r);
      return f;
    }
    const auto id = static_cast<std::int32_t>(p.pieces.size());
    for (Index v : piece) owner[static_cast<std::size_t>(v)] = id;
    p.color.push_back(static_cast<int>(free - blocking.begin()));
    p.clipped.push_back(b.length(c) + rho > w);
    p.pieces.push_back(std::move(piece));
  }
  sort_pieces(p);
  // The partition claims the colors it used, not the budget.
  p.colors = p.color.empty() ? 1 : *std::max_element(p.color.begin(), p.color.end()) + 1;

  const auto report = verify_decomposition(p);
  if (!report.valid) throw NumericalError("greedy decomposition failed its self-check: " + report.problem);
  return p;
}

DecompositionReport verify_decomposition(const Partition& p) {
  DecompositionReport rep;
  const Ball& b = *p.ambient;
  if (p.window_radius < 0 || p.window_radius > b.radius()) throw MarginError("window radius exceeds the ambient radius");
  const auto n_window = b.count_within(p.window_radius);

  // Structure first: it does not need any distances.
  std::vector<std::int32_t> owner(b.size(), -1);
  std::size_t covered = 0;
  auto fail = [&](std::string why) {
    rep.problem = std::move(why);
    return rep;
  };
  if (p.color.size() != p.pieces.size()) return fail("color list does not match the piece list");
  for (std::size_t i = 0; i < p.pieces.size(); ++i) {
    if (p.pieces[i].empty()) return fail("piece " + std::to_string(i) + " is empty");
    if (p.color[i] < 0 || p.color[i] >= p.colors) return fail("piece " + std::to_string(i) + " has color out of range");
    for (Index v : p.pieces[i]) {
      if (v < 0 || static_cast<std::size_t>(v) >= n_window)
        return fail("piece " + std::to_string(i) + " leaves the window");
      auto& o = owner[static_cast<std::size_t>(v)];
      if (o >= 0) return fail("pieces " + std::to_string(o) + " and " + std::to_string(i) + " overlap");
      o = static_cast<std::int32_t>(i);
      ++covered;
    }
  }
  if (covered != n_window) return fail("pieces do not cover the window");
  rep.invariants_ok = true;

  const auto np = static_cast<std::int64_t>(p.pieces.size());
  std::vector<DiameterBound> diam(p.pieces.size());
  // Per piece: distance to the nearest other piece of its color, or a lower bound.
  std::vector<int> gap(p.pieces.size(), -1);
  std::vector<char> gap_found(p.pieces.size(), 0);
  std::vector<char> has_mate(static_cast<std::size_t>(std::max(p.colors, 1)), 0);
  {
    std::vector<int> count(static_cast<std::size_t>(std::max(p.colors, 1)), 0);
    for (int c : p.color) ++count[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < count.size(); ++c) has_mate[c] = count[c] > 1;
  }
  std::vector<std::string> errors(p.pieces.size());
#pragma omp parallel
  {
    BfsWorkspace ws(b.size());
    std::vector<char> scratch(b.size(), 0);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t k = 0; k < np; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const auto piece = p.piece(i);
      diam[i] = diameter_bound(piece, ws, scratch);
      if (!has_mate[static_cast<std::size_t>(p.color[i])]) continue;
      const int cert = certified_depth(b, piece.max_length(), p.window_radius);
      if (cert < 0) {
        errors[i] = "ambient radius cannot certify gaps";
        continue;
      }
      const int mine = p.color[i];
      const Index hit = ws.run_until_hit(b, piece.members, cert, [&](Index v) {
        const auto o = owner[static_cast<std::size_t>(v)];
        return o >= 0 && static_cast<std::size_t>(o) != i && p.color[static_cast<std::size_t>(o)] == mine;
      });
      if (hit != kOutside) {
        gap[i] = ws.distance(hit);
        gap_found[i] = 1;
      } else {
        gap[i] = cert + 1;
      }
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw MarginError(e);

  rep.diameter_exact = true;
  for (const auto& d : diam) {
    rep.max_piece_diameter = std::max(rep.max_piece_diameter, d.value);
    rep.diameter_exact = rep.diameter_exact && d.exact;
  }
  int lower = -1, found = -1;
  for (std::size_t i = 0; i < gap.size(); ++i) {
    if (gap[i] < 0) continue;
    if (gap_found[i]) {
      found = found < 0 ? gap[i] : std::min(found, gap[i]);
    } else {
      lower = lower < 0 ? gap[i] : std::min(lower, gap[i]);
    }
  }
  if (found >= 0 || lower >= 0) {
    if (found >= 0 && (lower < 0 || found <= lower)) {
      rep.min_same_color_gap = found;
      rep.gap_exact = true;
    } else {
      rep.min_same_color_gap = lower;
    }
  }

  // diam <= K r, compared exactly.
  const bool diam_ok = Rational(rep.max_piece_diameter) <= p.stretch * p.scale;
  const bool gap_ok = !rep.min_same_color_gap || *rep.min_same_color_gap > p.scale;
  rep.valid = diam_ok && gap_ok;
  if (!diam_ok)
    rep.problem = "piece diameter " + std::to_string(rep.max_piece_diameter) + " exceeds K r = " +
                  to_string(p.stretch * p.scale);
  else if (!gap_ok)
    rep.problem = "two pieces of one color are " + std::to_string(*rep.min_same_color_gap) +
                  " apart, not more than r = " + std::to_string(p.scale);
  return rep;
}

ControlFit observed_control(const std::vector<Partition>& series) {
  ControlFit fit;
  if (series.empty()) return fit;
  const auto& group = series.front().ambient->group();
  for (const auto& p : series) {
    if (!(p.ambient->group() == group)) throw DomainError("observed_control over partitions of different groups");
    const auto rep = verify_decomposition(p);
    if (!rep.valid) throw DomainError("observed_control needs valid partitions: " + rep.problem);
    fit.samples.push_back({p.scale, rep.max_piece_diameter});
  }
  std::sort(fit.samples.begin(), fit.samples.end(),
            [](const ControlSample& a, const ControlSample& b) { return a.scale < b.scale; });
  if (fit.samples.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& s : fit.samples) {
      x.push_back(s.scale);
      y.push_back(s.max_piece_diameter);
    }
    fit.slope = least_squares(x, y).slope;
  }
  return fit;
}

}  // namespace coarse
