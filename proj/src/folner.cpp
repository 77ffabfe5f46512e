#include "coarse/folner.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "coarse/errors.hpp"

namespace coarse {

Rational folner_ratio(const FiniteSubset& f) {
  if (f.empty()) throw DomainError("Følner ratio of an empty set");
  return {static_cast<std::int64_t>(boundary(f).size()), static_cast<std::int64_t>(f.size())};
}

CoupleSearch couple_from_decomposition(const Partition& p, int n) {
  if (n < 1) throw DomainError("couple separation n must be >= 1");
  if (p.scale != 2 * n)
    throw DomainError("couples at n = " + std::to_string(n) + " need a partition at scale " + std::to_string(2 * n) +
                      ", got " + std::to_string(p.scale));
  const Ball& b = *p.ambient;
  if (p.window_radius + n > b.radius())
    throw MarginError("ambient radius " + std::to_string(b.radius()) + " is below window + n = " +
                      std::to_string(p.window_radius + n));

  CoupleSearch out;
  std::vector<std::size_t> weight(static_cast<std::size_t>(p.colors), 0);
  std::vector<std::size_t> core;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.clipped[i]) continue;
    core.push_back(i);
    weight[static_cast<std::size_t>(p.color[i])] += p.pieces[i].size();
  }
  out.color_order.resize(static_cast<std::size_t>(p.colors));
  std::iota(out.color_order.begin(), out.color_order.end(), 0);
  std::stable_sort(out.color_order.begin(), out.color_order.end(), [&](int x, int y) {
    return weight[static_cast<std::size_t>(x)] > weight[static_cast<std::size_t>(y)];
  });

  std::vector<std::size_t> expanded(core.size());
#pragma omp parallel
  {
    BfsWorkspace ws(b.size());
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(core.size()); ++k) {
      const auto i = core[static_cast<std::size_t>(k)];
      ws.run(b, p.pieces[i], n);
      expanded[static_cast<std::size_t>(k)] = ws.visited().size();
    }
  }

  const auto c = static_cast<std::size_t>(p.colors);
  std::optional<std::size_t> chosen;
  for (int col : out.color_order) {
    for (std::size_t k = 0; k < core.size(); ++k) {
      const auto i = core[k];
      if (p.color[i] != col) continue;
      const auto size = p.pieces[i].size();
      const bool ok = expanded[k] <= c * size;
      out.scanned.push_back({i, col, size, expanded[k], ok});
      const Rational r(static_cast<std::int64_t>(expanded[k]), static_cast<std::int64_t>(size));
      if (!out.best_ratio || r < *out.best_ratio) out.best_ratio = r;
      if (ok && !chosen) chosen = i;
    }
  }
  if (!chosen) return out;

  FolnerCouple cpl;
  cpl.f_prime = p.piece(*chosen);
  cpl.f = neighborhood(cpl.f_prime, n);
  cpl.n = n;
  cpl.C = Rational(p.colors);
  cpl.ratio = Rational(static_cast<std::int64_t>(cpl.f.size()), static_cast<std::int64_t>(cpl.f_prime.size()));
  cpl.diam_piece = diameter_bound(cpl.f_prime);
  cpl.diam_f = diameter_bound(cpl.f);
  cpl.claimed_bound = p.stretch * (2 * n) + 2 * n;
  cpl.observed_bound = cpl.diam_piece.value + 2 * n;
  cpl.piece = *chosen;
  cpl.color = p.color[*chosen];
  out.couple = std::move(cpl);
  return out;
}

CoupleReport verify_couple(const FolnerCouple& c, const Rational& C, int n, std::optional<Rational> diameter_bound) {
  if (n < 1) throw DomainError("couple separation n must be >= 1");
  if (c.f_prime.empty()) throw DomainError("couple with an empty F'");
  CoupleReport rep;
  rep.ok_subset = std::includes(c.f.members.begin(), c.f.members.end(), c.f_prime.members.begin(),
                                c.f_prime.members.end());
  rep.ok_ratio = Rational(static_cast<std::int64_t>(c.f.size())) <= C * static_cast<std::int64_t>(c.f_prime.size());
  // d(F', G \ F) >= n exactly when every point within n-1 of F' is in F.
  const auto grown = neighborhood(c.f_prime, n - 1);
  rep.ok_separation =
      std::includes(c.f.members.begin(), c.f.members.end(), grown.members.begin(), grown.members.end());
  if (diameter_bound) {
    if (Rational(c.diam_f.value) <= *diameter_bound) {
      rep.ok_diameter = true;
    } else if (c.diam_f.exact) {
      rep.ok_diameter = false;
    } else {
      throw MarginError("in-ball diameter " + std::to_string(c.diam_f.value) + " exceeds the bound " +
                        to_string(*diameter_bound) + " and the ambient ball cannot certify the true value");
    }
  }
  rep.valid = rep.ok_subset && rep.ok_ratio && rep.ok_separation && rep.ok_diameter.value_or(true);
  return rep;
}

namespace {

// Inner boundary count of an explicitly listed set with a membership test.
std::size_t count_boundary(const GroupModel& g, const std::vector<Element>& members,
                           const std::function<bool(const Element&)>& contains) {
  std::size_t count = 0;
  const auto m = static_cast<std::int64_t>(members.size());
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto& x = members[static_cast<std::size_t>(i)];
    for (std::size_t s = 0; s < g.generators().size(); ++s) {
      Element y = x;
      g.right_multiply_generator(y, static_cast<int>(s));
      if (!contains(y)) {
        ++count;
        break;
      }
    }
  }
  return count;
}

ScanRow row(int n, std::size_t size, std::size_t bd) {
  return {n, size, bd, Rational(static_cast<std::int64_t>(bd), static_cast<std::int64_t>(size))};
}

}  // namespace

std::vector<ScanRow> folner_scan(const GroupModel& g, std::string_view family, int nmax, std::size_t cap) {
  if (nmax < 1) throw DomainError("folner_scan needs nmax >= 1");
  std::vector<ScanRow> out;
  if (family == "balls") {
    auto b = Ball::build(g, nmax + 1, cap);
    for (int n = 1; n <= nmax; ++n) {
      auto f = FiniteSubset::window(b, n);
      out.push_back(row(n, f.size(), boundary(f).size()));
    }
    return out;
  }
  if (family == "boxes") {
    if (g.kind() == GroupKind::Zd) {
      const int d = g.rank();
      for (int n = 1; n <= nmax; ++n) {
        std::size_t size = 1;
        for (int k = 0; k < d; ++k) size *= static_cast<std::size_t>(n);
        if (size > cap) throw ResourceError("box of side " + std::to_string(n) + " exceeds the element cap");
        std::vector<Element> members;
        members.reserve(size);
        for (std::size_t code = 0; code < size; ++code) {
          ZdElem e{};
          auto rest = code;
          for (int k = 0; k < d; ++k, rest /= static_cast<std::size_t>(n))
            e.x[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(n));
          members.push_back(e);
        }
        auto contains = [&](const Element& y) {
          const auto& x = std::get<ZdElem>(y).x;
          for (int k = 0; k < d; ++k)
            if (x[static_cast<std::size_t>(k)] < 0 || x[static_cast<std::size_t>(k)] >= n) return false;
          return true;
        };
        out.push_back(row(n, size, count_boundary(g, members, contains)));
      }
      return out;
    }
    if (g.kind() == GroupKind::Heisenberg) {
      for (int n = 1; n <= nmax; ++n) {
        const std::int64_t nn = n, zz = nn * nn;
        const auto size = static_cast<std::size_t>(nn * nn * zz);
        if (size > cap) throw ResourceError("box of side " + std::to_string(n) + " exceeds the element cap");
        std::vector<Element> members;
        members.reserve(size);
        for (std::int64_t x = 0; x < nn; ++x)
          for (std::int64_t y = 0; y < nn; ++y)
            for (std::int64_t z = 0; z < zz; ++z) members.push_back(HeisElem{x, y, z});
        auto contains = [&](const Element& e) {
          const auto& h = std::get<HeisElem>(e);
          return h.x >= 0 && h.x < nn && h.y >= 0 && h.y < nn && h.z >= 0 && h.z < zz;
        };
        out.push_back(row(n, size, count_boundary(g, members, contains)));
      }
      return out;
    }
    throw DomainError("boxes are defined for z1, z2, z3 and heis only");
  }
  if (family == "lamp-intervals") {
    if (g.kind() != GroupKind::Lamplighter) throw DomainError("lamp-intervals are defined for lamp only");
    for (int n = 1; n <= nmax; ++n) {
      if (n >= 40 || (static_cast<std::size_t>(n) << n) > cap)
        throw ResourceError("lamp interval of size " + std::to_string(n) + " exceeds the element cap");
      std::vector<Element> members;
      for (std::int64_t c = 0; c < n; ++c)
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
          LampElem e{c, {}};
          for (int k = 0; k < n; ++k)
            if (mask >> k & 1) e.lamps.push_back(k);
          members.push_back(std::move(e));
        }
      auto contains = [&](const Element& y) {
        const auto& e = std::get<LampElem>(y);
        if (e.cursor < 0 || e.cursor >= n) return false;
        return e.lamps.empty() || (e.lamps.front() >= 0 && e.lamps.back() < n);
      };
      out.push_back(row(n, members.size(), count_boundary(g, members, contains)));
    }
    return out;
  }
  throw DomainError("unknown shape family '" + std::string(family) + "' (balls, boxes, lamp-intervals)");
}

MassTransport mass_transport_check(const std::vector<FiniteSubset>& a, const std::vector<FiniteSubset>& b,
                                   const Rational& lambda) {
  if (a.size() != b.size()) throw DomainError("mass transport needs matching families");
  if (lambda <= 0) throw DomainError("mass transport needs lambda > 0");
  MassTransport out;
  std::vector<Index> all;
  for (const auto& s : b) all.insert(all.end(), s.members.begin(), s.members.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) throw DomainError("the sets B_i overlap");

  out.hypotheses = true;
  std::vector<Index> all_a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool nested = std::includes(b[i].members.begin(), b[i].members.end(), a[i].members.begin(),
                                      a[i].members.end());
    const bool large = Rational(static_cast<std::int64_t>(b[i].size())) >=
                       lambda * static_cast<std::int64_t>(a[i].size());
    out.hypotheses = out.hypotheses && nested && large;
    all_a.insert(all_a.end(), a[i].members.begin(), a[i].members.end());
  }
  std::sort(all_a.begin(), all_a.end());
  out.union_a = static_cast<std::size_t>(std::unique(all_a.begin(), all_a.end()) - all_a.begin());
  out.union_b = all.size();
  const Rational lhs = lambda * static_cast<std::int64_t>(out.union_a);
  const Rational rhs(static_cast<std::int64_t>(out.union_b));
  out.conclusion = lhs <= rhs;
  out.equality = lhs == rhs;
  return out;
}

}  // namespace coarse
