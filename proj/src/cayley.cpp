#include "coarse/cayley.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

#include "coarse/errors.hpp"
#include "coarse/kernels.hpp"

namespace coarse {

namespace {
std::atomic<std::size_t> cap_override{0};
}  // namespace

void set_element_cap(std::size_t cap) { cap_override = cap; }

std::size_t default_element_cap() {
  if (const std::size_t cap = cap_override.load()) return cap;
  if (const char* env = std::getenv("COARSE_LAB_MEMCAP")) {
    try {
      const long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw DomainError(std::string("COARSE_LAB_MEMCAP is not a positive integer: ") + env);
  }
  return 20'000'000;
}

BallPtr Ball::build(const GroupModel& g, int radius, std::size_t cap) {
  if (radius < 0) throw DomainError("ball radius must be >= 0");
  std::shared_ptr<Ball> b(new Ball(g));
  b->radius_ = radius;
  const std::size_t deg = b->degree();

  auto insert = [&](Element e, int len) -> Index {
    if (b->elements_.size() >= cap)
      throw ResourceError("ball of radius " + std::to_string(radius) + " in " + g.name() + " exceeds the element cap of " +
                          std::to_string(cap) + " (set --memcap or COARSE_LAB_MEMCAP)");
    const auto idx = static_cast<Index>(b->elements_.size());
    b->index_.emplace(g.encode(e), idx);
    b->elements_.push_back(std::move(e));
    b->lengths_.push_back(len);
    return idx;
  };

  insert(g.identity(), 0);
  b->spheres_.push_back(1);
  std::size_t level_begin = 0;
  for (int r = 1; r <= radius; ++r) {
    const std::size_t level_end = b->elements_.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (std::size_t s = 0; s < deg; ++s) {
        Element next = b->elements_[i];
        g.right_multiply_generator(next, static_cast<int>(s));
        if (!b->index_.contains(g.encode(next))) insert(std::move(next), r);
      }
    }
    b->spheres_.push_back(b->elements_.size() - level_end);
    level_begin = level_end;
  }

  b->adjacency_.assign(b->elements_.size() * deg, kOutside);
  for (std::size_t i = 0; i < b->elements_.size(); ++i) {
    for (std::size_t s = 0; s < deg; ++s) {
      Element next = b->elements_[i];
      g.right_multiply_generator(next, static_cast<int>(s));
      auto it = b->index_.find(g.encode(next));
      if (it != b->index_.end()) b->adjacency_[i * deg + s] = it->second;
    }
  }
  return b;
}

BallPtr ball(const GroupModel& g, int radius, std::size_t cap) { return Ball::build(g, radius, cap); }

std::optional<Index> Ball::find(const Element& e) const {
  if (!group_.is_valid(e)) return std::nullopt;
  return find_key(group_.encode(e));
}

std::optional<Index> Ball::find_key(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Ball::count_within(int r) const {
  if (r < 0) return 0;
  std::size_t total = 0;
  for (int k = 0; k <= std::min(r, radius_); ++k) total += spheres_[static_cast<std::size_t>(k)];
  return total;
}

std::vector<Index> Ball::step_table(std::span<const Element> atoms) const {
  for (const auto& a : atoms) group_.validate(a);
  std::vector<Index> table(size() * atoms.size(), kOutside);
  // Generator atoms reuse the adjacency; anything else is looked up.
  std::vector<int> as_generator(atoms.size(), -1);
  const auto gens = group_.generators();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    auto it = std::find(gens.begin(), gens.end(), atoms[j]);
    if (it != gens.end()) as_generator[j] = static_cast<int>(it - gens.begin());
  }
  kernels::omp::for_each_index(size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      if (as_generator[j] >= 0) {
        table[i * atoms.size() + j] = adjacency_[i * degree() + static_cast<std::size_t>(as_generator[j])];
      } else {
        auto hit = find(group_.multiply_unchecked(elements_[i], atoms[j]));
        if (hit) table[i * atoms.size() + j] = *hit;
      }
    }
  });
  return table;
}

// ---------------------------------------------------------------------------

FiniteSubset FiniteSubset::of(BallPtr ambient, std::vector<Index> members) {
  if (!ambient) throw DomainError("finite subset needs an ambient ball");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!members.empty() && (members.front() < 0 || static_cast<std::size_t>(members.back()) >= ambient->size()))
    throw DomainError("subset member outside the ambient ball");
  return FiniteSubset{std::move(ambient), std::move(members)};
}

FiniteSubset FiniteSubset::window(BallPtr ambient, int r) {
  if (r > ambient->radius()) throw MarginError("window radius exceeds the ambient ball radius");
  std::vector<Index> members(ambient->count_within(r));
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = static_cast<Index>(i);
  return FiniteSubset{std::move(ambient), std::move(members)};
}

bool FiniteSubset::contains(Index i) const { return std::binary_search(members.begin(), members.end(), i); }

int FiniteSubset::max_length() const {
  int m = 0;
  for (Index i : members) m = std::max(m, ambient->length(i));
  return m;
}

std::vector<char> FiniteSubset::mask() const {
  std::vector<char> m(ambient->size(), 0);
  for (Index i : members) m[static_cast<std::size_t>(i)] = 1;
  return m;
}

// ---------------------------------------------------------------------------

BfsWorkspace::BfsWorkspace(std::size_t n) : dist_(n, -1), stamp_(n, 0) { order_.reserve(64); }

void BfsWorkspace::start(std::span<const Index> sources) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  order_.clear();
  for (Index s : sources) {
    auto k = static_cast<std::size_t>(s);
    if (stamp_[k] == epoch_) continue;
    stamp_[k] = epoch_;
    dist_[k] = 0;
    order_.push_back(s);
  }
}

void BfsWorkspace::run(const Ball& b, std::span<const Index> sources, int depth_limit) {
  start(sources);
  const std::size_t deg = b.degree();
  const Index* adj = b.adjacency().data();
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const Index v = order_[head];
    const int d = dist_[static_cast<std::size_t>(v)];
    if (depth_limit >= 0 && d >= depth_limit) continue;
    const Index* row = adj + static_cast<std::size_t>(v) * deg;
    for (std::size_t s = 0; s < deg; ++s) {
      const Index w = row[s];
      if (w < 0) continue;
      auto k = static_cast<std::size_t>(w);
      if (stamp_[k] == epoch_) continue;
      stamp_[k] = epoch_;
      dist_[k] = d + 1;
      order_.push_back(w);
    }
  }
}

void BfsWorkspace::run_within(const Ball& b, std::span<const Index> sources, int depth_limit,
                              std::span<const char> allowed) {
  start(sources);
  const std::size_t deg = b.degree();
  const Index* adj = b.adjacency().data();
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const Index v = order_[head];
    const int d = dist_[static_cast<std::size_t>(v)];
    if (depth_limit >= 0 && d >= depth_limit) continue;
    const Index* row = adj + static_cast<std::size_t>(v) * deg;
    for (std::size_t s = 0; s < deg; ++s) {
      const Index w = row[s];
      if (w < 0) continue;
      auto k = static_cast<std::size_t>(w);
      if (stamp_[k] == epoch_ || !allowed[k]) continue;
      stamp_[k] = epoch_;
      dist_[k] = d + 1;
      order_.push_back(w);
    }
  }
}

int BfsWorkspace::run_until_covered(const Ball& b, std::span<const Index> sources, std::span<const char> marked,
                                    std::size_t marked_count) {
  start(sources);
  std::size_t found = 0;
  int last = 0;
  for (Index s : order_)
    if (marked[static_cast<std::size_t>(s)]) ++found;
  if (found >= marked_count) return 0;
  const std::size_t deg = b.degree();
  const Index* adj = b.adjacency().data();
  for (std::size_t head = 0; head < order_.size(); ++head) {
    const Index v = order_[head];
    const int d = dist_[static_cast<std::size_t>(v)];
    const Index* row = adj + static_cast<std::size_t>(v) * deg;
    for (std::size_t s = 0; s < deg; ++s) {
      const Index w = row[s];
      if (w < 0) continue;
      auto k = static_cast<std::size_t>(w);
      if (stamp_[k] == epoch_) continue;
      stamp_[k] = epoch_;
      dist_[k] = d + 1;
      order_.push_back(w);
      if (marked[k]) {
        last = d + 1;
        if (++found >= marked_count) return last;
      }
    }
  }
  return -1;
}

// ---------------------------------------------------------------------------

int certified_depth(const Ball& b, int max_length_a, int max_length_b) {
  return 2 * b.radius() - max_length_a - max_length_b;
}

FiniteSubset boundary(const FiniteSubset& a) {
  const Ball& b = *a.ambient;
  if (!a.empty() && a.max_length() + 1 > b.radius())
    throw MarginError("boundary needs ambient radius >= max length + 1 (have " + std::to_string(b.radius()) +
                      ", need " + std::to_string(a.max_length() + 1) + ")");
  const auto in = a.mask();
  std::vector<Index> out;
  for (Index x : a.members) {
    for (Index y : b.neighbors(x)) {
      if (y < 0 || !in[static_cast<std::size_t>(y)]) {
        out.push_back(x);
        break;
      }
    }
  }
  return FiniteSubset{a.ambient, std::move(out)};
}

FiniteSubset neighborhood(const FiniteSubset& a, int n) {
  if (n < 0) throw DomainError("neighborhood radius must be >= 0");
  const Ball& b = *a.ambient;
  if (!a.empty() && a.max_length() + n > b.radius())
    throw MarginError("neighborhood of radius " + std::to_string(n) + " needs ambient radius >= " +
                      std::to_string(a.max_length() + n) + " (have " + std::to_string(b.radius()) + ")");
  BfsWorkspace ws(b.size());
  ws.run(b, a.members, n);
  std::vector<Index> out(ws.visited().begin(), ws.visited().end());
  std::sort(out.begin(), out.end());
  return FiniteSubset{a.ambient, std::move(out)};
}

int set_distance(const FiniteSubset& a, const FiniteSubset& b) {
  if (a.empty() || b.empty()) throw DomainError("set_distance of an empty set");
  if (a.ambient != b.ambient) throw DomainError("set_distance across different ambient balls");
  const Ball& ball = *a.ambient;
  const int cert = certified_depth(ball, a.max_length(), b.max_length());
  if (cert < 0) throw MarginError("ambient ball too small to certify any distance");
  BfsWorkspace ws(ball.size());
  ws.run(ball, a.members, cert);
  int best = -1;
  for (Index y : b.members) {
    const int d = ws.distance(y);
    if (d >= 0 && (best < 0 || d < best)) best = d;
  }
  if (best < 0)
    throw MarginError("sets are farther apart than the ambient ball can certify (> " + std::to_string(cert) + ")");
  return best;
}

DiameterBound diameter_bound(const FiniteSubset& a) {
  if (a.empty()) throw DomainError("diameter of an empty set");
  BfsWorkspace ws(a.ambient->size());
  std::vector<char> scratch(a.ambient->size(), 0);
  return diameter_bound(a, ws, scratch);
}

// Eccentricity bounds (Takes & Kosters, "bounding diameters") restricted to the
// members of A: a BFS from v with eccentricity e gives, for every member w,
// max(e - d(v,w), d(v,w)) <= ecc(w) <= e + d(v,w). Members whose upper bound
// cannot beat the best eccentricity seen are dropped.
DiameterBound diameter_bound(const FiniteSubset& a, BfsWorkspace& ws, std::vector<char>& scratch) {
  if (a.empty()) throw DomainError("diameter of an empty set");
  const Ball& b = *a.ambient;
  const std::size_t m = a.size();
  for (Index i : a.members) scratch[static_cast<std::size_t>(i)] = 1;
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> lo(m, 0), hi(m, kInf);
  std::vector<std::size_t> live(m);
  std::iota(live.begin(), live.end(), 0);
  int best = 0;
  bool pick_high = true;
  while (!live.empty()) {
    auto chosen = live.front();
    for (auto k : live) {
      if (pick_high ? hi[k] > hi[chosen] : lo[k] < lo[chosen]) chosen = k;
    }
    pick_high = !pick_high;
    const Index src = a.members[chosen];
    const int ecc = ws.run_until_covered(b, std::span<const Index>(&src, 1), scratch, m);
    best = std::max(best, ecc);
    std::size_t keep = 0;
    for (auto k : live) {
      const int d = ws.distance(a.members[k]);
      lo[k] = std::max({lo[k], ecc - d, d});
      hi[k] = std::min(hi[k], ecc + d);
      best = std::max(best, lo[k]);
      if (k != chosen && hi[k] > best && lo[k] != hi[k]) live[keep++] = k;
    }
    live.resize(keep);
  }
  for (Index i : a.members) scratch[static_cast<std::size_t>(i)] = 0;
  return {best, best <= certified_depth(b, a.max_length(), a.max_length())};
}

SetRadius set_radius(const FiniteSubset& a) {
  if (a.empty()) throw DomainError("radius of an empty set");
  const Ball& b = *a.ambient;
  const std::size_t m = a.size();
  BfsWorkspace ws(b.size());
  auto marked = a.mask();
  // Same bounds as diameter_bound; here a member is dropped once its lower bound
  // cannot undercut the best eccentricity found.
  std::vector<int> lo(m, 0);
  std::vector<std::size_t> live(m);
  std::iota(live.begin(), live.end(), 0);
  SetRadius best{std::numeric_limits<int>::max(), kOutside};
  while (!live.empty()) {
    auto chosen = live.front();
    for (auto k : live)
      if (lo[k] < lo[chosen]) chosen = k;
    const Index src = a.members[chosen];
    const int ecc = ws.run_until_covered(b, std::span<const Index>(&src, 1), marked, m);
    if (ecc < best.value) best = {ecc, src};
    std::size_t keep = 0;
    for (auto k : live) {
      const int d = ws.distance(a.members[k]);
      lo[k] = std::max({lo[k], ecc - d, d});
      if (k != chosen && lo[k] < best.value) live[keep++] = k;
    }
    live.resize(keep);
  }
  return best;
}

int diameter(const FiniteSubset& a) {
  const auto d = diameter_bound(a);
  if (!d.exact)
    throw MarginError("ambient radius " + std::to_string(a.ambient->radius()) + " cannot certify a diameter of " +
                      std::to_string(d.value) + " for a set reaching length " + std::to_string(a.max_length()));
  return d.value;
}

std::vector<std::size_t> growth(const GroupModel& g, int rmax, std::size_t cap) {
  auto b = Ball::build(g, rmax, cap);
  std::vector<std::size_t> v;
  std::size_t total = 0;
  for (auto s : b->sphere_sizes()) v.push_back(total += s);
  return v;
}

}  // namespace coarse
