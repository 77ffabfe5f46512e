#pragma once

// Balls in the word metric and the geometry of finite subsets inside them.
//
// Distances are BFS distances inside an ambient ball B(e, R). A true geodesic
// of length D between x and y never leaves B(e, (l(x) + l(y) + D) / 2), so an
// in-ball distance between sets with max word lengths a and b is certified
// exact whenever it is at most 2R - a - b. Anything beyond that raises
// MarginError instead of silently treating the ball's edge as the group's.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coarse/group.hpp"

namespace coarse {

using Index = std::int32_t;
inline constexpr Index kOutside = -1;

/// Element cap for ball construction: the process override if set, else
/// COARSE_LAB_MEMCAP, else 2e7.
std::size_t default_element_cap();
/// Process-wide override (the CLI's --memcap); 0 clears it.
void set_element_cap(std::size_t cap);

class Ball {
 public:
  static std::shared_ptr<const Ball> build(const GroupModel& g, int radius, std::size_t cap = default_element_cap());

  const GroupModel& group() const { return group_; }
  int radius() const { return radius_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t degree() const { return group_.generators().size(); }

  const Element& element(Index i) const { return elements_[static_cast<std::size_t>(i)]; }
  int length(Index i) const { return lengths_[static_cast<std::size_t>(i)]; }
  /// x*s for each generator s, kOutside when x*s has length > radius.
  std::span<const Index> neighbors(Index i) const {
    return {adjacency_.data() + static_cast<std::size_t>(i) * degree(), degree()};
  }
  std::span<const Index> adjacency() const { return adjacency_; }

  std::optional<Index> find(const Element& e) const;
  std::optional<Index> find_key(const std::string& key) const;

  /// Sphere sizes s(0..R).
  const std::vector<std::size_t>& sphere_sizes() const { return spheres_; }
  /// Number of elements of length <= r; they occupy indices [0, count_within(r)).
  std::size_t count_within(int r) const;

  /// Flat size() x atoms.size() table of x*a (kOutside when outside the ball).
  std::vector<Index> step_table(std::span<const Element> atoms) const;

 private:
  explicit Ball(GroupModel g) : group_(std::move(g)) {}

  GroupModel group_;
  int radius_ = 0;
  std::vector<Element> elements_;
  std::vector<int> lengths_;
  std::vector<Index> adjacency_;
  std::vector<std::size_t> spheres_;
  std::unordered_map<std::string, Index> index_;
};

using BallPtr = std::shared_ptr<const Ball>;

BallPtr ball(const GroupModel& g, int radius, std::size_t cap = default_element_cap());

struct FiniteSubset {
  BallPtr ambient;
  std::vector<Index> members;  // sorted, unique

  /// Sorts and deduplicates; throws DomainError on indices outside the ball.
  static FiniteSubset of(BallPtr ambient, std::vector<Index> members);
  /// {x : l(x) <= r} as a subset of `ambient`.
  static FiniteSubset window(BallPtr ambient, int r);

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  bool contains(Index i) const;
  int max_length() const;
  /// Membership mask over the ambient ball.
  std::vector<char> mask() const;

  friend bool operator==(const FiniteSubset& a, const FiniteSubset& b) {
    return a.ambient == b.ambient && a.members == b.members;
  }
};

/// Reusable multi-source BFS over a ball's adjacency. Reset is O(visited).
class BfsWorkspace {
 public:
  explicit BfsWorkspace(std::size_t n);

  /// BFS from `sources` up to `depth_limit` (negative = unlimited).
  void run(const Ball& b, std::span<const Index> sources, int depth_limit);
  /// Same, but only vertices with allowed[v] != 0 are entered (sources always are).
  void run_within(const Ball& b, std::span<const Index> sources, int depth_limit, std::span<const char> allowed);

  /// BFS from `sources` that stops once every vertex with marked[v] != 0 is reached.
  /// Returns the distance of the last one found (-1 if some are unreachable).
  int run_until_covered(const Ball& b, std::span<const Index> sources, std::span<const char> marked,
                        std::size_t marked_count);

  /// BFS up to `depth_limit` that stops at the first vertex with hit(v); returns it
  /// (its distance via distance()) or kOutside. Sources are tested too.
  template <class Hit>
  Index run_until_hit(const Ball& b, std::span<const Index> sources, int depth_limit, Hit&& hit) {
    start(sources);
    for (Index s : order_)
      if (hit(s)) return s;
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
        if (hit(w)) return w;
      }
    }
    return kOutside;
  }

  int distance(Index v) const {
    return stamp_[static_cast<std::size_t>(v)] == epoch_ ? dist_[static_cast<std::size_t>(v)] : -1;
  }
  /// Reached vertices in nondecreasing distance order.
  std::span<const Index> visited() const { return order_; }

 private:
  void start(std::span<const Index> sources);

  std::vector<int> dist_;
  std::vector<std::uint32_t> stamp_;
  std::vector<Index> order_;
  std::uint32_t epoch_ = 0;
};

/// Largest distance certified exact between sets with the given max lengths.
int certified_depth(const Ball& b, int max_length_a, int max_length_b);

/// Inner boundary {x in A : some x*s lies outside A}.
FiniteSubset boundary(const FiniteSubset& a);
/// {x : d(x, A) <= n}.
FiniteSubset neighborhood(const FiniteSubset& a, int n);
int set_distance(const FiniteSubset& a, const FiniteSubset& b);

struct DiameterBound {
  int value = 0;
  bool exact = false;  // otherwise an upper bound from in-ball paths
};
/// Largest in-ball distance between members; always an upper bound on diam(A).
DiameterBound diameter_bound(const FiniteSubset& a);
/// Single-threaded variant for callers that already parallelize over many sets.
/// `scratch` must be all zero with one entry per ball element; it is left that way.
DiameterBound diameter_bound(const FiniteSubset& a, BfsWorkspace& ws, std::vector<char>& scratch);
/// min over members c of max over members x of the in-ball distance d(c, x), with
/// the minimizing member. Every member lies in the true ball B(c, value).
struct SetRadius {
  int value = 0;
  Index center = kOutside;
};
SetRadius set_radius(const FiniteSubset& a);

/// Exact diameter; MarginError when the ambient ball cannot certify it.
int diameter(const FiniteSubset& a);

/// Ball sizes v(0..rmax).
std::vector<std::size_t> growth(const GroupModel& g, int rmax, std::size_t cap = default_element_cap());

}  // namespace coarse
