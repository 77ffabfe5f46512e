#pragma once

#include <cstdint>
#include <vector>

#include "coarse/group.hpp"
#include "coarse/rng.hpp"

namespace coarse::testing {

inline std::vector<int> random_word(const GroupModel& g, CounterRng& rng, int max_len) {
  const auto len = static_cast<int>(rng.below(static_cast<std::uint32_t>(max_len + 1)));
  std::vector<int> w(static_cast<std::size_t>(len));
  for (auto& s : w) s = static_cast<int>(rng.below(static_cast<std::uint32_t>(g.generators().size())));
  return w;
}

/// Inverse word: reversed, each letter replaced by its inverse generator.
inline std::vector<int> inverse_word(const GroupModel& g, const std::vector<int>& w) {
  std::vector<int> out(w.rbegin(), w.rend());
  for (auto& s : out) s = g.inverse_generator(s);
  return out;
}

inline Element random_element(const GroupModel& g, CounterRng& rng, int max_len) {
  const auto w = random_word(g, rng, max_len);
  return g.evaluate(w);
}

}  // namespace coarse::testing

#include <optional>
#include <set>
#include <string>

#include "coarse/cayley.hpp"

namespace coarse::testing {

inline FiniteSubset subset_of(const BallPtr& b, const std::vector<Element>& elems) {
  std::vector<Index> idx;
  for (const auto& e : elems) idx.push_back(b->find(e).value());
  return FiniteSubset::of(b, std::move(idx));
}

inline std::vector<Element> z1_range(std::int64_t lo, std::int64_t hi) {
  std::vector<Element> out;
  for (auto k = lo; k <= hi; ++k) out.push_back(ZdElem{{k, 0, 0}});
  return out;
}

/// Word length by meet-in-the-middle search from e and from x, without any Ball.
inline std::optional<int> bidirectional_length(const GroupModel& g, const Element& x, int limit) {
  if (g.is_identity(x)) return 0;
  std::set<std::string> seen_a{g.encode(g.identity())}, seen_b{g.encode(x)};
  std::vector<Element> front_a{g.identity()}, front_b{x};
  int da = 0, db = 0;
  while (da + db < limit) {
    const bool grow_a = front_a.size() <= front_b.size();
    auto& front = grow_a ? front_a : front_b;
    auto& seen = grow_a ? seen_a : seen_b;
    const auto& other = grow_a ? seen_b : seen_a;
    std::vector<Element> next;
    bool met = false;
    for (const auto& y : front)
      for (const auto& s : g.generators()) {
        Element z = g.multiply(y, s);
        auto key = g.encode(z);
        if (other.count(key)) met = true;
        if (seen.insert(std::move(key)).second) next.push_back(std::move(z));
      }
    front = std::move(next);
    (grow_a ? da : db) += 1;
    if (met) return da + db;
  }
  return std::nullopt;
}

}  // namespace coarse::testing
