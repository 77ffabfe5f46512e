#pragma once

// Element arithmetic for the fixed catalogue of finitely generated groups.
//
//   z1, z2, z3  free abelian Z^d, generators +-e_i
//   heis        integer Heisenberg group, (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y'),
//               generators X^{+-1}, Y^{+-1}
//   lamp        lamplighter Z wr Z/2, (c,L)(c',L') = (c+c', L xor (L'+c)),
//               generators t^{+-1} and the lamp toggle a
//   bs12        Baumslag-Solitar BS(1,2) as Z[1/2] x| Z, (r,k)(r',k') = (r + 2^k r', k+k'),
//               generators a^{+-1} = (+-1,0), t^{+-1} = (0,+-1)
//   f2          free group on a, b; reduced words over {a,A,b,B} (capital = inverse)
//
// Generators act on the right: the Cayley graph has edges x -- x*s.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coarse {

struct ZdElem {
  std::array<std::int64_t, 3> x{};
  friend bool operator==(const ZdElem&, const ZdElem&) = default;
};

struct HeisElem {
  std::int64_t x = 0, y = 0, z = 0;
  friend bool operator==(const HeisElem&, const HeisElem&) = default;
};

struct LampElem {
  std::int64_t cursor = 0;
  std::vector<std::int64_t> lamps;  // strictly increasing
  friend bool operator==(const LampElem&, const LampElem&) = default;
};

/// num / 2^exp with an odd numerator (or num = 0, exp = 0).
struct Dyadic {
  std::int64_t num = 0;
  std::int64_t exp = 0;
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

struct BsElem {
  Dyadic r;
  std::int64_t k = 0;
  friend bool operator==(const BsElem&, const BsElem&) = default;
};

struct FreeElem {
  std::string word;  // reduced, letters in "aAbB"
  friend bool operator==(const FreeElem&, const FreeElem&) = default;
};

using Element = std::variant<ZdElem, HeisElem, LampElem, BsElem, FreeElem>;

enum class GroupKind { Zd, Heisenberg, Lamplighter, BS12, Free2 };

namespace dyadic {
Dyadic normalize(std::int64_t num, std::int64_t exp);
Dyadic add(const Dyadic& a, const Dyadic& b);
Dyadic negate(const Dyadic& a);
/// a * 2^shift, shift of either sign.
Dyadic scale_pow2(const Dyadic& a, std::int64_t shift);
}  // namespace dyadic

class GroupModel {
 public:
  /// Catalogue lookup: "z1", "z2", "z3", "heis", "lamp", "bs12", "f2".
  static GroupModel from_name(std::string_view name);
  static std::span<const std::string_view> catalogue();

  const std::string& name() const { return name_; }
  GroupKind kind() const { return kind_; }
  /// d for Z^d, 0 otherwise.
  int rank() const { return rank_; }
  std::optional<int> dimension_hint() const { return dimension_hint_; }
  bool amenable() const { return kind_ != GroupKind::Free2; }

  std::span<const Element> generators() const { return generators_; }
  std::span<const std::string> generator_names() const { return generator_names_; }
  /// Position of the inverse of generator i in generators().
  int inverse_generator(int i) const { return inverse_of_[static_cast<std::size_t>(i)]; }

  Element identity() const;
  bool is_identity(const Element& a) const;

  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  /// Canonical byte key; injective on valid normal forms of this group.
  std::string encode(const Element& a) const;
  /// Human-readable canonical form; parse(format(a)) == a.
  std::string format(const Element& a) const;
  Element parse(std::string_view text) const;

  /// Throws InvalidElement unless `a` is a valid normal form for this group.
  void validate(const Element& a) const;
  bool is_valid(const Element& a) const;

  /// Product of generators listed by index, left to right.
  Element evaluate(std::span<const int> word) const;

  // Unchecked fast paths for the BFS and walk engines; inputs must be valid.
  Element multiply_unchecked(const Element& a, const Element& b) const;
  void right_multiply_generator(Element& a, int generator) const;

  friend bool operator==(const GroupModel& a, const GroupModel& b) { return a.name_ == b.name_; }

 private:
  GroupModel() = default;

  std::string name_;
  GroupKind kind_ = GroupKind::Zd;
  int rank_ = 0;
  std::optional<int> dimension_hint_;
  std::vector<Element> generators_;
  std::vector<std::string> generator_names_;
  std::vector<int> inverse_of_;
};

}  // namespace coarse
