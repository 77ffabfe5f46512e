#include "coarse/group.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

constexpr std::array<std::string_view, 7> kCatalogue = {"z1", "z2", "z3", "heis", "lamp", "bs12", "f2"};

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError("integer overflow in group arithmetic");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("integer overflow in group arithmetic");
  return out;
}

std::int64_t checked_neg(std::int64_t a) {
  if (a == INT64_MIN) throw OverflowError("integer overflow in group arithmetic");
  return -a;
}

std::int64_t shift_left_checked(std::int64_t a, std::int64_t bits) {
  if (a == 0) return 0;
  if (bits >= 63) throw OverflowError("dyadic numerator exceeds 63 bits");
  const std::int64_t limit = INT64_MAX >> bits;
  if (a > limit || a < -limit) throw OverflowError("dyadic numerator exceeds 63 bits");
  return a * (std::int64_t{1} << bits);
}

char invert_letter(char c) {
  switch (c) {
    case 'a': return 'A';
    case 'A': return 'a';
    case 'b': return 'B';
    case 'B': return 'b';
    default: throw InvalidElement(std::string("free-group letter out of alphabet: ") + c);
  }
}

// xor of two sorted lamp sets, the second shifted by `offset`.
std::vector<std::int64_t> toggle_shifted(const std::vector<std::int64_t>& base,
                                         const std::vector<std::int64_t>& other, std::int64_t offset) {
  std::vector<std::int64_t> out;
  out.reserve(base.size() + other.size());
  std::size_t i = 0, j = 0;
  while (i < base.size() || j < other.size()) {
    if (j == other.size()) {
      out.push_back(base[i++]);
      continue;
    }
    const std::int64_t shifted = checked_add(other[j], offset);
    if (i == base.size() || shifted < base[i]) {
      out.push_back(shifted);
      ++j;
    } else if (base[i] < shifted) {
      out.push_back(base[i++]);
    } else {
      ++i;
      ++j;
    }
  }
  return out;
}

void put_i64(std::string& out, std::int64_t v) {
  auto u = static_cast<std::uint64_t>(v);
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((u >> shift) & 0xff));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto first = s.data();
  auto last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) throw InvalidElement("bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::string_view strip_parens(std::string_view s) {
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw InvalidElement("expected parenthesised element: " + std::string(s));
  return s.substr(1, s.size() - 2);
}

}  // namespace

// ---------------------------------------------------------------------------

namespace dyadic {

Dyadic normalize(std::int64_t num, std::int64_t exp) {
  if (num == 0) return {0, 0};
  while (exp > 0 && (num % 2) == 0) {
    num /= 2;
    --exp;
  }
  if (exp < 0) {
    num = shift_left_checked(num, -exp);
    exp = 0;
  }
  return {num, exp};
}

Dyadic add(const Dyadic& a, const Dyadic& b) {
  const std::int64_t e = std::max(a.exp, b.exp);
  const std::int64_t na = shift_left_checked(a.num, e - a.exp);
  const std::int64_t nb = shift_left_checked(b.num, e - b.exp);
  return normalize(checked_add(na, nb), e);
}

Dyadic negate(const Dyadic& a) { return {checked_neg(a.num), a.exp}; }

Dyadic scale_pow2(const Dyadic& a, std::int64_t shift) {
  if (a.num == 0) return a;
  return normalize(a.num, a.exp - shift);
}

}  // namespace dyadic

// ---------------------------------------------------------------------------

std::span<const std::string_view> GroupModel::catalogue() { return kCatalogue; }

GroupModel GroupModel::from_name(std::string_view name) {
  GroupModel g;
  g.name_ = std::string(name);
  if (name == "z1" || name == "z2" || name == "z3") {
    g.kind_ = GroupKind::Zd;
    g.rank_ = name[1] - '0';
    g.dimension_hint_ = g.rank_;
    static constexpr std::array<char, 3> axis = {'x', 'y', 'z'};
    for (int i = 0; i < g.rank_; ++i) {
      for (int sign : {1, -1}) {
        ZdElem e;
        e.x[static_cast<std::size_t>(i)] = sign;
        g.generators_.emplace_back(e);
        g.generator_names_.push_back(std::string(1, sign > 0 ? axis[i] : static_cast<char>(axis[i] - 32)));
      }
    }
  } else if (name == "heis") {
    g.kind_ = GroupKind::Heisenberg;
    g.dimension_hint_ = 3;
    g.generators_ = {HeisElem{1, 0, 0}, HeisElem{-1, 0, 0}, HeisElem{0, 1, 0}, HeisElem{0, -1, 0}};
    g.generator_names_ = {"X", "x", "Y", "y"};
  } else if (name == "lamp") {
    g.kind_ = GroupKind::Lamplighter;
    g.dimension_hint_ = 1;
    g.generators_ = {LampElem{1, {}}, LampElem{-1, {}}, LampElem{0, {0}}};
    g.generator_names_ = {"t", "T", "a"};
  } else if (name == "bs12") {
    g.kind_ = GroupKind::BS12;
    g.dimension_hint_ = 2;
    g.generators_ = {BsElem{{1, 0}, 0}, BsElem{{-1, 0}, 0}, BsElem{{0, 0}, 1}, BsElem{{0, 0}, -1}};
    g.generator_names_ = {"a", "A", "t", "T"};
  } else if (name == "f2") {
    g.kind_ = GroupKind::Free2;
    g.dimension_hint_ = 1;
    g.generators_ = {FreeElem{"a"}, FreeElem{"A"}, FreeElem{"b"}, FreeElem{"B"}};
    g.generator_names_ = {"a", "A", "b", "B"};
  } else {
    throw DomainError("unknown group '" + std::string(name) + "' (expected one of z1 z2 z3 heis lamp bs12 f2)");
  }
  g.inverse_of_.resize(g.generators_.size());
  for (std::size_t i = 0; i < g.generators_.size(); ++i) {
    const Element inv = g.inverse(g.generators_[i]);
    auto it = std::find(g.generators_.begin(), g.generators_.end(), inv);
    g.inverse_of_[i] = static_cast<int>(it - g.generators_.begin());
  }
  return g;
}

Element GroupModel::identity() const {
  switch (kind_) {
    case GroupKind::Zd: return ZdElem{};
    case GroupKind::Heisenberg: return HeisElem{};
    case GroupKind::Lamplighter: return LampElem{};
    case GroupKind::BS12: return BsElem{};
    case GroupKind::Free2: return FreeElem{};
  }
  return ZdElem{};
}

bool GroupModel::is_identity(const Element& a) const { return a == identity(); }

bool GroupModel::is_valid(const Element& a) const {
  switch (kind_) {
    case GroupKind::Zd: {
      auto* e = std::get_if<ZdElem>(&a);
      if (!e) return false;
      for (std::size_t i = static_cast<std::size_t>(rank_); i < 3; ++i)
        if (e->x[i] != 0) return false;
      return true;
    }
    case GroupKind::Heisenberg: return std::holds_alternative<HeisElem>(a);
    case GroupKind::Lamplighter: {
      auto* e = std::get_if<LampElem>(&a);
      return e && std::adjacent_find(e->lamps.begin(), e->lamps.end(), std::greater_equal<>()) == e->lamps.end();
    }
    case GroupKind::BS12: {
      auto* e = std::get_if<BsElem>(&a);
      if (!e) return false;
      if (e->r.exp < 0) return false;
      if (e->r.num == 0) return e->r.exp == 0;
      return e->r.exp == 0 || (e->r.num % 2) != 0;
    }
    case GroupKind::Free2: {
      auto* e = std::get_if<FreeElem>(&a);
      if (!e) return false;
      for (std::size_t i = 0; i < e->word.size(); ++i) {
        const char c = e->word[i];
        if (c != 'a' && c != 'A' && c != 'b' && c != 'B') return false;
        if (i > 0 && e->word[i - 1] == invert_letter(c)) return false;
      }
      return true;
    }
  }
  return false;
}

void GroupModel::validate(const Element& a) const {
  if (!is_valid(a)) throw InvalidElement("malformed normal form for group " + name_);
}

Element GroupModel::multiply(const Element& a, const Element& b) const {
  validate(a);
  validate(b);
  return multiply_unchecked(a, b);
}

Element GroupModel::multiply_unchecked(const Element& a, const Element& b) const {
  switch (kind_) {
    case GroupKind::Zd: {
      const auto& p = std::get<ZdElem>(a);
      const auto& q = std::get<ZdElem>(b);
      ZdElem out;
      for (std::size_t i = 0; i < 3; ++i) out.x[i] = checked_add(p.x[i], q.x[i]);
      return out;
    }
    case GroupKind::Heisenberg: {
      const auto& p = std::get<HeisElem>(a);
      const auto& q = std::get<HeisElem>(b);
      return HeisElem{checked_add(p.x, q.x), checked_add(p.y, q.y),
                      checked_add(checked_add(p.z, q.z), checked_mul(p.x, q.y))};
    }
    case GroupKind::Lamplighter: {
      const auto& p = std::get<LampElem>(a);
      const auto& q = std::get<LampElem>(b);
      return LampElem{checked_add(p.cursor, q.cursor), toggle_shifted(p.lamps, q.lamps, p.cursor)};
    }
    case GroupKind::BS12: {
      const auto& p = std::get<BsElem>(a);
      const auto& q = std::get<BsElem>(b);
      return BsElem{dyadic::add(p.r, dyadic::scale_pow2(q.r, p.k)), checked_add(p.k, q.k)};
    }
    case GroupKind::Free2: {
      const auto& p = std::get<FreeElem>(a).word;
      const auto& q = std::get<FreeElem>(b).word;
      std::size_t cancel = 0;
      while (cancel < p.size() && cancel < q.size() && p[p.size() - 1 - cancel] == invert_letter(q[cancel])) ++cancel;
      FreeElem out;
      out.word.reserve(p.size() + q.size() - 2 * cancel);
      out.word.append(p, 0, p.size() - cancel);
      out.word.append(q, cancel, std::string::npos);
      return out;
    }
  }
  return a;
}

void GroupModel::right_multiply_generator(Element& a, int generator) const {
  const Element& s = generators_[static_cast<std::size_t>(generator)];
  switch (kind_) {
    case GroupKind::Zd: {
      auto& p = std::get<ZdElem>(a);
      const auto& q = std::get<ZdElem>(s);
      for (std::size_t i = 0; i < 3; ++i) p.x[i] += q.x[i];
      return;
    }
    case GroupKind::Heisenberg: {
      auto& p = std::get<HeisElem>(a);
      const auto& q = std::get<HeisElem>(s);
      p.z += p.x * q.y;
      p.x += q.x;
      p.y += q.y;
      return;
    }
    case GroupKind::Lamplighter: {
      auto& p = std::get<LampElem>(a);
      const auto& q = std::get<LampElem>(s);
      if (q.lamps.empty()) {
        p.cursor += q.cursor;
        return;
      }
      auto it = std::lower_bound(p.lamps.begin(), p.lamps.end(), p.cursor);
      if (it != p.lamps.end() && *it == p.cursor)
        p.lamps.erase(it);
      else
        p.lamps.insert(it, p.cursor);
      return;
    }
    case GroupKind::Free2: {
      auto& w = std::get<FreeElem>(a).word;
      const char c = std::get<FreeElem>(s).word[0];
      if (!w.empty() && w.back() == invert_letter(c))
        w.pop_back();
      else
        w.push_back(c);
      return;
    }
    case GroupKind::BS12: a = multiply_unchecked(a, s); return;
  }
}

Element GroupModel::inverse(const Element& a) const {
  validate(a);
  switch (kind_) {
    case GroupKind::Zd: {
      ZdElem out = std::get<ZdElem>(a);
      for (auto& v : out.x) v = checked_neg(v);
      return out;
    }
    case GroupKind::Heisenberg: {
      const auto& p = std::get<HeisElem>(a);
      return HeisElem{checked_neg(p.x), checked_neg(p.y), checked_add(checked_neg(p.z), checked_mul(p.x, p.y))};
    }
    case GroupKind::Lamplighter: {
      const auto& p = std::get<LampElem>(a);
      LampElem out{checked_neg(p.cursor), {}};
      out.lamps.reserve(p.lamps.size());
      for (auto l : p.lamps) out.lamps.push_back(checked_add(l, checked_neg(p.cursor)));
      return out;
    }
    case GroupKind::BS12: {
      const auto& p = std::get<BsElem>(a);
      return BsElem{dyadic::negate(dyadic::scale_pow2(p.r, checked_neg(p.k))), checked_neg(p.k)};
    }
    case GroupKind::Free2: {
      FreeElem out;
      const auto& w = std::get<FreeElem>(a).word;
      out.word.reserve(w.size());
      for (auto it = w.rbegin(); it != w.rend(); ++it) out.word.push_back(invert_letter(*it));
      return out;
    }
  }
  return a;
}

std::string GroupModel::encode(const Element& a) const {
  validate(a);
  std::string out;
  out.push_back(static_cast<char>(kind_));
  switch (kind_) {
    case GroupKind::Zd: {
      const auto& p = std::get<ZdElem>(a);
      for (int i = 0; i < rank_; ++i) put_i64(out, p.x[static_cast<std::size_t>(i)]);
      break;
    }
    case GroupKind::Heisenberg: {
      const auto& p = std::get<HeisElem>(a);
      put_i64(out, p.x);
      put_i64(out, p.y);
      put_i64(out, p.z);
      break;
    }
    case GroupKind::Lamplighter: {
      const auto& p = std::get<LampElem>(a);
      put_i64(out, p.cursor);
      for (auto l : p.lamps) put_i64(out, l);
      break;
    }
    case GroupKind::BS12: {
      const auto& p = std::get<BsElem>(a);
      put_i64(out, p.r.num);
      put_i64(out, p.r.exp);
      put_i64(out, p.k);
      break;
    }
    case GroupKind::Free2: out += std::get<FreeElem>(a).word; break;
  }
  return out;
}

std::string GroupModel::format(const Element& a) const {
  validate(a);
  std::ostringstream os;
  switch (kind_) {
    case GroupKind::Zd: {
      const auto& p = std::get<ZdElem>(a);
      os << '(';
      for (int i = 0; i < rank_; ++i) os << (i ? "," : "") << p.x[static_cast<std::size_t>(i)];
      os << ')';
      break;
    }
    case GroupKind::Heisenberg: {
      const auto& p = std::get<HeisElem>(a);
      os << '(' << p.x << ',' << p.y << ',' << p.z << ')';
      break;
    }
    case GroupKind::Lamplighter: {
      const auto& p = std::get<LampElem>(a);
      os << '(' << p.cursor << ";{";
      for (std::size_t i = 0; i < p.lamps.size(); ++i) os << (i ? "," : "") << p.lamps[i];
      os << "})";
      break;
    }
    case GroupKind::BS12: {
      const auto& p = std::get<BsElem>(a);
      os << '(' << p.r.num;
      if (p.r.exp != 0) os << "/2^" << p.r.exp;
      os << ',' << p.k << ')';
      break;
    }
    case GroupKind::Free2: {
      const auto& w = std::get<FreeElem>(a).word;
      os << (w.empty() ? "e" : w);
      break;
    }
  }
  return os.str();
}

Element GroupModel::parse(std::string_view text) const {
  Element out;
  switch (kind_) {
    case GroupKind::Zd: {
      auto parts = split(strip_parens(text), ',');
      if (static_cast<int>(parts.size()) != rank_) throw InvalidElement("wrong arity for " + name_);
      ZdElem e;
      for (std::size_t i = 0; i < parts.size(); ++i) e.x[i] = parse_int(parts[i]);
      out = e;
      break;
    }
    case GroupKind::Heisenberg: {
      auto parts = split(strip_parens(text), ',');
      if (parts.size() != 3) throw InvalidElement("wrong arity for heis");
      out = HeisElem{parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2])};
      break;
    }
    case GroupKind::Lamplighter: {
      auto body = strip_parens(text);
      auto semi = body.find(';');
      if (semi == std::string_view::npos) throw InvalidElement("lamplighter element needs 'cursor;{lamps}'");
      LampElem e;
      e.cursor = parse_int(body.substr(0, semi));
      auto lamps = body.substr(semi + 1);
      if (lamps.size() < 2 || lamps.front() != '{' || lamps.back() != '}') throw InvalidElement("bad lamp set");
      lamps = lamps.substr(1, lamps.size() - 2);
      if (!lamps.empty())
        for (auto p : split(lamps, ',')) e.lamps.push_back(parse_int(p));
      out = e;
      break;
    }
    case GroupKind::BS12: {
      auto parts = split(strip_parens(text), ',');
      if (parts.size() != 2) throw InvalidElement("wrong arity for bs12");
      BsElem e;
      auto frac = parts[0];
      auto slash = frac.find("/2^");
      if (slash == std::string_view::npos) {
        e.r = {parse_int(frac), 0};
      } else {
        e.r = {parse_int(frac.substr(0, slash)), parse_int(frac.substr(slash + 3))};
      }
      e.k = parse_int(parts[1]);
      out = e;
      break;
    }
    case GroupKind::Free2: out = FreeElem{text == "e" ? std::string() : std::string(text)}; break;
  }
  validate(out);
  return out;
}

Element GroupModel::evaluate(std::span<const int> word) const {
  Element acc = identity();
  for (int s : word) {
    if (s < 0 || static_cast<std::size_t>(s) >= generators_.size()) throw DomainError("generator index out of range");
    right_multiply_generator(acc, s);
  }
  return acc;
}

}  // namespace coarse
