#include "coarse/rational.hpp"

#include <charconv>

#include "coarse/errors.hpp"

namespace coarse {

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw DomainError("not a rational number: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
    return {parse_int(text.substr(0, slash), text), den};
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 12) throw DomainError("too many decimals in '" + std::string(text) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::string digits(text.substr(0, dot));
    digits += frac;
    return {parse_int(digits, text), den};
  }
  return {parse_int(text, text), 1};
}

}  // namespace coarse
