#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace coarse {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

/// "3/2", or "3" for integers.
std::string to_string(const Rational& q);
/// Accepts "3", "3/2" and finite decimals such as "1.5".
Rational parse_rational(std::string_view text);

}  // namespace coarse
