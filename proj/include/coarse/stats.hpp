#pragma once

#include <span>

namespace coarse {

struct LineFit {
  double slope = 0;
  double intercept = 0;
};

/// Ordinary least squares y ~ intercept + slope x; DomainError with < 2 distinct x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace coarse
