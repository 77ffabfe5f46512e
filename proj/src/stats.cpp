#include "coarse/stats.hpp"

#include "coarse/errors.hpp"

namespace coarse {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("least squares needs at least two points");
  const auto m = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw DomainError("least squares needs at least two distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace coarse
