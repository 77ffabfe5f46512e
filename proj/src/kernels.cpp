#include "coarse/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coarse::kernels {

namespace {

inline double row_value(const StepTable& op, std::span<const double> in, std::size_t x) {
  double acc = 0.0;
  const std::int32_t* row = op.targets.data() + x * op.width;
  for (std::size_t j = 0; j < op.width; ++j) {
    const std::int32_t y = row[j];
    if (y >= 0) acc += op.weights[j] * in[static_cast<std::size_t>(y)];
  }
  return acc;
}

std::size_t block_count(std::size_t n) { return (n + kReduceBlock - 1) / kReduceBlock; }

template <class Term>
double block_partial(std::size_t block, std::size_t n, Term term) {
  const std::size_t lo = block * kReduceBlock;
  const std::size_t hi = std::min(n, lo + kReduceBlock);
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) acc += term(i);
  return acc;
}

double finish(const std::vector<double>& partials) {
  double acc = 0.0;
  for (double p : partials) acc += p;
  return acc;
}

}  // namespace

namespace serial {

void apply(const StepTable& op, std::span<const double> in, std::span<double> out) {
  const std::size_t n = op.rows();
  for (std::size_t x = 0; x < n; ++x) out[x] = row_value(op, in, x);
}

double dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> partials(block_count(a.size()));
  for (std::size_t k = 0; k < partials.size(); ++k)
    partials[k] = block_partial(k, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
  return finish(partials);
}

double sum(std::span<const double> a) {
  std::vector<double> partials(block_count(a.size()));
  for (std::size_t k = 0; k < partials.size(); ++k)
    partials[k] = block_partial(k, a.size(), [&](std::size_t i) { return a[i]; });
  return finish(partials);
}

void average(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (a[i] + b[i]);
}

void scale(std::span<double> a, double factor) {
  for (auto& v : a) v *= factor;
}

double diff_norm2(std::span<const double> a, std::span<const double> b, double beta) {
  std::vector<double> partials(block_count(a.size()));
  for (std::size_t k = 0; k < partials.size(); ++k)
    partials[k] = block_partial(k, a.size(), [&](std::size_t i) {
      const double d = a[i] - beta * b[i];
      return d * d;
    });
  return finish(partials);
}

}  // namespace serial

namespace omp {

void apply(const StepTable& op, std::span<const double> in, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(op.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t x = 0; x < n; ++x) out[static_cast<std::size_t>(x)] = row_value(op, in, static_cast<std::size_t>(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> partials(block_count(a.size()));
  const auto nb = static_cast<std::int64_t>(partials.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < nb; ++k)
    partials[static_cast<std::size_t>(k)] =
        block_partial(static_cast<std::size_t>(k), a.size(), [&](std::size_t i) { return a[i] * b[i]; });
  return finish(partials);
}

double sum(std::span<const double> a) {
  std::vector<double> partials(block_count(a.size()));
  const auto nb = static_cast<std::int64_t>(partials.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < nb; ++k)
    partials[static_cast<std::size_t>(k)] =
        block_partial(static_cast<std::size_t>(k), a.size(), [&](std::size_t i) { return a[i]; });
  return finish(partials);
}

void average(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = 0.5 * (a[k] + b[k]);
  }
}

void scale(std::span<double> a, double factor) {
  const auto n = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] *= factor;
}

double diff_norm2(std::span<const double> a, std::span<const double> b, double beta) {
  std::vector<double> partials(block_count(a.size()));
  const auto nb = static_cast<std::int64_t>(partials.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < nb; ++k)
    partials[static_cast<std::size_t>(k)] = block_partial(static_cast<std::size_t>(k), a.size(), [&](std::size_t i) {
      const double d = a[i] - beta * b[i];
      return d * d;
    });
  return finish(partials);
}

}  // namespace omp

const Ops& ops(Backend b) {
  static const Ops kSerial{serial::apply, serial::dot, serial::sum, serial::average, serial::scale, serial::diff_norm2};
  static const Ops kParallel{omp::apply, omp::dot, omp::sum, omp::average, omp::scale, omp::diff_norm2};
  return b == Backend::Serial ? kSerial : kParallel;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace coarse::kernels
