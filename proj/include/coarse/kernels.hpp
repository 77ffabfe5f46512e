#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp; both produce
// bit-identical results (reductions use a fixed block decomposition).

#include <atomic>
#include <cstddef>
#include <exception>
#include <cstdint>
#include <span>
#include <vector>

namespace coarse::kernels {

/// Neighbour table of a Markov operator on a ball: row x holds `width` target
/// indices (-1 = outside the ball, contributes zero) with per-column weights.
struct StepTable {
  std::span<const std::int32_t> targets;
  std::span<const double> weights;
  std::size_t width = 0;
  std::size_t rows() const { return width == 0 ? 0 : targets.size() / width; }
};

inline constexpr std::size_t kReduceBlock = 4096;

namespace serial {
/// out[x] = sum_j w_j * in[target(x, j)].
void apply(const StepTable& op, std::span<const double> in, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
/// out = (a + b) / 2.
void average(std::span<const double> a, std::span<const double> b, std::span<double> out);
void scale(std::span<double> a, double factor);
/// sum_i (a_i - beta b_i)^2.
double diff_norm2(std::span<const double> a, std::span<const double> b, double beta);
}  // namespace serial

namespace omp {
void apply(const StepTable& op, std::span<const double> in, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
void average(std::span<const double> a, std::span<const double> b, std::span<double> out);
void scale(std::span<double> a, double factor);
double diff_norm2(std::span<const double> a, std::span<const double> b, double beta);

/// Runs fn(i) for i in [0, count); iterations must be independent. The first
/// exception thrown by any iteration is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t count, Fn&& fn) {
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(coarse_for_each_failure)
      if (!failure) failure = std::current_exception();
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (failure) std::rethrow_exception(failure);
}
}  // namespace omp

namespace serial {
template <class Fn>
void for_each_index(std::size_t count, Fn&& fn) {
  for (std::size_t i = 0; i < count; ++i) fn(i);
}
}  // namespace serial

enum class Backend { Serial, Parallel };

/// The kernel set for a backend, so solvers can be run against the serial reference.
struct Ops {
  void (*apply)(const StepTable&, std::span<const double>, std::span<double>);
  double (*dot)(std::span<const double>, std::span<const double>);
  double (*sum)(std::span<const double>);
  void (*average)(std::span<const double>, std::span<const double>, std::span<double>);
  void (*scale)(std::span<double>, double);
  double (*diff_norm2)(std::span<const double>, std::span<const double>, double);
};
const Ops& ops(Backend b);

/// Worker count OpenMP will use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace coarse::kernels
