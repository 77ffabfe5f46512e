#pragma once

// Symmetric finitely supported step distributions μ and their operators on balls.

#include <cstdint>
#include <vector>

#include "coarse/cayley.hpp"
#include "coarse/kernels.hpp"

namespace coarse {

class StepDistribution {
 public:
  /// Validates: atoms valid and distinct, probabilities positive summing to 1,
  /// μ(s) = μ(s^-1), and the support generates (it reaches all of B(e, 3)).
  StepDistribution(GroupModel g, std::vector<Element> atoms, std::vector<double> probs);
  /// Simple random walk: uniform on the generators.
  static StepDistribution uniform(const GroupModel& g);

  const GroupModel& group() const { return group_; }
  const std::vector<Element>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }
  /// Largest word length of an atom.
  int max_atom_length() const { return max_len_; }
  /// atoms()[j] is generator generator_index()[j], or -1.
  const std::vector<int>& generator_index() const { return gen_index_; }
  /// μ(e), zero when e is not an atom.
  double mass_at_identity() const;

 private:
  GroupModel group_;
  std::vector<Element> atoms_;
  std::vector<double> probs_;
  std::vector<int> gen_index_;
  int max_len_ = 0;
};

/// The operator (P f)(x) = sum_s μ(s) f(x s) restricted to a ball, with f = 0
/// outside. For symmetric μ this is also the forward (convolution) step.
class StepOperator {
 public:
  StepOperator(const Ball& b, const StepDistribution& mu);
  kernels::StepTable table() const { return {targets_, weights_, weights_.size()}; }
  std::span<const Index> targets() const { return targets_; }

 private:
  std::vector<Index> targets_;
  std::vector<double> weights_;
};

}  // namespace coarse
