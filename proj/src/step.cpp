#include "coarse/step.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

// Atoms are looked up in a ball of this radius to get their lengths.
constexpr int kAtomRadius = 8;

}  // namespace

StepDistribution::StepDistribution(GroupModel g, std::vector<Element> atoms, std::vector<double> probs)
    : group_(std::move(g)), atoms_(std::move(atoms)), probs_(std::move(probs)) {
  if (atoms_.empty() || atoms_.size() != probs_.size()) throw DomainError("step distribution needs one probability per atom");
  double total = 0;
  std::set<std::string> keys;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    group_.validate(atoms_[j]);
    if (!(probs_[j] > 0)) throw DomainError("step probabilities must be positive");
    if (!keys.insert(group_.encode(atoms_[j])).second) throw DomainError("step distribution lists an atom twice");
    total += probs_[j];
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("step probabilities sum to " + std::to_string(total) + ", not 1");
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    const auto inv = group_.inverse(atoms_[j]);
    auto it = std::find(atoms_.begin(), atoms_.end(), inv);
    if (it == atoms_.end()) throw DomainError("step distribution is not symmetric: " + group_.format(atoms_[j]) +
                                              " has no inverse atom");
    if (std::abs(probs_[static_cast<std::size_t>(it - atoms_.begin())] - probs_[j]) > 1e-15)
      throw DomainError("step distribution is not symmetric at " + group_.format(atoms_[j]));
  }

  auto lengths = Ball::build(group_, kAtomRadius);
  const auto gens = group_.generators();
  for (const auto& a : atoms_) {
    auto idx = lengths->find(a);
    if (!idx) throw DomainError("atoms longer than " + std::to_string(kAtomRadius) + " are not supported");
    max_len_ = std::max(max_len_, lengths->length(*idx));
    auto it = std::find(gens.begin(), gens.end(), a);
    gen_index_.push_back(it == gens.end() ? -1 : static_cast<int>(it - gens.begin()));
  }

  // Generation: walking by atoms inside B(e, 3 + 2L) must reach every element of B(e, 3).
  auto room = Ball::build(group_, std::min(kAtomRadius, 3 + 2 * max_len_));
  auto steps = room->step_table(atoms_);
  std::vector<char> seen(room->size(), 0);
  std::vector<Index> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto x = static_cast<std::size_t>(queue[head]);
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      const Index y = steps[x * atoms_.size() + j];
      if (y >= 0 && !seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = 1;
        queue.push_back(y);
      }
    }
  }
  const auto inner = room->count_within(3);
  if (!std::all_of(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(inner), [](char c) { return c != 0; }))
    throw DomainError("the support of the step distribution does not generate the group");
}

StepDistribution StepDistribution::uniform(const GroupModel& g) {
  const auto gens = g.generators();
  std::vector<Element> atoms(gens.begin(), gens.end());
  std::vector<double> probs(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  return StepDistribution(g, std::move(atoms), std::move(probs));
}

double StepDistribution::mass_at_identity() const {
  for (std::size_t j = 0; j < atoms_.size(); ++j)
    if (group_.is_identity(atoms_[j])) return probs_[j];
  return 0.0;
}

StepOperator::StepOperator(const Ball& b, const StepDistribution& mu)
    : targets_(b.step_table(mu.atoms())), weights_(mu.probs()) {
  if (!(b.group() == mu.group())) throw DomainError("step distribution and ball belong to different groups");
}

}  // namespace coarse
