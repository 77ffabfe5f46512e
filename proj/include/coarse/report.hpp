#pragma once

// Per-group summary of result files: the four smallness conditions for
// amenable groups (profile, cautiousness, return probability, drift) next to
// whether controlled couples were found.

#include <optional>
#include <string>
#include <vector>

#include "coarse/io.hpp"

namespace coarse {

inline constexpr double kDriftExponentLimit = 0.55;
/// Cautiousness counts as bounded below when min/max over the grid is at least this.
inline constexpr double kCautiousFloorRatio = 0.25;

struct GroupSummary {
  std::string group;
  std::vector<std::string> sources;
  std::optional<bool> couples_found;
  std::optional<bool> couples_valid;  // the emitted couple passed verification
  std::optional<double> profile_exponent;
  std::optional<double> profile_constant;
  std::optional<bool> profile_ok;  // no point above C_fit r^-p (1 + slack)
  std::optional<double> return_c;
  std::optional<bool> return_ok;
  std::optional<double> drift_exponent;
  std::optional<bool> drift_ok;  // exponent <= kDriftExponentLimit
  std::optional<bool> cautious_constant;  // all grid values pairwise within 3 joint standard errors
  std::optional<bool> cautious_bounded;   // min / max >= kCautiousFloorRatio
};

/// `docs` are load_document results, `names` their source labels. DomainError on
/// an empty list, an unknown kind, or a document without a group.
std::vector<GroupSummary> summarize(const std::vector<json>& docs, const std::vector<std::string>& names);
std::string render_text(const std::vector<GroupSummary>& rows);
json report_json(const std::vector<GroupSummary>& rows);

}  // namespace coarse
