#include "coarse/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "coarse/errors.hpp"
#include "coarse/profile.hpp"
#include "coarse/randomwalk.hpp"

namespace coarse {

namespace {

// Cells come back as strings from CSV and as numbers from JSON.
double num(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const double x = std::stod(v.get<std::string>(), &used);
      if (used == v.get<std::string>().size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw DomainError("expected a number, got " + v.dump());
}

std::string str(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

const json& rows_of(const json& doc) {
  if (!doc.contains("rows") || !doc["rows"].is_array()) throw DomainError("series document without rows");
  return doc["rows"];
}

void add_profile(GroupSummary& s, const json& doc) {
  const double p = doc.contains("p") ? num(doc["p"]) : 2.0;
  std::vector<std::pair<int, double>> pts;
  for (const auto& row : rows_of(doc))
    if (str(row.at("method")) == "exact" && num(row.at("r")) >= 1)
      pts.emplace_back(static_cast<int>(num(row.at("r"))), num(row.at("lambda")));
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 3) return;
  std::vector<int> r;
  std::vector<double> l;
  for (auto [x, y] : pts) r.push_back(x), l.push_back(y);
  const auto fit = profile_fit(r, l, p);
  s.profile_exponent = fit.exponent;
  s.profile_constant = fit.constant;
  s.profile_ok = !fit.violation;
}

void add_walk(GroupSummary& s, const json& doc) {
  const std::string stat = doc.contains("stat") ? str(doc["stat"]) : "";
  std::vector<Estimate> series;
  for (const auto& row : rows_of(doc)) {
    Estimate e;
    e.n = static_cast<int>(num(row.at("n")));
    e.value = num(row.at("value"));
    e.stderr_ = num(row.at("stderr"));
    e.exact = str(row.at("method")) == "exact";
    e.censored = row.contains("censored") ? static_cast<std::size_t>(num(row["censored"])) : 0;
    series.push_back(e);
  }
  std::sort(series.begin(), series.end(), [](const Estimate& a, const Estimate& b) { return a.n < b.n; });
  if (stat == "return") {
    if (series.empty()) return;
    std::vector<double> p(static_cast<std::size_t>(series.back().n) + 1, 0.0);
    for (const auto& e : series)
      if (e.n >= 0 && e.censored == 0) p[static_cast<std::size_t>(e.n)] = e.value;
    try {
      const auto b = return_bound_check(p);
      s.return_c = b.c;
      s.return_ok = !b.violation;
    } catch (const DomainError&) {
      // Too few positive even-time values to judge.
    }
  } else if (stat == "drift") {
    try {
      s.drift_exponent = power_law_fit(series).exponent;
      s.drift_ok = *s.drift_exponent <= kDriftExponentLimit;
    } catch (const DomainError&) {
    }
  } else if (stat == "cautious") {
    std::vector<Estimate> pts;
    for (const auto& e : series)
      if (e.n >= 1 && e.censored == 0) pts.push_back(e);
    if (pts.size() < 2) return;
    bool constant = true;
    double lo = 1, hi = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      lo = std::min(lo, pts[i].value);
      hi = std::max(hi, pts[i].value);
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double joint = std::hypot(pts[i].stderr_, pts[j].stderr_);
        if (std::abs(pts[i].value - pts[j].value) > 3 * joint + 1e-12) constant = false;
      }
    }
    s.cautious_constant = constant;
    s.cautious_bounded = hi > 0 && lo / hi >= kCautiousFloorRatio;
  } else {
    throw DomainError("walk document with unknown stat '" + stat + "'");
  }
}

}  // namespace

std::vector<GroupSummary> summarize(const std::vector<json>& docs, const std::vector<std::string>& names) {
  if (docs.empty()) throw DomainError("report needs at least one input file");
  std::map<std::string, GroupSummary> by_group;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& doc = docs[i];
    const std::string name = i < names.size() ? names[i] : std::to_string(i);
    check_schema(doc, name);
    if (!doc.contains("group")) throw DomainError(name + ": no group");
    const std::string group = str(doc["group"]);
    auto& s = by_group[group];
    s.group = group;
    s.sources.push_back(name);
    const std::string kind = doc["kind"];
    if (kind == "couple") {
      s.couples_found = doc.value("found", false);
      if (doc.contains("verification") && doc["verification"].is_object())
        s.couples_valid = doc["verification"].value("valid", false);
    } else if (kind == "profile") {
      add_profile(s, doc);
    } else if (kind == "walk") {
      add_walk(s, doc);
    } else if (kind != "ball" && kind != "growth" && kind != "partition" && kind != "folner-scan") {
      throw DomainError(name + ": cannot summarize kind '" + kind + "'");
    }
  }
  std::vector<GroupSummary> out;
  for (auto& [_, s] : by_group) out.push_back(std::move(s));
  return out;
}

namespace {

std::string cell(const std::optional<double>& x, const std::optional<bool>& ok) {
  if (!x && !ok) return "-";
  std::string out;
  if (x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *x);
    out = buf;
  }
  if (ok) out += out.empty() ? (*ok ? "pass" : "FAIL") : (*ok ? " pass" : " FAIL");
  return out;
}

std::string yes_no(const std::optional<bool>& b, const char* yes, const char* no) { return b ? (*b ? yes : no) : "-"; }

}  // namespace

std::string render_text(const std::vector<GroupSummary>& rows) {
  const std::vector<std::string> head{"group", "couples", "profile exp", "return c", "drift exp", "cautious"};
  std::vector<std::vector<std::string>> table{head};
  for (const auto& s : rows) {
    std::string couples = yes_no(s.couples_found, "found", "not-found");
    if (s.couples_found == true && s.couples_valid) couples += *s.couples_valid ? " verified" : " INVALID";
    std::string cautious = "-";
    if (s.cautious_bounded)
      cautious = std::string(*s.cautious_bounded ? "bounded" : "decaying") + ", " +
                 (*s.cautious_constant ? "constant" : "not constant");
    table.push_back({s.group, couples, cell(s.profile_exponent, s.profile_ok), cell(s.return_c, s.return_ok),
                     cell(s.drift_exponent, s.drift_ok), cautious});
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& r : table)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::string out;
  for (const auto& r : table) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out += r[i];
      if (i + 1 < r.size()) out += std::string(width[i] - r[i].size() + 2, ' ');
    }
    out += "\n";
  }
  return out;
}

json report_json(const std::vector<GroupSummary>& rows) {
  auto opt = [](const auto& x) { return x ? json(*x) : json(nullptr); };
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "report";
  j["groups"] = json::array();
  for (const auto& s : rows) {
    json g;
    g["group"] = s.group;
    g["sources"] = s.sources;
    g["couples_found"] = opt(s.couples_found);
    g["couples_valid"] = opt(s.couples_valid);
    g["profile_exponent"] = opt(s.profile_exponent);
    g["profile_constant"] = opt(s.profile_constant);
    g["profile_ok"] = opt(s.profile_ok);
    g["return_c"] = opt(s.return_c);
    g["return_ok"] = opt(s.return_ok);
    g["drift_exponent"] = opt(s.drift_exponent);
    g["drift_ok"] = opt(s.drift_ok);
    g["cautious_constant"] = opt(s.cautious_constant);
    g["cautious_bounded"] = opt(s.cautious_bounded);
    j["groups"].push_back(std::move(g));
  }
  return j;
}

}  // namespace coarse
