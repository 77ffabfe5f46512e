#include "coarse/cli.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <new>
#include <optional>

#include "CLI11.hpp"
#include "coarse/errors.hpp"
#include "coarse/folner.hpp"
#include "coarse/io.hpp"
#include "coarse/kernels.hpp"
#include "coarse/pipeline.hpp"
#include "coarse/profile.hpp"
#include "coarse/randomwalk.hpp"
#include "coarse/report.hpp"

namespace coarse::cli {

namespace {

struct Common {
  std::string group = "z1";
  std::string out;
  std::string format;
  int threads = 0;
  std::size_t memcap = 0;
};

// Process-wide settings are restored when a run ends, so run() can be called repeatedly.
struct SettingsGuard {
  int threads = kernels::max_threads();
  ~SettingsGuard() {
    set_element_cap(0);
    kernels::set_threads(threads);
  }
};

void add_common(CLI::App* sub, Common& c, bool with_group = true) {
  if (with_group) sub->add_option("--group", c.group, "z1, z2, z3, heis, lamp, bs12 or f2")->capture_default_str();
  sub->add_option("--out", c.out, "output file (default: standard output)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--memcap", c.memcap, "element cap for ball construction")->check(CLI::PositiveNumber);
}

json typed_cell(const std::string& s) {
  std::int64_t i = 0;
  const char* end = s.data() + s.size();
  if (auto [p, ec] = std::from_chars(s.data(), end, i); ec == std::errc() && p == end && !s.empty()) return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(s.data(), end, d); ec == std::errc() && p == end && std::isfinite(d)) return d;
  return s;
}

// A series in the requested format; JSON mirrors the CSV with typed cells.
std::string render_series(const Table& t, const std::string& format) {
  if (format != "json") return t.render();
  json j;
  for (const auto& [k, v] : t.meta) j[k] = v;
  j["schema_version"] = kSchemaVersion;
  j["columns"] = t.columns;
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = typed_cell(row[i]);
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

std::string render_object(const json& j, const std::string& format) {
  if (format == "csv") throw DomainError("this command writes JSON only");
  return j.dump(2) + "\n";
}

void emit(const Common& c, const std::string& content, std::ostream& out) {
  if (c.out.empty())
    out << content;
  else
    write_atomic(c.out, content);
}

std::string fmt(double x) { return format_double(x); }

// ---- subcommands

std::string cmd_ball(const Common& c, int radius) {
  const auto g = GroupModel::from_name(c.group);
  const auto b = Ball::build(g, radius);
  const auto& s = b->sphere_sizes();
  if (c.format == "csv") {
    Table t("ball", {"r", "sphere", "ball"});
    t.meta["group"] = g.name();
    std::size_t total = 0;
    for (std::size_t r = 0; r < s.size(); ++r) {
      total += s[r];
      t.add_row({std::to_string(r), std::to_string(s[r]), std::to_string(total)});
    }
    return t.render();
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "ball";
  j["group"] = g.name();
  j["radius"] = radius;
  j["sizes"] = s;
  j["total"] = b->size();
  return j.dump(2) + "\n";
}

std::string cmd_growth(const Common& c, int rmax) {
  const auto g = GroupModel::from_name(c.group);
  const auto v = growth(g, rmax);
  Table t("growth", {"r", "v"});
  t.meta["group"] = g.name();
  for (std::size_t r = 0; r < v.size(); ++r) t.add_row({std::to_string(r), std::to_string(v[r])});
  return render_series(t, c.format);
}

json verification_json(const DecompositionReport& r) {
  json v;
  v["valid"] = r.valid;
  v["invariants_ok"] = r.invariants_ok;
  v["max_piece_diameter"] = r.max_piece_diameter;
  v["diameter_exact"] = r.diameter_exact;
  v["min_same_color_gap"] = r.min_same_color_gap ? json(*r.min_same_color_gap) : json(nullptr);
  v["gap_exact"] = r.gap_exact;
  v["problem"] = r.problem;
  return v;
}

json failure_json(const GroupModel& g, const Ball& b, const GreedyFailure& f) {
  json j;
  j["element"] = g.format(b.element(f.element));
  json piece = json::array();
  for (Index i : f.piece) piece.push_back(g.format(b.element(i)));
  j["piece"] = piece;
  j["blocking"] = f.blocking;
  j["message"] = f.message;
  return j;
}

struct DecomposeArgs {
  int radius = 16;
  int scale = 2;
  int colors = 0;
  std::string stretch;
  std::uint64_t seed = 0;
  std::string method = "auto";
};

DecomposeOptions options_of(const DecomposeArgs& a, const CLI::App* sub) {
  DecomposeOptions o;
  o.method = a.method;
  if (sub->count("--colors")) o.colors = a.colors;
  if (sub->count("--stretch")) o.stretch = parse_rational(a.stretch);
  o.seed = a.seed;
  return o;
}

std::string cmd_decompose(const Common& c, const DecomposeArgs& a, const CLI::App* sub) {
  const auto g = GroupModel::from_name(c.group);
  const auto run = decompose_window(g, a.scale, a.radius, options_of(a, sub));
  json j;
  if (run.partition) {
    j = to_json(*run.partition, *run.report);
    j["found"] = true;
  } else {
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "partition";
    j["group"] = g.name();
    j["method"] = run.method;
    j["ambient_radius"] = run.ambient_radius;
    j["window_radius"] = a.radius;
    j["scale"] = a.scale;
    j["found"] = false;
    // The failing piece refers to the ambient ball, which the run has dropped; rebuild it.
    const auto b = Ball::build(g, run.ambient_radius);
    j["failure"] = failure_json(g, *b, *run.failure);
  }
  return render_object(j, c.format);
}

std::string cmd_couples(const Common& c, int n, int window, const DecomposeArgs& a, const CLI::App* sub) {
  const auto g = GroupModel::from_name(c.group);
  if (!sub->count("--window")) window = 10 * n;
  const auto run = run_couples(g, n, window, options_of(a, sub));
  const auto& d = run.decomposition;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "couple";
  j["group"] = g.name();
  j["n"] = n;
  j["window_radius"] = window;
  j["ambient_radius"] = d.ambient_radius;
  j["method"] = d.method;
  const bool found = run.search && run.search->couple;
  j["found"] = found;
  j["couple"] = found ? to_json(*run.search->couple) : json(nullptr);
  if (run.verification) {
    const auto& v = *run.verification;
    j["verification"] = {{"ok_subset", v.ok_subset},
                         {"ok_ratio", v.ok_ratio},
                         {"ok_separation", v.ok_separation},
                         {"ok_diameter", v.ok_diameter ? json(*v.ok_diameter) : json(nullptr)},
                         {"valid", v.valid}};
  } else {
    j["verification"] = nullptr;
  }
  if (run.search) {
    const auto& s = *run.search;
    std::size_t qualifying = 0;
    for (const auto& p : s.scanned) qualifying += p.qualifies ? 1 : 0;
    j["search"] = {{"scanned", s.scanned.size()},
                   {"qualifying", qualifying},
                   {"best_ratio", s.best_ratio ? json(to_string(*s.best_ratio)) : json(nullptr)},
                   {"color_order", s.color_order}};
  } else {
    j["search"] = nullptr;
  }
  json dec;
  dec["found"] = d.partition.has_value();
  if (d.partition) {
    dec["scale"] = d.partition->scale;
    dec["colors"] = d.partition->colors;
    dec["K"] = to_string(d.partition->stretch);
    dec["pieces"] = d.partition->size();
    dec["verification"] = verification_json(*d.report);
  } else {
    dec["failure"] = d.failure->message;
  }
  j["decomposition"] = dec;
  return render_object(j, c.format);
}

std::string cmd_folner_scan(const Common& c, const std::string& family, int nmax) {
  const auto g = GroupModel::from_name(c.group);
  const auto rows = folner_scan(g, family, nmax);
  Table t("folner-scan", {"n", "size", "boundary", "ratio", "ratio_value"});
  t.meta["group"] = g.name();
  t.meta["family"] = family;
  for (const auto& r : rows)
    t.add_row({std::to_string(r.n), std::to_string(r.size), std::to_string(r.boundary), to_string(r.ratio),
               fmt(to_double(r.ratio))});
  return render_series(t, c.format);
}

struct ProfileArgs {
  int rmin = 1;
  int rmax = 0;
  double p = 2;
  double tol = 1e-10;
  int couples = 0;
};

std::string cmd_profile(const Common& c, const ProfileArgs& a) {
  const auto g = GroupModel::from_name(c.group);
  if (a.rmin < 0 || a.rmax < a.rmin) throw DomainError("need 0 <= rmin <= rmax");
  if (!(a.p >= 1 && a.p <= 2)) throw DomainError("p must lie in [1, 2]");
  if (!(a.tol > 0)) throw DomainError("tol must be positive");
  if (a.couples > 0 && a.p != 2) throw DomainError("couple bounds are for p = 2");
  const auto mu = StepDistribution::uniform(g);
  Table t("profile", {"r", "lambda", "method", "residual"});
  t.meta["group"] = g.name();
  t.meta["p"] = fmt(a.p);
  t.meta["tol"] = fmt(a.tol);
  t.meta["mu"] = "uniform";
  for (int r = a.rmin; r <= a.rmax; ++r) {
    if (a.p == 2) {
      const auto e = l2_profile_exact(g, r, mu, a.tol);
      t.add_row({std::to_string(r), fmt(e.lambda), "exact", fmt(e.residual)});
    } else {
      const auto q = lp_rayleigh(tent_function(Ball::build(g, r), r), a.p, mu);
      t.add_row({std::to_string(r), fmt(q.quotient), "upper_bound", ""});
    }
  }
  if (a.couples > 0) {
    t.meta["couples"] = std::to_string(a.couples);
    for (int n = 1; n <= a.couples; ++n) {
      const auto run = run_couples(g, n, 10 * n, DecomposeOptions{});
      if (!run.search || !run.search->couple) continue;
      const auto b = couple_upper_bound(*run.search->couple, mu);
      t.add_row({std::to_string(b.radius), fmt(b.value), "couple_bound", ""});
    }
  }
  return render_series(t, c.format);
}

struct WalkArgs {
  std::string stat;
  bool exact = false;
  int n = 0;
  int nmax = 0;
  std::vector<int> grid;
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  double eps = 0.5;
  int length_radius = 0;
  std::string mode = "midpoint";
};

std::string cmd_walk(const Common& c, WalkArgs a, const CLI::App* sub) {
  const auto g = GroupModel::from_name(c.group);
  const auto mu = StepDistribution::uniform(g);
  const bool has_n = sub->count("--n") > 0, has_nmax = sub->count("--nmax") > 0, has_grid = !a.grid.empty();
  if (int(has_n) + int(has_nmax) + int(has_grid) != 1) throw DomainError("give exactly one of --n, --nmax, --grid");
  if (!(a.eps > 0)) throw DomainError("eps must be positive");
  for (int n : a.grid)
    if (n < 0) throw DomainError("grid times must be >= 0");
  std::sort(a.grid.begin(), a.grid.end());
  a.grid.erase(std::unique(a.grid.begin(), a.grid.end()), a.grid.end());

  Table t("walk", {"n", "value", "stderr", "method", "seed", "censored"});
  t.meta["group"] = g.name();
  t.meta["stat"] = a.stat;
  t.meta["mu"] = "uniform";
  if (a.stat == "cautious") t.meta["eps"] = fmt(a.eps);

  auto add = [&](const Estimate& e, const std::string& seed) {
    t.add_row({std::to_string(e.n), fmt(e.value), fmt(e.stderr_), e.exact ? "exact" : "monte-carlo", seed,
               std::to_string(e.censored)});
  };

  if (a.exact) {
    if (sub->count("--trials") || sub->count("--seed")) throw DomainError("--trials and --seed apply to Monte Carlo runs");
    if (a.mode != "midpoint" && a.mode != "direct") throw DomainError("mode must be midpoint or direct");
    // Rows: every time 0..nmax, the single n, or the grid times.
    std::vector<int> times = has_grid ? a.grid : std::vector<int>{has_n ? a.n : a.nmax};
    const int top = times.back();
    if (has_nmax) {
      times.clear();
      for (int n = 0; n <= top; ++n) times.push_back(n);
    }
    auto from_series = [&](const std::vector<double>& v) {
      for (int n : times) add(Estimate{n, v[static_cast<std::size_t>(n)], 0, true, 0}, "none");
    };
    if (a.stat == "return") {
      t.meta["mode"] = a.mode;
      from_series(return_probability_exact(mu, top, a.mode == "direct" ? ReturnMode::Direct : ReturnMode::Midpoint));
    } else if (a.stat == "drift") {
      from_series(drift_exact(mu, top));
    } else {
      if (has_nmax) times = geometric_grid(std::min(25, top), top);
      for (int n : times) add(Estimate{n, cautiousness_exact(mu, n, a.eps), 0, true, 0}, "none");
    }
    return render_series(t, c.format);
  }

  if (sub->count("--mode")) throw DomainError("--mode applies to exact return probabilities");
  std::vector<int> grid = has_grid ? a.grid : has_n ? std::vector<int>{a.n} : geometric_grid(std::min(25, a.nmax), a.nmax);
  const auto oracle = LengthOracle::for_reach(g, grid.back() * mu.max_atom_length(), a.length_radius);
  McOptions opt;
  opt.trials = a.trials;
  opt.seed = a.seed;
  const auto sample = sample_walks(mu, grid, opt, oracle, a.stat == "cautious");
  t.meta["rng"] = "philox4x32-10";
  t.meta["trials"] = std::to_string(a.trials);
  t.meta["length"] = std::string(oracle.method());
  if (oracle.coverage()) t.meta["coverage"] = std::to_string(*oracle.coverage());
  const auto rows = a.stat == "return" ? return_estimates(sample)
                    : a.stat == "drift" ? drift_estimates(sample)
                                        : cautiousness_estimates(sample, a.eps);
  for (const auto& e : rows) add(e, std::to_string(a.seed));
  return render_series(t, c.format);
}

std::string cmd_report(const Common& c, const std::vector<std::string>& inputs, std::ostream& out) {
  std::vector<json> docs;
  for (const auto& path : inputs) docs.push_back(load_document(path));
  const auto rows = summarize(docs, inputs);
  const auto j = report_json(rows).dump(2) + "\n";
  if (!c.out.empty()) {
    out << render_text(rows);
    return j;
  }
  return c.format == "json" ? j : render_text(rows);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"coarse-lab: Folner couples, decompositions, profiles and random walks on small groups", "coarse-lab"};
  app.require_subcommand(1);
  Common c;

  auto* ball_cmd = app.add_subcommand("ball", "sphere and ball sizes of B(e, r)");
  int ball_radius = 0;
  ball_cmd->add_option("--radius", ball_radius, "ball radius")->required()->check(CLI::NonNegativeNumber);
  add_common(ball_cmd, c);

  auto* growth_cmd = app.add_subcommand("growth", "growth series v(r) = #B(e, r)");
  int rmax = 0;
  growth_cmd->add_option("--rmax", rmax, "largest radius")->required()->check(CLI::NonNegativeNumber);
  add_common(growth_cmd, c);

  DecomposeArgs da;
  auto add_decompose_options = [&da](CLI::App* sub) {
    sub->add_option("--colors", da.colors, "greedy color budget")->check(CLI::PositiveNumber);
    sub->add_option("--stretch", da.stretch, "greedy stretch K (e.g. 3 or 5/2)");
    sub->add_option("--seed", da.seed, "greedy tie-break seed (0 = none)");
    sub->add_option("--method", da.method, "auto, canonical or greedy")->capture_default_str();
  };
  auto* decompose_cmd = app.add_subcommand("decompose", "colored partition of the window B(e, radius) at a scale");
  decompose_cmd->add_option("--radius", da.radius, "window radius")->capture_default_str()->check(CLI::NonNegativeNumber);
  decompose_cmd->add_option("--scale", da.scale, "scale r (> 1)")->required();
  add_decompose_options(decompose_cmd);
  add_common(decompose_cmd, c);

  auto* couples_cmd = app.add_subcommand("couples", "Folner couple from a scale-2n decomposition");
  int couple_n = 0, window = 0;
  couples_cmd->add_option("--n", couple_n, "separation n")->required()->check(CLI::PositiveNumber);
  couples_cmd->add_option("--window", window, "window radius (default 10 n)")->check(CLI::NonNegativeNumber);
  add_decompose_options(couples_cmd);
  add_common(couples_cmd, c);

  auto* scan_cmd = app.add_subcommand("folner-scan", "Folner ratios of a set family");
  std::string family = "balls";
  int scan_nmax = 0;
  scan_cmd->add_option("--family", family, "balls, boxes or lamp-intervals")->capture_default_str();
  scan_cmd->add_option("--nmax", scan_nmax, "largest family index")->required()->check(CLI::PositiveNumber);
  add_common(scan_cmd, c);

  auto* profile_cmd = app.add_subcommand("profile", "l_p profile of balls");
  ProfileArgs pa;
  profile_cmd->add_option("--rmin", pa.rmin, "smallest radius")->capture_default_str();
  profile_cmd->add_option("--rmax", pa.rmax, "largest radius")->required();
  profile_cmd->add_option("--p", pa.p, "exponent in [1, 2]")->capture_default_str();
  profile_cmd->add_option("--tol", pa.tol, "eigen residual tolerance")->capture_default_str();
  profile_cmd->add_option("--couples", pa.couples, "add couple upper bounds for n = 1..N")->check(CLI::NonNegativeNumber);
  add_common(profile_cmd, c);

  auto* walk_cmd = app.add_subcommand("walk", "random-walk statistics");
  WalkArgs wa;
  walk_cmd->add_option("--stat", wa.stat, "return, drift or cautious")
      ->required()
      ->check(CLI::IsMember({"return", "drift", "cautious"}));
  walk_cmd->add_flag("--exact", wa.exact, "exact convolution instead of Monte Carlo");
  walk_cmd->add_option("--n", wa.n, "single time")->check(CLI::NonNegativeNumber);
  walk_cmd->add_option("--nmax", wa.nmax, "largest time")->check(CLI::NonNegativeNumber);
  walk_cmd->add_option("--grid", wa.grid, "comma-separated times")->delimiter(',');
  walk_cmd->add_option("--trials", wa.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
  walk_cmd->add_option("--seed", wa.seed, "Monte Carlo seed")->capture_default_str();
  walk_cmd->add_option("--eps", wa.eps, "cautiousness epsilon")->capture_default_str();
  walk_cmd->add_option("--length-radius", wa.length_radius, "word-length table radius (table-backed groups)")
      ->check(CLI::PositiveNumber);
  walk_cmd->add_option("--mode", wa.mode, "exact return mode: midpoint or direct")->capture_default_str();
  add_common(walk_cmd, c);

  auto* report_cmd = app.add_subcommand("report", "per-group summary of result files");
  std::vector<std::string> inputs;
  report_cmd->add_option("inputs", inputs, "result files");
  add_common(report_cmd, c, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "coarse-lab: " << e.what() << "\n";
    return kExitInvalid;
  }

  SettingsGuard guard;
  try {
    if (c.threads > 0) kernels::set_threads(c.threads);
    if (c.memcap > 0) set_element_cap(c.memcap);
    std::string content;
    if (ball_cmd->parsed()) {
      content = cmd_ball(c, ball_radius);
    } else if (growth_cmd->parsed()) {
      content = cmd_growth(c, rmax);
    } else if (decompose_cmd->parsed()) {
      content = cmd_decompose(c, da, decompose_cmd);
    } else if (couples_cmd->parsed()) {
      content = cmd_couples(c, couple_n, window, da, couples_cmd);
    } else if (scan_cmd->parsed()) {
      content = cmd_folner_scan(c, family, scan_nmax);
    } else if (profile_cmd->parsed()) {
      content = cmd_profile(c, pa);
    } else if (walk_cmd->parsed()) {
      content = cmd_walk(c, wa, walk_cmd);
    } else {
      content = cmd_report(c, inputs, out);
    }
    emit(c, content, out);
    return kExitOk;
  } catch (const InvalidElement& e) {
    err << "coarse-lab: invalid element: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const DomainError& e) {
    err << "coarse-lab: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const json::exception& e) {
    err << "coarse-lab: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const MarginError& e) {
    err << "coarse-lab: margin: " << e.what() << "\n";
    return kExitResource;
  } catch (const ResourceError& e) {
    err << "coarse-lab: resource: " << e.what() << "\n";
    return kExitResource;
  } catch (const NumericalError& e) {
    err << "coarse-lab: numerical: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::bad_alloc&) {
    err << "coarse-lab: out of memory\n";
    return kExitResource;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace coarse::cli
