#pragma once

// Command-line front end: eval, synth, verify and table.
//
// Exit codes: 0 success, 1 verification failure or internal error,
// 2 usage or domain error.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jnb/bellman.hpp"
#include "jnb/errors.hpp"
#include "jnb/geometry.hpp"
#include "jnb/json.hpp"
#include "jnb/optimizers.hpp"
#include "jnb/sampling.hpp"
#include "jnb/table.hpp"
#include "jnb/verify.hpp"

namespace jnb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

enum class Format { Json, Csv, Pretty };

inline Format parse_format(const std::string& s, Format fallback) {
  if (s.empty()) return fallback;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  if (s == "pretty") return Format::Pretty;
  throw DomainError("unknown format '" + s + "'");
}

inline std::string render(const Table& t, Format f) {
  switch (f) {
    case Format::Json: return to_json_text(t);
    case Format::Csv: return to_csv(t);
    case Format::Pretty: return to_pretty(t);
  }
  return {};
}

inline Cell text_cell(std::string_view s) { return Cell(std::string(s)); }

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  double eps = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

inline Table eval_table(const EvalArgs& a) {
  const Epsilon eps(a.eps);
  const Point p{a.x1, a.x2};
  require_in_strip(eps, p);
  const int region = region_count(regime(eps)) > 0 ? classify(eps, p) : 0;
  Table t{"eval", {"eps", "x1", "x2", "regime", "region", "beta", "B", "B_asym"}, {}};
  t.add_row({eps.value(), p.x1, p.x2, text_cell(to_string(regime(eps))), static_cast<double>(region),
             beta_of(eps, p), eval(eps, p).as_double(), eval_asym(eps, p).as_double()});
  return t;
}

inline int cmd_eval(const EvalArgs& a, Format f, std::ostream& out) {
  const Table t = eval_table(a);
  if (f != Format::Json) {
    out << render(t, f);
    return kExitOk;
  }
  Json j = {{"schema", kSchema}};
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    const Cell& c = t.rows.front()[i];
    if (const double* v = std::get_if<double>(&c)) {
      j[t.columns[i]] = t.columns[i] == "region" ? Json(static_cast<int>(*v)) : real_to_json(*v);
    } else {
      j[t.columns[i]] = std::get<std::string>(c);
    }
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  double eps = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  std::size_t samples = 0;
  std::size_t bmo_grid = 256;
};

/// phi at the midpoints of n equal cells.
inline Table sample_table(const PiecewiseLogAffine& f, std::size_t n) {
  Table t{"samples", {"t", "phi"}, {}};
  for (std::size_t k = 0; k < n; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    t.add_row({s, f(s)});
  }
  return t;
}

inline Table piece_table(const PiecewiseLogAffine& f) {
  Table t{"pieces", {"a", "b", "c0", "c1", "reversed"}, {}};
  for (const auto& p : f.pieces()) t.add_row({p.a, p.b, p.c0, p.c1, text_cell(p.reversed ? "true" : "false")});
  return t;
}

inline int cmd_synth(const SynthArgs& a, Format f, std::ostream& out, std::ostream& err) {
  const Epsilon eps(a.eps);
  const Point p{a.x1, a.x2};
  const Synthesis s = synthesize(eps, p, {a.bmo_grid});
  switch (f) {
    case Format::Json: {
      Json j = {{"schema", kSchema}};
      const Json body = to_json(s);
      for (const auto& [k, v] : body.items()) j[k] = v;
      if (a.samples > 0) {
        Json rows = Json::array();
        for (const auto& row : sample_table(s.function, a.samples).rows) {
          rows.push_back({real_to_json(std::get<double>(row[0])), real_to_json(std::get<double>(row[1]))});
        }
        j["samples"] = std::move(rows);
      }
      out << j.dump(2) << '\n';
      break;
    }
    case Format::Csv:
      out << to_csv(a.samples > 0 ? sample_table(s.function, a.samples) : piece_table(s.function));
      break;
    case Format::Pretty: {
      const int d = kPrettyDigits;
      Table summary{"synth", {"field", "value"}, {}};
      auto add = [&](std::string_view k, std::string v) { summary.add_row({text_cell(k), std::move(v)}); };
      add("eps", format_real(eps.value(), d));
      add("point", "(" + format_real(p.x1, d) + ", " + format_real(p.x2, d) + ")");
      add("construction", std::string(to_string(s.spec.construction)));
      add("region", std::to_string(s.spec.region));
      add("B", format_real(s.bellman, d));
      add("mean", format_real(s.report.mean, d));
      add("second", format_real(s.report.second, d));
      add("exp_abs", format_real(s.report.exp_abs, d));
      add("bmo_norm_lb", format_real(s.report.bmo_norm_lb, d));
      add("verified", s.verified() ? "yes" : "no");
      out << to_pretty(summary) << '\n' << to_pretty(piece_table(s.function));
      if (a.samples > 0) out << '\n' << to_pretty(sample_table(s.function, a.samples));
      break;
    }
  }
  if (!s.verified()) {
    err << "synthesized function misses the attainment tolerances (mean " << format_real(s.mean_error)
        << ", second " << format_real(s.second_error) << ", exp_abs rel " << format_real(s.exp_abs_rel_error)
        << ", bmo excess " << format_real(s.bmo_excess) << ")\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"gluing", "c1", "concavity", "attainment", "stress"};
  return names;
}

struct VerifyArgs {
  std::string eps = "0.25";
  std::string checks = "gluing,c1,concavity,attainment,stress";
  std::size_t per_boundary = 1000;
  std::size_t interior = 10000;
  std::size_t segments = 100000;
  std::size_t points = 200;
  std::size_t bmo_grid = 64;
  std::size_t trials = 10000;
  int pieces_max = 6;
};

inline std::vector<std::string> split_checks(const std::string& s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string name(detail::trim(std::string_view(s).substr(pos, comma - pos)));
    pos = comma + 1;
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end()) {
      throw DomainError("unknown check '" + name + "'");
    }
    out.push_back(name);
  }
  return out;
}

inline CheckReport run_check(const std::string& name, Epsilon eps, const VerifyArgs& a, const VerifyOptions& opt) {
  if (name == "gluing") return check_gluing(eps, a.per_boundary);
  if (name == "c1") return check_c1(eps, a.per_boundary, a.interior, opt);
  if (name == "concavity") return check_concavity(eps, a.segments, opt);
  if (name == "attainment") return check_attainment(eps, {a.points, a.bmo_grid}, opt);
  if (name == "stress") {
    if (a.pieces_max < 1) throw DomainError("--pieces-max must be at least 1");
    return stress_upper_bound(eps, {a.trials, a.pieces_max}, opt);
  }
  throw DomainError("unknown check '" + name + "'");
}

inline int cmd_verify(const VerifyArgs& a, const VerifyOptions& opt, Format f, std::ostream& out) {
  const std::vector<double> eps_list = parse_values(a.eps);
  const std::vector<std::string> checks = split_checks(a.checks);
  std::vector<Epsilon> eps_values;
  for (double e : eps_list) eps_values.emplace_back(e);

  std::vector<CheckReport> reports;
  for (const auto& e : eps_values) {
    for (const auto& name : checks) reports.push_back(run_check(name, e, a, opt));
  }
  const bool all_pass = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });

  switch (f) {
    case Format::Json: {
      Json list = Json::array();
      for (const auto& r : reports) list.push_back(to_json(r));
      out << Json{{"schema", kSchema}, {"pass", all_pass}, {"reports", std::move(list)}}.dump(2) << '\n';
      break;
    }
    case Format::Csv:
    case Format::Pretty: {
      Table t{"verify", {"check", "eps", "samples", "worst", "tol", "pass"}, {}};
      for (const auto& r : reports) {
        t.add_row({r.check, r.eps, static_cast<double>(r.samples), r.worst, r.tol,
                   text_cell(r.pass ? "true" : "false")});
      }
      out << render(t, f);
      if (f == Format::Pretty) {
        for (const auto& r : reports) {
          if (r.pass) continue;
          out << "\n" << r.check << " at eps = " << format_real(r.eps, kPrettyDigits) << ":\n";
          for (const auto& o : r.offenders) {
            out << "  " << o.label << " at " << to_string(o.p) << ": " << format_real(o.error, kPrettyDigits)
                << '\n';
          }
        }
      }
      break;
    }
  }
  return all_pass ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// table

inline Table sharp_table(const std::string& eps_sweep) {
  Table t{"sharp", {"eps", "C"}, {}};
  for (double e : parse_values(eps_sweep)) t.add_row({e, sharp_constant(Epsilon(e)).as_double()});
  return t;
}

/// One row per (eps, lambda); a lambda on a branch boundary gets a row for each adjacent branch.
inline Table weak_table(const std::string& eps_sweep, const std::string& lambda_sweep, WeakForm form) {
  Table t{form == WeakForm::Symmetric ? "weak-sym" : "weak", {"eps", "lambda", "branch", "C"}, {}};
  const auto lambdas = parse_sweep(lambda_sweep, true);
  for (double e_raw : parse_values(eps_sweep)) {
    const Epsilon eps(e_raw);
    const double e = eps.value();
    for (const auto& lv : lambdas) {
      const double lambda = lv.resolve(e);
      const int b = weak_branch(eps, lambda, form);
      t.add_row({e, lambda, static_cast<double>(b), weak_constant_branch(eps, lambda, form, b)});
      const double edge = b == 1 ? e : 2.0 * e;
      if (b < weak_branch_count(form) && std::abs(lambda - edge) <= 1e-12 * edge) {
        t.add_row({e, lambda, static_cast<double>(b + 1), weak_constant_branch(eps, lambda, form, b + 1)});
      }
    }
  }
  return t;
}

inline Table foliation_table(double eps_value, int leaves, std::size_t points) {
  const Epsilon eps(eps_value);
  if (points < 2) throw DomainError("--points must be at least 2");
  Table t{"foliation", {"curve", "index", "x1", "x2"}, {}};
  auto segment = [&](const std::string& name, const Segment& s) {
    t.add_row({name, 0.0, s.from.x1, s.from.x2});
    t.add_row({name, 1.0, s.to.x1, s.to.x2});
  };
  auto side = [](const Segment& s) { return s.from.x1 + s.to.x1 < 0.0 ? " left" : s.from.x1 + s.to.x1 > 0.0 ? " right" : ""; };
  if (region_count(regime(eps)) > 0) {
    for (const auto& b : region_boundaries(eps)) {
      segment("boundary " + std::to_string(b.lower) + "|" + std::to_string(b.lower + 1) + side(b.segment), b.segment);
    }
    std::vector<int> seen(5, 0);
    for (const auto& l : foliation_leaves(eps, leaves)) {
      segment("leaf " + std::to_string(l.region) + " #" + std::to_string(seen[l.region]++), l.segment);
    }
  }
  const double ext = sampling_extent(eps);
  for (int upper = 0; upper < 2; ++upper) {
    const std::string name = upper ? "upper parabola" : "lower parabola";
    for (std::size_t k = 0; k < points; ++k) {
      const double x1 = -ext + 2.0 * ext * static_cast<double>(k) / static_cast<double>(points - 1);
      t.add_row({name, static_cast<double>(k), x1, x1 * x1 + (upper ? eps.squared() : 0.0)});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Dispatch

/// Runs the command line `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bellman function of the exponential BMO integral on the parabolic strip: evaluation, extremal functions, checks and tables",
               "jnb"};
  app.require_subcommand(1);

  std::string format;
  VerifyOptions vopt;
  app.add_option("--format", format, "Output format: json, csv or pretty (default depends on the command)")
      ->check(CLI::IsMember({"json", "csv", "pretty"}));
  app.add_option("--seed", vopt.seed, "Seed for randomized checks")->capture_default_str();
  app.add_option("--jobs", vopt.jobs, "Worker threads (0: one per hardware thread)")->capture_default_str();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate B_eps and the one-sided function at a point");
  eval_cmd->fallthrough();
  eval_cmd->add_option("--eps", ea.eps, "BMO bound eps >= 0")->required();
  eval_cmd->add_option("--x1", ea.x1, "First moment <phi>")->required();
  eval_cmd->add_option("--x2", ea.x2, "Second moment <phi^2>")->required();

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Build an extremal function at a point");
  synth_cmd->fallthrough();
  synth_cmd->add_option("--eps", sa.eps, "BMO bound eps >= 0")->required();
  synth_cmd->add_option("--x1", sa.x1, "First moment <phi>")->required();
  synth_cmd->add_option("--x2", sa.x2, "Second moment <phi^2>")->required();
  synth_cmd->add_option("--samples", sa.samples, "Also emit phi at the midpoints of n equal cells")
      ->capture_default_str();
  synth_cmd->add_option("--bmo-grid", sa.bmo_grid, "Finest dyadic grid of the BMO norm search")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 24));

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Run numerical checks of the Bellman candidate");
  verify_cmd->fallthrough();
  verify_cmd->add_option("--eps", va.eps, "Values or ranges start:stop:step, comma separated")->capture_default_str();
  verify_cmd->add_option("--checks", va.checks, "Comma-separated subset of gluing,c1,concavity,attainment,stress")
      ->capture_default_str();
  verify_cmd->add_option("--per-boundary", va.per_boundary, "gluing, c1: samples per region boundary")
      ->capture_default_str();
  verify_cmd->add_option("--interior", va.interior, "c1: interior finite-difference samples")->capture_default_str();
  verify_cmd->add_option("--segments", va.segments, "concavity: midpoint segments")->capture_default_str();
  verify_cmd->add_option("--points", va.points, "attainment: points per region")->capture_default_str();
  verify_cmd->add_option("--bmo-grid", va.bmo_grid, "attainment: finest dyadic grid of the BMO norm search")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{16}, std::size_t{1} << 24));
  verify_cmd->add_option("--trials", va.trials, "stress: random step functions")->capture_default_str();
  verify_cmd->add_option("--pieces-max", va.pieces_max, "stress: most pieces per step function")
      ->capture_default_str();

  auto* table_cmd = app.add_subcommand("table", "Emit data tables (CSV by default)");
  table_cmd->fallthrough();
  table_cmd->require_subcommand(1);

  std::string sharp_eps = "0:0.99:0.01";
  auto* sharp_cmd = table_cmd->add_subcommand("sharp", "Sharp constant C(eps)");
  sharp_cmd->fallthrough();
  sharp_cmd->add_option("--eps", sharp_eps, "Values or ranges start:stop:step")->capture_default_str();

  std::string weak_eps = "0.1:0.9:0.1", weak_lambda = "0:4e:0.25e";
  bool weak_sym = false;
  auto* weak_cmd = table_cmd->add_subcommand("weak", "Weak-form constants C(eps, lambda)");
  weak_cmd->fallthrough();
  weak_cmd->add_option("--eps", weak_eps, "Values or ranges start:stop:step")->capture_default_str();
  weak_cmd->add_option("--lambda", weak_lambda, "Values or ranges; a trailing 'e' means a multiple of eps")
      ->capture_default_str();
  weak_cmd->add_flag("--sym", weak_sym, "Symmetric form |{|phi - <phi>| >= lambda}|");

  double fol_eps = 0.25;
  int fol_leaves = 9;
  std::size_t fol_points = 101;
  auto* fol_cmd = table_cmd->add_subcommand("foliation", "Region boundaries, ruling leaves and parabolas as polylines");
  fol_cmd->fallthrough();
  fol_cmd->add_option("--eps", fol_eps, "BMO bound eps >= 0")->capture_default_str();
  fol_cmd->add_option("--leaves", fol_leaves, "Leaves per family and side")->capture_default_str();
  fol_cmd->add_option("--points", fol_points, "Samples per parabola")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eval_cmd) return cmd_eval(ea, parse_format(format, Format::Pretty), out);
    if (*synth_cmd) return cmd_synth(sa, parse_format(format, Format::Json), out, err);
    if (*verify_cmd) return cmd_verify(va, vopt, parse_format(format, Format::Pretty), out);
    const Format f = parse_format(format, Format::Csv);
    if (*sharp_cmd) out << render(sharp_table(sharp_eps), f);
    if (*weak_cmd) out << render(weak_table(weak_eps, weak_lambda, weak_sym ? WeakForm::Symmetric : WeakForm::OneSided), f);
    if (*fol_cmd) out << render(foliation_table(fol_eps, fol_leaves, fol_points), f);
    return kExitOk;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace jnb::cli
