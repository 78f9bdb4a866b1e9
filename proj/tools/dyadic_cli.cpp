// Command-line front end: simulate, profile, curve, verify, figure.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure,
// 4 a checked inequality or agreement test did not hold.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dyadic/alpha.hpp"
#include "dyadic/curve.hpp"
#include "dyadic/errors.hpp"
#include "dyadic/io.hpp"
#include "dyadic/plane.hpp"
#include "dyadic/recursion.hpp"
#include "dyadic/shell_ode.hpp"

namespace fs = std::filesystem;
using namespace dyadic;
using nlohmann::json;

namespace {

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  double lambda = 2.0;
  double beta = 0.0;
  double forcing = 0.0;
  std::optional<double> tol;
  std::string out = ".";
  std::string config;

  ModelParams params(int shells = 20) const {
    ModelParams p;
    p.lambda = lambda;
    p.beta = beta;
    p.forcing = forcing;
    p.shells = shells;
    p.validate();
    return p;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--lambda", c.lambda, "shell ratio")->capture_default_str();
  cmd->add_option("--beta", c.beta, "model coefficient")->capture_default_str();
  cmd->add_option("--forcing", c.forcing, "forcing on shell 0")->capture_default_str();
  cmd->add_option("--tol", c.tol, "command tolerance");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--config", c.config, "key=value file; command-line flags take precedence");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("not a number list: " + text);
    }
  }
  return v;
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

double rounded_up(double x) { return std::ceil(x * 100.0) / 100.0; }

BoundForm parse_bound(const std::string& s) {
  if (s == "exact") return BoundForm::Exact;
  if (s == "legacy") return BoundForm::Legacy;
  throw ValidationError("--bound must be exact or legacy");
}

void print_failed(const std::vector<InequalityCheck>& checks, const char* where) {
  for (const auto& c : checks)
    if (!c.holds)
      std::cerr << where << ": " << c.name << " fails (value " << io::format_double(c.value)
                << ", bound " << io::format_double(c.bound) << ")\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int shells = 20;
  double t_end = 10.0;
  std::string initial = "pulse";
  double output_interval = 0.1;
  std::size_t max_steps = 200'000'000;
  double delta = 0.1;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  const ModelParams p = c.params(a.shells);
  const double tol = c.tol.value_or(1e-10);
  if (!(a.t_end > 0.0)) throw ValidationError("--t-end must be > 0");
  if (a.output_interval < 0.0) throw ValidationError("--output-interval must be >= 0");
  if (a.delta < 0.0) throw ValidationError("--delta must be >= 0");

  ShellState init;
  init.values.assign(p.state_size(), 0.0);
  if (a.initial == "pulse") {
    init.values[0] = 1.0;
  } else if (a.initial == "fixed-point") {
    init.values = forced_fixed_point(p);
  } else if (a.initial != "zero") {
    const auto v = parse_list(a.initial);
    if (v.size() > init.values.size()) throw ValidationError("--initial has more entries than shells");
    std::copy(v.begin(), v.end(), init.values.begin());
  }

  IntegrateOptions opts;
  opts.tol = tol;
  opts.output_interval = a.output_interval;
  opts.max_steps = a.max_steps;
  const auto traj = integrate(init, p, a.t_end, opts);

  const auto dir = out_dir(c);
  {
    std::ofstream os(dir / "trajectory.csv");
    io::write_trajectory_csv(os, traj, p);
  }
  const auto& last = traj.states.back();
  const double e0 = energy(traj.states.front(), p);
  const double e1 = energy(last, p);
  double lowest = 0.0;
  for (const auto& s : traj.states)
    for (double v : s.values) lowest = std::min(lowest, v);

  json j = {{"lambda", p.lambda},       {"beta", p.beta},
            {"forcing", p.forcing},     {"shells", p.shells},
            {"t_end", a.t_end},         {"tol", tol},
            {"samples", traj.states.size()},
            {"accepted_steps", traj.accepted_steps},
            {"rejected_steps", traj.rejected_steps},
            {"energy_initial", e0},     {"energy_final", e1},
            {"weighted_energy_delta", a.delta},
            {"weighted_energy_final", energy(last, p, a.delta)},
            {"min_amplitude", lowest}};
  if (p.forcing == 0.0) {
    j["energy_drift"] = std::abs(e1 - e0);
    j["energy_drift_bound"] = 100.0 * tol * a.t_end * std::max(e0, 1.0);
  }
  if (p.forcing > 0.0 && p.beta == 0.0) {
    const auto fp = forced_fixed_point(p);
    double dev = 0.0;
    for (std::size_t k = 0; k < fp.size(); ++k) dev = std::max(dev, std::abs(last.values[k] - fp[k]));
    j["fixed_point_deviation"] = dev;
  }
  write_json(dir / "summary.json", j);
  std::cout << "simulate: " << traj.states.size() << " samples to t=" << io::format_double(last.time)
            << ", energy " << io::format_double(e0) << " -> " << io::format_double(e1) << '\n';
  return 0;
}

// ----------------------------------------------------------------- profile

struct ProfileArgs {
  std::string method = "bisect";
  int n_max = 60;
  double threshold = 1.0;
  int classify_steps = 200;
  std::optional<double> R0;
  double R1 = 0.03;
  std::string sweep;
};

json intersection_json(const Intersection& x) {
  return {{"alpha0", x.alpha0},
          {"iterate", x.iterate},
          {"t_star", x.t_star},
          {"transversality_margin", x.transversality_margin},
          {"crossings", x.crossings}};
}

int cmd_profile(const Common& c, const ProfileArgs& a) {
  const ModelParams p = c.params();
  const double tol = c.tol.value_or(1e-30);
  if (a.method != "bisect" && a.method != "curve" && a.method != "both")
    throw ValidationError("--method must be bisect, curve or both");
  if (a.n_max < 2) throw ValidationError("--n-max must be >= 2");
  if (!(tol > 0.0)) throw ValidationError("--tol must be > 0");
  ClassifyOptions copts;
  copts.threshold = a.threshold;
  copts.n_max = a.classify_steps;
  if (!(copts.threshold >= 1.0) || copts.n_max < 10)
    throw ValidationError("--threshold must be >= 1 and --classify-steps >= 10");
  const auto sweep = a.sweep.empty() ? std::vector<double>{} : parse_list(a.sweep);
  for (double b : sweep)
    if (!(b >= 0.0)) throw ValidationError("--sweep entries must be >= 0");

  json result = {{"method", a.method}};
  Wide alpha0_wide = 0;
  double alpha0 = 0.0;
  if (a.method != "curve") {
    const auto sol = solve_alpha0(p, tol, copts);
    alpha0_wide = sol.alpha0_wide;
    alpha0 = sol.alpha0;
    result["bisect"] = {{"alpha0", sol.alpha0},
                        {"alpha0_digits", sol.alpha0_wide.str(30)},
                        {"bracket", {sol.lo, sol.hi}},
                        {"iterations", sol.iterations}};
  }
  if (a.method != "bisect") {
    const double r0 = a.R0.value_or(rounded_up(min_R0(a.R1, ModelParams{p.lambda, 0.0, 0.0, 2})));
    const auto inv = solve_invariant({r0, a.R1}, p);
    const auto x = find_intersection(inv.curve, p);
    auto xj = intersection_json(x);
    xj["R0"] = r0;
    xj["R1"] = a.R1;
    xj["curve_clipped"] = inv.diagnostics.clipped;
    result["curve"] = xj;
    if (a.method == "curve") {
      alpha0 = x.alpha0;
      alpha0_wide = Wide(x.alpha0);
    } else {
      const double diff = std::abs(x.alpha0 - alpha0);
      result["agreement"] = diff;
      if (!(diff <= 1e-6)) {
        write_json(out_dir(c) / "profile.json", result);
        throw VerificationFailure("bisection and curve intersection differ by " +
                                  io::format_double(diff));
      }
    }
  }
  result["alpha0"] = alpha0;

  const auto prof = generate_profile(alpha0_wide, a.n_max, p);
  const auto fit = prof.overflowed || prof.alphas.size() < 10 ? KolmogorovFit{true}
                                                               : fit_kolmogorov(prof);
  json j = io::profile_json(prof, fit);
  j["result"] = result;
  const auto en = profile_energy(prof);
  j["energy"] = {{"diverged", en.diverged}, {"value", en.value}, {"tail", en.tail}};

  const auto dir = out_dir(c);
  write_json(dir / "profile.json", j);

  if (!sweep.empty()) {
    std::ofstream os(dir / "sweep.csv");
    os << "beta,alpha0,const_fit,residual\n";
    for (double b : sweep) {
      ModelParams q = p;
      q.beta = b;
      const auto s = solve_alpha0(q, tol, copts);
      const auto f = fit_kolmogorov(generate_profile(s.alpha0_wide, a.n_max, q));
      os << io::format_double(b) << ',' << io::format_double(s.alpha0) << ','
         << io::format_double(f.constant) << ',' << io::format_double(f.residual) << '\n';
    }
  }
  std::cout << "profile: alpha0 = " << io::format_double(alpha0) << " (" << a.method
            << "), Kolmogorov deviation " << io::format_double(fit.residual) << '\n';
  return 0;
}

// ------------------------------------------------------------------- curve

struct CurveArgs {
  std::optional<double> R0;
  double R1 = 0.03;
  std::string bound = "exact";
  double spacing = 0.01;
  std::optional<double> b_max;
  int max_iterations = 500;
  bool force = false;
  bool refine = false;
};

int cmd_curve(const Common& c, const CurveArgs& a) {
  const ModelParams p = c.params();
  const BoundForm form = parse_bound(a.bound);
  const double tol = c.tol.value_or(1e-10);
  if (!(a.spacing > 0.0)) throw ValidationError("--spacing must be > 0");
  const double r0 = a.R0.value_or(rounded_up(min_R0(a.R1, p, form)));
  const Rectangle rect{r0, a.R1};
  rect.validate();

  const auto dir = out_dir(c);
  const auto cert = certify_rectangle(rect, p, form);
  if (!cert.admissible && !a.force) {
    write_json(dir / "certificate.json", io::certificate_json(cert));
    print_failed(cert.checks, "certificate");
    throw VerificationFailure("rectangle is not admissible; certificate written, --force to solve");
  }

  SolveOptions opts;
  opts.tol = tol;
  opts.spacing = a.spacing;
  opts.b_max = a.b_max;
  opts.max_iterations = a.max_iterations;
  const auto inv = solve_invariant(rect, p, opts);
  {
    std::ofstream os(dir / "curve.csv");
    io::write_curve_csv(os, inv.curve);
  }
  json j = {{"lambda", p.lambda},
            {"beta", p.beta},
            {"R0", rect.R0},
            {"R1", rect.R1},
            {"certificate", io::certificate_json(cert)},
            {"diagnostics", io::curve_diagnostics_json(inv.diagnostics)},
            {"sup_abs", inv.curve.sup_abs()},
            {"lipschitz", inv.curve.lipschitz()}};
  if (a.refine) {
    SolveOptions half = opts;
    half.spacing = opts.spacing / 2.0;
    const auto fine = solve_invariant(rect, p, half);
    double diff = 0.0;
    for (std::size_t i = 0; i < inv.curve.b.size(); ++i)
      diff = std::max(diff, std::abs(inv.curve.a[i] - fine.curve(inv.curve.b[i])));
    j["refinement"] = {{"spacing", half.spacing}, {"max_difference", diff}};
  }
  write_json(dir / "curve.json", j);
  std::cout << "curve: R0=" << io::format_double(r0) << " R1=" << io::format_double(a.R1)
            << ", " << inv.diagnostics.iterations << " iterations, sup|a| "
            << io::format_double(inv.curve.sup_abs()) << ", contraction "
            << io::format_double(inv.diagnostics.contraction_ratio)
            << (inv.diagnostics.clipped ? ", clipped" : "") << '\n';
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  double R0 = 2.56;
  double R1 = 0.03;
  std::string bound = "legacy";
  int grid = 10000;
  std::string g_betas = "0.01";
};

int cmd_verify(const Common& c, const VerifyArgs& a) {
  const ModelParams p = c.params();
  const BoundForm form = parse_bound(a.bound);
  const Rectangle rect{a.R0, a.R1};
  rect.validate();
  if (a.grid < 2) throw ValidationError("--grid must be >= 2");
  const auto betas = parse_list(a.g_betas);
  for (double b : betas)
    if (!(b > 0.0)) throw ValidationError("--g-betas entries must be > 0");

  bool ok = true;
  json j;
  const auto cert = certify_rectangle(rect, p, form);
  j["certificate"] = io::certificate_json(cert);
  ok = ok && cert.admissible;
  print_failed(cert.checks, "certificate");
  if (form == BoundForm::Legacy)
    j["certificate_exact"] = io::certificate_json(certify_rectangle(rect, p, BoundForm::Exact));

  if (p.lambda == 2.0 && p.beta == 0.0) {
    const auto est = verify_segment_estimates(p, a.grid);
    j["segment_estimates"] = io::segment_estimates_json(est);
    ok = ok && est.closed_form_pass;
    print_failed(est.closed_form, "segment");
  } else {
    j["segment_estimates"] = "skipped: requires lambda = 2 and beta = 0";
  }

  json g = json::array();
  for (double b : betas) {
    ModelParams q = p;
    q.beta = b;
    const auto rep = verify_g_bounds(q, GRegion{}, true);
    g.push_back(io::g_bounds_json(rep));
    ok = ok && rep.holds;
  }
  j["g_bounds"] = g;
  j["pass"] = ok;
  write_json(out_dir(c) / "report.json", j);
  std::cout << "verify: " << (ok ? "pass" : "FAIL") << " (" << io::to_string(form) << " bound, R0="
            << io::format_double(a.R0) << ", R1=" << io::format_double(a.R1) << ")\n";
  if (!ok) throw VerificationFailure("verification failed");
  return 0;
}

// ------------------------------------------------------------------ figure

struct FigureArgs {
  double t_lo = -0.25;
  double t_hi = -0.15;
  int iterates = 4;
  int samples = 201;
  double R0 = 2.56;
  double R1 = 0.2;
};

int cmd_figure(const Common& c, const FigureArgs& a) {
  const ModelParams p = c.params();
  const auto lines = iterate_segment(Segment::ray_image(a.t_lo, a.t_hi, p.lambda), a.iterates, p,
                                     a.samples);
  const auto inv = solve_invariant({a.R0, a.R1}, p);
  const auto dir = out_dir(c);
  {
    std::ofstream os(dir / "figure_polylines.csv");
    io::write_polylines_csv(os, lines);
  }
  {
    std::ofstream os(dir / "figure_curve.csv");
    io::write_curve_csv(os, inv.curve);
  }
  std::cout << "figure: " << lines.size() << " polylines, curve on [" << io::format_double(a.R0)
            << ", " << io::format_double(inv.curve.b_max) << "]\n";
  return 0;
}

// ------------------------------------------------------------------ config

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Appends `--key=value` for every config entry whose flag is not already on
// the command line. Unknown keys are left to the parser to reject.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config")
      throw ValidationError(path + ":" + std::to_string(lineno) + ": bad key");
    if (!given(key)) extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar profiles of dyadic shell models", "dyadic"};
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim;
  ProfileArgs prof;
  CurveArgs curve;
  VerifyArgs ver;
  FigureArgs fig;

  auto* s = app.add_subcommand("simulate", "integrate the truncated shell system");
  add_common(s, common);
  s->add_option("--shells", sim.shells, "truncation index N")->capture_default_str();
  s->add_option("--t-end", sim.t_end, "final time")->capture_default_str();
  s->add_option("--initial", sim.initial, "pulse, zero, fixed-point or a comma list")
      ->capture_default_str();
  s->add_option("--output-interval", sim.output_interval, "sample spacing; 0 records every step")->capture_default_str();
  s->add_option("--max-steps", sim.max_steps, "step budget before the run is declared stalled")->capture_default_str();
  s->add_option("--delta", sim.delta, "exponent shift of the weighted energy")->capture_default_str();

  auto* pr = app.add_subcommand("profile", "select alpha0 and write the profile");
  add_common(pr, common);
  pr->add_option("--method", prof.method, "bisect, curve or both")->capture_default_str();
  pr->add_option("--n-max", prof.n_max, "last profile index")->capture_default_str();
  pr->add_option("--threshold", prof.threshold, "escape threshold on |a_n|")->capture_default_str();
  pr->add_option("--classify-steps", prof.classify_steps, "recursion steps per orbit classification")->capture_default_str();
  pr->add_option("--R0", prof.R0, "curve rectangle (default: smallest certified)");
  pr->add_option("--R1", prof.R1, "strip half-width")->capture_default_str();
  pr->add_option("--sweep", prof.sweep, "comma list of beta values for sweep.csv");

  auto* cu = app.add_subcommand("curve", "compute the invariant curve");
  add_common(cu, common);
  cu->add_option("--R0", curve.R0, "default: smallest admissible, rounded up");
  cu->add_option("--R1", curve.R1, "strip half-width")->capture_default_str();
  cu->add_option("--bound", curve.bound, "exact or legacy")->capture_default_str();
  cu->add_option("--spacing", curve.spacing, "grid spacing in b")->capture_default_str();
  cu->add_option("--b-max", curve.b_max, "default R0 + 60");
  cu->add_option("--max-iterations", curve.max_iterations, "graph transform iterations")->capture_default_str();
  cu->add_flag("--force", curve.force, "solve even when the rectangle is not admissible");
  cu->add_flag("--refine", curve.refine, "repeat at half spacing and report the difference");

  auto* ve = app.add_subcommand("verify", "check the rectangle, segment and g-bound inequalities");
  add_common(ve, common);
  ve->add_option("--R0", ver.R0, "rectangle lower edge in b")->capture_default_str();
  ve->add_option("--R1", ver.R1, "strip half-width")->capture_default_str();
  ve->add_option("--bound", ver.bound, "exact or legacy")->capture_default_str();
  ve->add_option("--grid", ver.grid, "sample points for the segment estimates")->capture_default_str();
  ve->add_option("--g-betas", ver.g_betas, "comma list of beta > 0")->capture_default_str();

  auto* fi = app.add_subcommand("figure", "segment iterates and invariant curve for plotting");
  add_common(fi, common);
  fi->add_option("--t-lo", fig.t_lo, "segment start")->capture_default_str();
  fi->add_option("--t-hi", fig.t_hi, "segment end")->capture_default_str();
  fi->add_option("--iterates", fig.iterates, "number of images drawn")->capture_default_str();
  fi->add_option("--samples", fig.samples, "points per polyline")->capture_default_str();
  fi->add_option("--R0", fig.R0, "curve rectangle lower edge")->capture_default_str();
  fi->add_option("--R1", fig.R1, "curve strip half-width")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (s->parsed()) return cmd_simulate(common, sim);
    if (pr->parsed()) return cmd_profile(common, prof);
    if (cu->parsed()) return cmd_curve(common, curve);
    if (ve->parsed()) return cmd_verify(common, ver);
    if (fi->parsed()) return cmd_figure(common, fig);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
