#include "dyadic/shell_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

ShellSystem::ShellSystem(const ModelParams& params) : params_(params) {
  params_.validate();
  pow_.resize(params_.state_size() + 1);
  double p = 1.0;
  for (auto& v : pow_) {
    v = p;
    p *= params_.lambda;
  }
}

void ShellSystem::operator()(std::span<const double> a, std::span<double> out) const {
  const std::size_t n = size() - 1;
  const double beta = params_.beta;
  for (std::size_t j = 0; j < n; ++j) {
    const double prev = j == 0 ? 0.0 : a[j - 1];
    const double next = j + 1 < n ? a[j + 1] : 0.0;
    const double lj = pow_[j];
    const double lj1 = pow_[j + 1];
    out[j] = lj * prev * prev - lj1 * a[j] * next + beta * (lj * prev * a[j] - lj1 * next * next);
  }
  out[0] += params_.forcing;
}

namespace {

void check_state(const ShellState& state, const ModelParams& params) {
  if (state.values.size() != params.state_size()) {
    std::ostringstream msg;
    msg << "state has " << state.values.size() << " entries, expected " << params.state_size();
    throw ValidationError(msg.str());
  }
  if (!std::isfinite(state.time)) throw ValidationError("invalid state: non-finite time");
  for (double v : state.values)
    if (!std::isfinite(v)) throw ValidationError("invalid state: non-finite amplitude");
}

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class DoPri5 {
 public:
  DoPri5(const ShellSystem& sys, double tol) : sys_(sys), tol_(tol), n_(sys.size() - 1) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_})
      v->assign(n_, 0.0);
  }

  double norm(const std::vector<double>& v, const std::vector<double>& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = tol_ + tol_ * std::abs(y[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(n_));
  }

  double initial_step(double t, const std::vector<double>& y, double span) {
    sys_(y, k1_);
    const double d0 = norm(y, y);
    const double d1 = norm(k1_, y);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h0 * k1_[i];
    sys_(tmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i) err_[i] = k2_[i] - k1_[i];
    const double d2 = norm(err_, y) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    (void)t;
    return std::min({100.0 * h0, h1, span});
  }

  // One trial step from (t, y) with k1_ = f(y). Returns the error norm and
  // leaves the candidate in ynew_, f(ynew_) in k7_.
  double trial(const std::vector<double>& y, double h) {
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    sys_(tmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    sys_(tmp_, k3_);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    sys_(tmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    sys_(tmp_, k5_);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] =
          y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    sys_(tmp_, k6_);
    for (std::size_t i = 0; i < n_; ++i)
      ynew_[i] =
          y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    sys_(ynew_, k7_);
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc = tol_ + tol_ * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      s += (e / sc) * (e / sc);
    }
    return std::sqrt(s / static_cast<double>(n_));
  }

  void accept(std::vector<double>& y) {
    y.swap(ynew_);
    k1_.swap(k7_);
  }

  void prime(const std::vector<double>& y) { sys_(y, k1_); }

 private:
  const ShellSystem& sys_;
  double tol_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

}  // namespace

std::vector<double> rhs(const ShellState& state, const ModelParams& params) {
  check_state(state, params);
  ShellSystem sys(params);
  std::vector<double> out(params.state_size());
  sys(state.values, out);
  return out;
}

Trajectory integrate(const ShellState& initial, const ModelParams& params, double t_end,
                     const IntegrateOptions& options) {
  check_state(initial, params);
  if (!(options.tol > 0.0)) throw ValidationError("integrate: tol must be > 0");
  if (!(t_end > initial.time)) throw ValidationError("integrate: t_end must exceed start time");

  std::vector<double> outputs = options.output_times;
  if (outputs.empty() && options.output_interval > 0.0) {
    const double span = t_end - initial.time;
    const auto count = static_cast<std::size_t>(std::floor(span / options.output_interval + 1e-9));
    for (std::size_t k = 1; k <= count; ++k)
      outputs.push_back(initial.time + static_cast<double>(k) * options.output_interval);
    if (outputs.empty() || outputs.back() < t_end - 1e-12 * span) outputs.push_back(t_end);
    else outputs.back() = t_end;
  }
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    if (!(outputs[k] > initial.time) || outputs[k] > t_end ||
        (k > 0 && !(outputs[k] > outputs[k - 1])))
      throw ValidationError("integrate: output times must increase within (t0, t_end]");
  }
  if (!outputs.empty() && outputs.back() < t_end) outputs.push_back(t_end);
  const bool every_step = outputs.empty();

  ShellSystem sys(params);
  DoPri5 stepper(sys, options.tol);
  Trajectory traj;
  traj.states.push_back(initial);

  std::vector<double> y = initial.values;
  double t = initial.time;
  double h = stepper.initial_step(t, y, t_end - t);
  stepper.prime(y);

  constexpr double beta_pi = 0.04;
  constexpr double expo = 0.2 - 0.75 * beta_pi;
  constexpr double safe = 0.9;
  double err_old = 1e-4;
  std::size_t next_out = 0;
  bool last_rejected = false;

  while (t < t_end) {
    if (traj.accepted_steps + traj.rejected_steps >= options.max_steps)
      throw IntegrationStalled("integration stalled: step budget exhausted", t);
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      throw IntegrationStalled("integration stalled: step size underflow", t);
    const double target = every_step ? t_end : outputs[next_out];
    const double h_proposed = h;
    bool hits = false;
    if (t + h >= target) {
      h = target - t;
      hits = true;
    }

    const double err = stepper.trial(y, h);
    if (!std::isfinite(err)) {
      ++traj.rejected_steps;
      h = 0.2 * h_proposed;
      last_rejected = true;
      continue;
    }
    const double fac11 = std::pow(err, expo);
    if (err <= 1.0) {
      const double fac = std::clamp(fac11 / std::pow(err_old, beta_pi) / safe, 0.1, 5.0);
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);
      stepper.accept(y);
      t = hits ? target : t + h;
      ++traj.accepted_steps;
      last_rejected = false;
      if (every_step || hits) {
        traj.states.push_back(ShellState{t, y});
        if (!every_step) ++next_out;
      }
      // An output time that shortened this step should not shrink the next one.
      h = hits ? std::max(h_new, h_proposed) : h_new;
    } else {
      ++traj.rejected_steps;
      h /= std::min(5.0, fac11 / safe);
      last_rejected = true;
    }
  }
  return traj;
}

double energy(const ShellState& state, const ModelParams& params, double delta) {
  if (delta < 0.0) throw ValidationError("energy: delta must be >= 0");
  double sum = 0.0;
  if (delta == 0.0) {
    for (double v : state.values) sum += v * v;
    return sum;
  }
  const double ratio = std::pow(params.lambda, 2.0 / 3.0 + delta);
  double w = 1.0;
  for (double v : state.values) {
    sum += w * v * v;
    w *= ratio;
  }
  return sum;
}

std::vector<double> forced_fixed_point(const ModelParams& params) {
  params.validate();
  if (params.beta != 0.0)
    throw ValidationError("forced_fixed_point: unsupported configuration, requires beta = 0");
  if (!(params.forcing > 0.0)) throw ValidationError("forced_fixed_point: requires forcing > 0");
  std::vector<double> a(params.state_size());
  const double root_f = std::sqrt(params.forcing);
  for (std::size_t j = 0; j < a.size(); ++j)
    a[j] = root_f * std::pow(params.lambda, -(static_cast<double>(j) + 1.0) / 3.0);
  return a;
}

SelfSimilarMetric selfsim_convergence_metric(const Trajectory& trajectory,
                                             std::span<const double> a_star,
                                             const SelfSimilarOptions& options) {
  const auto& states = trajectory.states;
  if (states.size() < 3) throw ValidationError("selfsim metric: trajectory too short");
  const std::size_t n = states.front().values.size();
  const int max_shell = options.max_shell < 0 ? static_cast<int>(n - 1) / 2 : options.max_shell;
  if (static_cast<std::size_t>(max_shell) >= n || static_cast<std::size_t>(max_shell) >= a_star.size())
    throw ValidationError("selfsim metric: max_shell outside the state or profile");
  for (int j = 0; j <= max_shell; ++j)
    if (a_star[static_cast<std::size_t>(j)] == 0.0)
      throw ValidationError("selfsim metric: profile entry is zero");
  if (!(options.fit_fraction > 0.0 && options.fit_fraction <= 1.0))
    throw ValidationError("selfsim metric: fit_fraction must lie in (0, 1]");

  const double t_first = states.front().time;
  const double t_last = states.back().time;
  const double t_fit = t_last - options.fit_fraction * (t_last - t_first);

  // Linear least squares of 1/a_0 against t.
  double sw = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& s : states) {
    if (s.time < t_fit) continue;
    if (!(s.values[0] > 0.0)) throw FitFailure("selfsim metric: a_0 vanishes on the fit window");
    const double yv = 1.0 / s.values[0];
    sw += 1;
    st += s.time;
    sy += yv;
    stt += s.time * s.time;
    sty += s.time * yv;
  }
  const double det = sw * stt - st * st;
  if (sw < 2 || !(std::abs(det) > 0.0)) throw FitFailure("selfsim metric: degenerate t0 fit");
  const double slope = (sw * sty - st * sy) / det;
  const double intercept = (sy - slope * st) / sw;
  if (!(slope != 0.0) || !std::isfinite(slope)) throw FitFailure("selfsim metric: zero slope");

  SelfSimilarMetric out;
  out.slope = slope;
  out.t0 = -intercept / slope;
  out.max_shell = max_shell;
  for (const auto& s : states) {
    const double dt = s.time - out.t0;
    if (!(dt > 0.0)) continue;
    double m = 0.0;
    for (int j = 0; j <= max_shell; ++j) {
      const auto k = static_cast<std::size_t>(j);
      m = std::max(m, std::abs(dt * s.values[k] / a_star[k] - 1.0));
    }
    out.times.push_back(s.time);
    out.metric.push_back(m);
  }

  if (!out.metric.empty()) {
    const auto min_it = std::min_element(out.metric.begin(), out.metric.end());
    const auto last = static_cast<std::size_t>(min_it - out.metric.begin());
    double fw = 0, ft = 0, fy = 0, ftt = 0, fty = 0;
    for (std::size_t k = 0; k <= last; ++k) {
      if (!(out.metric[k] > 0.0)) continue;
      const double yv = std::log(out.metric[k]);
      fw += 1;
      ft += out.times[k];
      fy += yv;
      ftt += out.times[k] * out.times[k];
      fty += out.times[k] * yv;
    }
    const double fdet = fw * ftt - ft * ft;
    if (fw >= 3 && std::abs(fdet) > 0.0) out.decay_rate = -(fw * fty - ft * fy) / fdet;
  }
  return out;
}

}  // namespace dyadic
