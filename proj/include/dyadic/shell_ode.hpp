#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

/// Amplitudes a_0 .. a_N at one instant.
struct ShellState {
  double time = 0.0;
  std::vector<double> values;
};

/// Right-hand side of the truncated shell system with precomputed powers of
/// lambda. Evaluations allocate nothing.
class ShellSystem {
 public:
  explicit ShellSystem(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  std::size_t size() const { return pow_.size(); }

  /// out_j = λ^j a_{j-1}² − λ^{j+1} a_j a_{j+1}
  ///         + β(λ^j a_{j-1} a_j − λ^{j+1} a_{j+1}²) + f δ_{j0}
  void operator()(std::span<const double> a, std::span<double> out) const;

 private:
  ModelParams params_;
  std::vector<double> pow_;  // λ^j, j = 0..N+1
};

/// da/dt for a single state. Throws ValidationError on a size mismatch and on
/// non-finite entries.
std::vector<double> rhs(const ShellState& state, const ModelParams& params);

struct IntegrateOptions {
  double tol = 1e-10;
  /// Explicit output times in (t0, t_end]; takes precedence over output_interval.
  std::vector<double> output_times;
  /// Uniform output spacing. Zero records every accepted step.
  double output_interval = 0.0;
  std::size_t max_steps = 200'000'000;
};

struct Trajectory {
  std::vector<ShellState> states;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Dormand–Prince 5(4) with PI step-size control, mixed absolute/relative
/// tolerance `tol`. The initial state is the first recorded sample.
///
/// Throws IntegrationStalled (carrying the last reached time) when the step
/// size underflows or the step budget is exhausted.
Trajectory integrate(const ShellState& initial, const ModelParams& params, double t_end,
                     const IntegrateOptions& options = {});

/// Σ a_j² for delta = 0, Σ λ^{(2/3+δ)j} a_j² otherwise.
double energy(const ShellState& state, const ModelParams& params, double delta = 0.0);

/// Stationary state of the forced β = 0 system on the infinite chain:
/// a_j = √f λ^{-(j+1)/3}, j = 0..N.
std::vector<double> forced_fixed_point(const ModelParams& params);

struct SelfSimilarOptions {
  /// Trailing fraction of the time window used to fit t0 from 1/a_0(t).
  double fit_fraction = 0.25;
  /// Highest shell entering the sup; negative selects N / 2.
  int max_shell = -1;
};

struct SelfSimilarMetric {
  double t0 = 0.0;
  double slope = 0.0;  // fitted d(1/a_0)/dt, equals 1/a_0* for an exact profile
  std::vector<double> times;
  std::vector<double> metric;  // sup_j |(t − t0) a_j(t) / a_j* − 1|
  std::optional<double> decay_rate;
  int max_shell = 0;
};

/// Distance of a trajectory from the self-similar family a_j*/(t − t0).
///
/// Samples with t <= t0 are skipped. The decay rate is the least-squares
/// slope of −ln(metric) from the first sample up to the minimum of the
/// metric; it is absent when fewer than three positive samples remain.
SelfSimilarMetric selfsim_convergence_metric(const Trajectory& trajectory,
                                             std::span<const double> a_star,
                                             const SelfSimilarOptions& options = {});

}  // namespace dyadic
