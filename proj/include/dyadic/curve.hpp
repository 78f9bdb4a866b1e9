#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dyadic/model.hpp"
#include "dyadic/plane.hpp"

namespace dyadic {

/// Curve b ↦ a sampled on a uniform grid over [R0, b_max].
struct CurveGrid {
  Rectangle rect;
  double b_max = 0.0;
  double spacing = 0.01;
  std::vector<double> b;
  std::vector<double> a;
  double lipschitz_bound = 1.0;

  /// Grid with a ≡ value.
  static CurveGrid constant(const Rectangle& rect, double b_max, double spacing, double value);

  /// Linear interpolation; γ(b) = γ(b_max) beyond the grid. Requires b >= R0.
  double operator()(double b) const;

  double sup_abs() const;
  /// max |a_{i+1} − a_i| / (b_{i+1} − b_i).
  double lipschitz() const;
};

double sup_distance(const CurveGrid& lhs, const CurveGrid& rhs);

/// Error term in AB as a function of (a, b).
using ErrorFn = std::function<double(double, double)>;

ErrorFn error_fn(const ModelParams& params);

struct TransformOptions {
  int max_inner = 100;
  double inner_tol = 1e-15;
};

struct TransformResult {
  CurveGrid curve;
  bool clipped = false;
  double max_abs_unclipped = 0.0;
  int max_inner_iterations = 0;
};

/// One application of T = cut ∘ F^{-1}: for every abscissa b_i the ordinate
/// solving a = −(e(a, b_i) + γ(b_i + c0 + e(a, b_i))) / 2, clipped to
/// [−R1, R1]. Throws ContractionViolation when the scalar iteration does not
/// settle within max_inner steps.
TransformResult graph_transform(const CurveGrid& curve, const ErrorFn& error, double c0,
                                const TransformOptions& options = {});
TransformResult graph_transform(const CurveGrid& curve, const ModelParams& params,
                                const TransformOptions& options = {});

struct SolveOptions {
  double tol = 1e-10;
  std::optional<double> b_max;  // default R0 + 60
  double spacing = 0.01;
  int max_iterations = 500;
  TransformOptions transform;
};

struct CurveDiagnostics {
  int iterations = 0;
  double residual = 0.0;           // sup |Tγ − γ| at the returned curve
  double contraction_ratio = 0.0;  // max successive sup-change ratio
  bool clipped = false;            // clipping was active in the final transform
  double max_abs_unclipped = 0.0;
  std::optional<double> c_prime;
};

struct InvariantCurve {
  CurveGrid curve;
  CurveDiagnostics diagnostics;
};

/// Iterates graph_transform from γ ≡ 0 until the sup change falls below tol.
InvariantCurve solve_invariant(const Rectangle& rect, const ModelParams& params,
                               const SolveOptions& options = {});
InvariantCurve solve_invariant(const Rectangle& rect, const ErrorFn& error, double c0,
                               const SolveOptions& options = {});

struct DecayFit {
  double c_prime = 0.0;
  double fit_residual = 0.0;  // RMS residual of ln|γ| about the line
  double b_lo = 0.0;
  double b_hi = 0.0;
};

/// Slope of ln|γ(b)| on the middle half of the grid, negated. Ordinates below
/// 1e-15 are dropped; throws FitFailure when fewer than three remain.
DecayFit decay_rate(const CurveGrid& curve);

}  // namespace dyadic
