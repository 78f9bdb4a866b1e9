#pragma once

#include <optional>
#include <vector>

#include "dyadic/curve.hpp"
#include "dyadic/model.hpp"
#include "dyadic/wide.hpp"

namespace dyadic {

enum class Verdict { PositiveSide, NegativeSide, Undecided };

const char* to_string(Verdict v);

struct OrbitClass {
  Verdict verdict = Verdict::Undecided;
  std::optional<int> escape_index;
  std::optional<double> escape_value;  // a_n at the escape index
  /// sign of (−1)^n a_n at up to three successive threshold crossings
  std::vector<int> crossing_signs;
};

struct ClassifyOptions {
  double threshold = 1.0;
  int n_max = 200;
};

/// Follows a_n = ln(α_{n-1}/α_n) + c0/3 along the recursion from (0, α0).
/// At the first n with |a_n| > threshold the verdict is the sign of
/// (−1)^n a_n; the linear part multiplies deviations by −2 per step, so the
/// parity factor makes the verdict independent of the crossing step.
OrbitClass classify_orbit(const Wide& alpha0, const ModelParams& params,
                          const ClassifyOptions& options = {});
OrbitClass classify_orbit(double alpha0, const ModelParams& params,
                          const ClassifyOptions& options = {});

struct AlphaSolution {
  Wide alpha0_wide;
  double alpha0 = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
  int iterations = 0;
  std::vector<Verdict> verdicts;  // verdict of every probed midpoint
};

/// Bisection on α0 until the bracket is narrower than tol. Both endpoints
/// must carry opposite decided verdicts; an undecided endpoint is retried
/// once with twice the step budget. Throws BracketError otherwise.
AlphaSolution bisect_alpha0(const Wide& lo, const Wide& hi, const ModelParams& params,
                            double tol = 1e-30, const ClassifyOptions& options = {});

/// Expands [0.1, 1] geometrically by a factor 2 on both sides until the
/// endpoint verdicts differ.
std::pair<double, double> bracket_alpha0(const ModelParams& params,
                                         const ClassifyOptions& options = {});

/// Bracket search followed by bisection.
AlphaSolution solve_alpha0(const ModelParams& params, double tol = 1e-30,
                           const ClassifyOptions& options = {});

struct Intersection {
  int iterate = 0;     // N: number of F applications after F(L)
  double t_star = 0.0; // a-coordinate of F(0, α0) when β = 0
  double alpha0 = 0.0;
  double transversality_margin = 0.0;
  int crossings = 0;   // sign changes found on the scan
};

struct IntersectOptions {
  double t_lo = -3.0;
  double t_hi = 1.5;
  int samples = 20000;
};

/// Crossing of F^N(F(L)) with the curve, parametrized by t = ln α0 + c0/3.
/// Throws NoIntersection when the scan finds no sign change of
/// a_N(t) − γ(b_N(t)) on the part of the scan where b_N >= R0.
Intersection intersect_with_curve(const CurveGrid& curve, int N, const ModelParams& params,
                                  const IntersectOptions& options = {});
/// Same scan for the AB map (a, b) ↦ (−2a − e, b + c0 + e) with a supplied
/// error term, started on the ray image (t, 2t − 2c0/3).
Intersection intersect_with_curve(const CurveGrid& curve, int N, const ErrorFn& error, double c0,
                                  const IntersectOptions& options = {});

/// Tries N = n_first, n_first + 1, ... n_last.
Intersection find_intersection(const CurveGrid& curve, const ModelParams& params,
                               int n_first = 1, int n_last = 12,
                               const IntersectOptions& options = {});

}  // namespace dyadic
