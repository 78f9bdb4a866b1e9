#pragma once

#include <array>
#include <string>
#include <vector>

#include "dyadic/model.hpp"

namespace dyadic {

// Charts of the positive quadrant:
//   XY  (x, y) = (α_{n-1}, α_n)
//   UV  u = ln x, v = ln y
//   AB  a = u − v + c0/3, b = 2u + v
// In AB the map is (a, b) ↦ (−2a − e, b + c0 + e) with a scalar error e.
enum class Chart { XY, UV, AB };

struct PlanePoint {
  double first = 0.0;
  double second = 0.0;
  Chart chart = Chart::XY;
};

struct ChartConstants {
  double c0 = 0.0;  // ln λ²
  double c1 = 0.0;  // λ^{-2}
  double c2 = 0.0;  // λ^{-10/9}, prefactor of the β = 0 error in AB

  static ChartConstants from_lambda(double lambda);
};

using Mat2 = std::array<std::array<double, 2>, 2>;

PlanePoint to_chart(const PlanePoint& p, Chart target, double lambda);

/// F (β = 0) or F_β in the chart of `p`.
PlanePoint map_F(const PlanePoint& p, const ModelParams& params);

/// F applied to the ray point (0, α0): the XY point (α0, α_1(α0)).
PlanePoint lift_ray(double alpha0, const ModelParams& params);

/// e(a, b) for β = 0, e_β(a, b) otherwise: the b-increment of F in AB minus c0.
double error_term(double a, double b, const ModelParams& params);

/// exp(e(a, b)) − 1, evaluated without forming the logarithm.
double error_excess(double a, double b, const ModelParams& params);

/// Z_β at the AB point (a, b). Zero for β = 0.
double z_beta(double a, double b, const ModelParams& params);

/// The region Z_β <= 1/2 where the β > 0 error admits its series form.
inline constexpr double kZBetaLimit = 0.5;

/// Jacobian of F in AB with (J)_{ij} = ∂_j F_i. Analytic for β = 0, central
/// differences with relative step 1e-6 otherwise.
Mat2 jacobian_F_ab(double a, double b, const ModelParams& params);

/// Central-difference Jacobian, exposed for cross-checks.
Mat2 jacobian_F_ab_fd(double a, double b, const ModelParams& params, double rel_step = 1e-6);

/// X = [−R1, R1] × [R0, ∞) and X⁺ = [−R1, R1] × [R0 − R1 − c0, ∞).
struct Rectangle {
  double R0 = 0.0;
  double R1 = 0.0;

  void validate() const;
};

enum class BoundForm {
  /// Sup norms of the error term of map_F over X⁺. β = 0 uses the closed form
  /// at the corner (a, b) = (−R1, R0 − R1 − c0); β > 0 maximizes on a grid.
  Exact,
  /// λ^{-2/9} e^{-(4R0 − 5R1)/3}: prefactor λ^{-26/9} evaluated at the corner
  /// (R0 − R1 − c0, −R1). Reproduces the published rectangle constants but does
  /// not bound the error term of map_F.
  Legacy,
};

struct InequalityCheck {
  std::string name;
  double value = 0.0;  // worst value over the checked set
  double bound = 0.0;
  bool upper = true;   // value < bound (true) or value > bound (false)
  bool holds = false;
  double margin = 0.0; // signed distance to the bound, positive when it holds
};

/// value < bound (value <= bound unless strict).
InequalityCheck check_below(std::string name, double value, double bound, bool strict = true);
/// value > bound (value >= bound unless strict).
InequalityCheck check_above(std::string name, double value, double bound, bool strict = true);

struct BoundCertificate {
  BoundForm form = BoundForm::Exact;
  Rectangle rect;
  double norm_E = 0.0;
  double norm_gradE = 0.0;
  double norm_H_bound = 0.0;
  double norm_gradH_bound = 0.0;
  std::vector<InequalityCheck> checks;
  bool admissible = false;
};

BoundCertificate certify_rectangle(const Rectangle& rect, const ModelParams& params,
                                   BoundForm form = BoundForm::Exact);

/// Smallest R0 for which certify_rectangle(R0, R1) is admissible (β = 0).
double min_R0(double R1, const ModelParams& params, BoundForm form = BoundForm::Exact);

struct GRegion {
  double log_r0 = 0.5;    // |a| <= log_r0
  double r2 = 6.0;        // b >= r2
  double b_span = 30.0;   // b sampled in [r2, r2 + b_span]
  double b_plateau = 200.0;
  int a_points = 41;
  int b_points = 61;
  double C = 10.0;        // tested constant when not fitting
};

struct GBoundsReport {
  double beta = 0.0;
  double C_g1 = 0.0;  // smallest C with |g1(a)| <= βC|a|
  double C_g2 = 0.0;  // smallest C with |g2(a, b) − g2⁰(a)| <= βC
  double C = 0.0;
  double g1_at_zero = 0.0;
  double max_abs_g1 = 0.0;
  double max_g2_deviation = 0.0;
  bool fitted = false;
  bool holds = false;
  int points = 0;
};

/// Splits e_β = ln(1 + g1(a) + g2(a, b) e^{-b/3}) on a grid: g1 is read at
/// b = b_plateau, g2 from the remainder. g2⁰(a) = λ^{-10/9} e^{-4a/3} is the
/// β = 0 value. With `fit` the smallest admissible C is reported and `holds`
/// means it is finite; otherwise region.C is tested.
/// Throws PlateauError when e_β has not settled at b_plateau.
GBoundsReport verify_g_bounds(const ModelParams& params, const GRegion& region, bool fit);

struct SegmentEstimateReport {
  int grid_points = 0;
  /// Estimates on e(s) = ln(1 + 2^{-10/3} e^{-2s}) and
  /// E(s) = ln(1 + 2^{-42/9} e^{6s + 2e(s)}), s ∈ [−0.1, −0.01].
  std::vector<InequalityCheck> closed_form;
  /// The same estimates with e, E taken from map_F along J and F(J), plus
  /// containment of J in F(I) for both segment choices.
  std::vector<InequalityCheck> map_consistent;
  bool closed_form_pass = false;
  bool map_consistent_pass = false;
};

/// λ = 2, β = 0 only.
SegmentEstimateReport verify_segment_estimates(const ModelParams& params, int grid_points = 10000);

/// Segment t ↦ origin + t·direction in AB, t ∈ [t_lo, t_hi].
struct Segment {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::array<double, 2> origin{};
  std::array<double, 2> direction{};

  /// {(t, 2t − 2c0/3)}: the image F(L) of the ray x = 0 when β = 0.
  static Segment ray_image(double t_lo, double t_hi, double lambda);
};

struct Polyline {
  int iterate = 0;
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> b;
  bool truncated = false;  // left the Z_β <= 1/2 region (β > 0)
};

/// Samples of the segment and its images F(I) .. F^N(I).
std::vector<Polyline> iterate_segment(const Segment& seg, int iterates, const ModelParams& params,
                                      int samples);

}  // namespace dyadic
