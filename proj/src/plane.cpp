#include "dyadic/plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyadic/errors.hpp"
#include "dyadic/recursion.hpp"

namespace dyadic {

ChartConstants ChartConstants::from_lambda(double lambda) {
  ChartConstants k;
  k.c0 = 2.0 * std::log(lambda);
  k.c1 = std::pow(lambda, -2.0);
  k.c2 = std::pow(lambda, -10.0 / 9.0);
  return k;
}

namespace {

struct UV {
  double u;
  double v;
};

UV to_uv(const PlanePoint& p, double c0) {
  switch (p.chart) {
    case Chart::XY:
      if (!(p.first > 0.0 && p.second > 0.0))
        throw DomainError("XY point outside the positive quadrant");
      return {std::log(p.first), std::log(p.second)};
    case Chart::UV:
      return {p.first, p.second};
    case Chart::AB: {
      const double u = (p.first + p.second - c0 / 3.0) / 3.0;
      return {u, p.second - 2.0 * u};
    }
  }
  return {};
}

PlanePoint from_uv(UV uv, Chart target, double c0) {
  switch (target) {
    case Chart::XY:
      return {std::exp(uv.u), std::exp(uv.v), Chart::XY};
    case Chart::UV:
      return {uv.u, uv.v, Chart::UV};
    case Chart::AB:
      return {uv.u - uv.v + c0 / 3.0, 2.0 * uv.u + uv.v, Chart::AB};
  }
  return {};
}

// exp(e) − 1 in terms of r = x/y and iy = 1/y.
//
// With p = λ²x²/y, q = βλx + 1 and s = √(1 + Z), the second component of F is
// 2(p + q)/(1 + s), so exp(e) = 2(1 + q/p)/(1 + s) and
// exp(e) − 1 = (2q/p − Z/(1 + s)) / (1 + s).
double excess_from_ratios(double r, double iy, const ModelParams& params) {
  const double lam = params.lambda;
  const double beta = params.beta;
  const double tail = iy / (lam * lam * r * r);
  if (beta == 0.0) return tail;
  const double q_over_p = beta / (lam * r) + tail;
  const double z = 4.0 * beta / lam * (lam * lam * r * r + beta * lam * r + iy);
  const double s = std::sqrt(1.0 + z);
  return (2.0 * q_over_p - z / (1.0 + s)) / (1.0 + s);
}

struct Ratios {
  double r;
  double iy;
};

Ratios ratios_ab(double a, double b, double c0) {
  const double v = (b - 2.0 * a + 2.0 * c0 / 3.0) / 3.0;
  return {std::exp(a - c0 / 3.0), std::exp(-v)};
}

}  // namespace

PlanePoint to_chart(const PlanePoint& p, Chart target, double lambda) {
  if (!(lambda > 1.0)) throw ValidationError("to_chart: lambda must be > 1");
  const double c0 = 2.0 * std::log(lambda);
  if (p.chart == target) {
    if (p.chart == Chart::XY) (void)to_uv(p, c0);
    return p;
  }
  return from_uv(to_uv(p, c0), target, c0);
}

double error_excess(double a, double b, const ModelParams& params) {
  const auto k = ChartConstants::from_lambda(params.lambda);
  if (params.beta == 0.0) return k.c2 * std::exp(-(4.0 * a + b) / 3.0);
  const auto rt = ratios_ab(a, b, k.c0);
  return excess_from_ratios(rt.r, rt.iy, params);
}

double error_term(double a, double b, const ModelParams& params) {
  return std::log1p(error_excess(a, b, params));
}

double z_beta(double a, double b, const ModelParams& params) {
  if (params.beta == 0.0) return 0.0;
  const double c0 = 2.0 * std::log(params.lambda);
  const auto rt = ratios_ab(a, b, c0);
  const double lam = params.lambda;
  return 4.0 * params.beta / lam * (lam * lam * rt.r * rt.r + params.beta * lam * rt.r + rt.iy);
}

PlanePoint map_F(const PlanePoint& p, const ModelParams& params) {
  const double c0 = 2.0 * std::log(params.lambda);
  switch (p.chart) {
    case Chart::XY:
      if (!(p.second > 0.0) || p.first < 0.0)
        throw DomainError("map_F: XY point outside the closed positive quadrant");
      return {p.second, next_alpha(p.first, p.second, params), Chart::XY};
    case Chart::UV: {
      const double e = std::log1p(excess_from_ratios(std::exp(p.first - p.second),
                                                     std::exp(-p.second), params));
      return {p.second, 2.0 * p.first - p.second + c0 + e, Chart::UV};
    }
    case Chart::AB: {
      const double e = error_term(p.first, p.second, params);
      return {-2.0 * p.first - e, p.second + c0 + e, Chart::AB};
    }
  }
  return {};
}

PlanePoint lift_ray(double alpha0, const ModelParams& params) {
  if (!(alpha0 > 0.0)) throw DomainError("lift_ray: alpha0 must be > 0");
  return {alpha0, next_alpha(0.0, alpha0, params), Chart::XY};
}

Mat2 jacobian_F_ab_fd(double a, double b, const ModelParams& params, double rel_step) {
  const double ha = rel_step * std::max(1.0, std::abs(a));
  const double hb = rel_step * std::max(1.0, std::abs(b));
  auto F = [&](double x, double y) { return map_F({x, y, Chart::AB}, params); };
  const auto ap = F(a + ha, b), am = F(a - ha, b);
  const auto bp = F(a, b + hb), bm = F(a, b - hb);
  Mat2 J{};
  J[0][0] = (ap.first - am.first) / (2.0 * ha);
  J[1][0] = (ap.second - am.second) / (2.0 * ha);
  J[0][1] = (bp.first - bm.first) / (2.0 * hb);
  J[1][1] = (bp.second - bm.second) / (2.0 * hb);
  return J;
}

Mat2 jacobian_F_ab(double a, double b, const ModelParams& params) {
  if (params.beta != 0.0) return jacobian_F_ab_fd(a, b, params);
  const double w = error_excess(a, b, params);
  const double d = w / (1.0 + w);
  const double ea = -4.0 / 3.0 * d;  // ∂e/∂a = 4 ∂e/∂b
  const double eb = -1.0 / 3.0 * d;
  return Mat2{{{-2.0 - ea, -eb}, {ea, 1.0 + eb}}};
}

void Rectangle::validate() const {
  if (!std::isfinite(R0) || !(R0 > 0.0)) throw ValidationError("rectangle: R0 must be > 0");
  if (!std::isfinite(R1) || !(R1 > 0.0)) throw ValidationError("rectangle: R1 must be > 0");
}

InequalityCheck check_below(std::string name, double value, double bound, bool strict) {
  InequalityCheck c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.upper = true;
  c.holds = strict ? value < bound : value <= bound;
  c.margin = bound - value;
  return c;
}

InequalityCheck check_above(std::string name, double value, double bound, bool strict) {
  InequalityCheck c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.upper = false;
  c.holds = strict ? value > bound : value >= bound;
  c.margin = value - bound;
  return c;
}

namespace {

// Sampled sup norms of e_β and its gradient over X⁺ (truncated at b + 60,
// where the b-dependent part has decayed by e^{-20}).
std::pair<double, double> sampled_norms(const Rectangle& rect, const ModelParams& params,
                                        double c0) {
  constexpr int kA = 41;
  constexpr double kBStep = 0.05;
  constexpr double kBSpan = 60.0;
  const double b_lo = rect.R0 - rect.R1 - c0;
  double norm_e = 0.0;
  double norm_grad = 0.0;
  for (int i = 0; i < kA; ++i) {
    const double a = -rect.R1 + 2.0 * rect.R1 * i / (kA - 1);
    for (double b = b_lo; b <= b_lo + kBSpan + 1e-12; b += kBStep) {
      norm_e = std::max(norm_e, std::abs(error_term(a, b, params)));
      const double ha = 1e-6 * std::max(1.0, std::abs(a));
      const double hb = 1e-6 * std::max(1.0, std::abs(b));
      const double ea = (error_term(a + ha, b, params) - error_term(a - ha, b, params)) / (2 * ha);
      const double eb = (error_term(a, b + hb, params) - error_term(a, b - hb, params)) / (2 * hb);
      norm_grad = std::max({norm_grad, std::abs(ea), std::abs(eb)});
    }
  }
  return {norm_e, norm_grad};
}

}  // namespace

BoundCertificate certify_rectangle(const Rectangle& rect, const ModelParams& params,
                                   BoundForm form) {
  params.validate();
  rect.validate();
  const auto k = ChartConstants::from_lambda(params.lambda);

  BoundCertificate cert;
  cert.form = form;
  cert.rect = rect;
  if (form == BoundForm::Legacy) {
    const double bound =
        std::pow(params.lambda, -2.0 / 9.0) * std::exp(-(4.0 * rect.R0 - 5.0 * rect.R1) / 3.0);
    cert.norm_E = bound;
    cert.norm_gradE = 4.0 / 3.0 * bound;
  } else if (params.beta == 0.0) {
    // e decreases in 4a + b, so the sup over X⁺ sits at a = −R1, b = R0 − R1 − c0.
    const double w = k.c2 * std::exp(-(rect.R0 - 5.0 * rect.R1 - k.c0) / 3.0);
    cert.norm_E = std::log1p(w);
    cert.norm_gradE = 4.0 / 3.0 * w / (1.0 + w);
  } else {
    std::tie(cert.norm_E, cert.norm_gradE) = sampled_norms(rect, params, k.c0);
  }

  cert.norm_H_bound = cert.norm_E;
  cert.norm_gradH_bound = cert.norm_gradE < 1.0
                              ? 2.0 * cert.norm_gradE / (1.0 - cert.norm_gradE)
                              : std::numeric_limits<double>::infinity();
  cert.checks = {
      check_below("|E| <= min(c0, R1)", cert.norm_E, std::min(k.c0, rect.R1), false),
      check_below("|grad E| <= 1/25", cert.norm_gradE, 1.0 / 25.0, false),
      check_below("|h1| <= R1/2", cert.norm_E / 2.0, rect.R1 / 2.0, false),
      check_below("|h2| <= c0", cert.norm_H_bound, k.c0, false),
      check_below("|grad H| <= 1/10", cert.norm_gradH_bound, 0.1, false),
  };
  cert.admissible = std::all_of(cert.checks.begin(), cert.checks.end(),
                                [](const InequalityCheck& c) { return c.holds; });
  return cert;
}

double min_R0(double R1, const ModelParams& params, BoundForm form) {
  params.validate();
  const auto k = ChartConstants::from_lambda(params.lambda);
  if (!(R1 > 0.0) || R1 > std::min(0.03, k.c0))
    throw ValidationError("min_R0: R1 must lie in (0, min(3/100, c0)]");

  double R0 = 0.0;
  if (form == BoundForm::Legacy) {
    // λ^{-2/9} e^{-(4R0 − 5R1)/3} <= min(c0, R1, 3/100)
    const double cap = std::min({k.c0, R1, 0.03});
    R0 = (3.0 * std::log(std::pow(params.lambda, -2.0 / 9.0) / cap) + 5.0 * R1) / 4.0;
  } else if (params.beta == 0.0) {
    // ln(1 + w) <= min(c0, R1) and (4/3) w/(1 + w) <= 1/25 at the corner.
    const double cap = std::min(std::expm1(std::min(k.c0, R1)), 3.0 / 97.0);
    R0 = 5.0 * R1 + k.c0 + 3.0 * std::log(k.c2 / cap);
  } else {
    double lo = 1e-6;
    double hi = std::max(1.0, min_R0(R1, ModelParams{params.lambda, 0.0, 0.0, 2}, form));
    while (!certify_rectangle({hi, R1}, params, form).admissible) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e4) throw NumericalError("min_R0: no admissible rectangle found");
    }
    for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (certify_rectangle({mid, R1}, params, form).admissible ? hi : lo) = mid;
    }
    return hi;
  }
  R0 = std::max(R0, 1e-12);
  // The closed form is the exact boundary; step just inside it.
  for (int it = 0; it < 8 && !certify_rectangle({R0, R1}, params, form).admissible; ++it)
    R0 += 1e-12 * std::max(1.0, R0) * std::pow(10.0, it);
  return R0;
}

GBoundsReport verify_g_bounds(const ModelParams& params, const GRegion& region, bool fit) {
  params.validate();
  if (!(region.log_r0 > 0.0) || region.a_points < 2 || region.b_points < 2 ||
      !(region.b_span > 0.0))
    throw ValidationError("verify_g_bounds: malformed region");
  const auto k = ChartConstants::from_lambda(params.lambda);
  const double beta = params.beta;

  GBoundsReport rep;
  rep.beta = beta;
  rep.fitted = fit;
  rep.g1_at_zero = error_excess(0.0, region.b_plateau, params);

  for (int i = 0; i < region.a_points; ++i) {
    const double a = -region.log_r0 + 2.0 * region.log_r0 * i / (region.a_points - 1);
    const double g1 = error_excess(a, region.b_plateau, params);
    const double further = error_excess(a, region.b_plateau + 30.0, params);
    if (std::abs(g1 - further) > 1e-13 * std::max(1.0, std::abs(g1)))
      throw PlateauError("verify_g_bounds: error term has not settled at b_plateau");
    rep.max_abs_g1 = std::max(rep.max_abs_g1, std::abs(g1));
    if (beta > 0.0 && std::abs(a) > 1e-12)
      rep.C_g1 = std::max(rep.C_g1, std::abs(g1) / (beta * std::abs(a)));

    const double g2_zero = k.c2 * std::exp(-4.0 * a / 3.0);
    for (int j = 0; j < region.b_points; ++j) {
      const double b = region.r2 + region.b_span * j / (region.b_points - 1);
      const double g2 = (error_excess(a, b, params) - g1) * std::exp(b / 3.0);
      const double dev = std::abs(g2 - g2_zero);
      rep.max_g2_deviation = std::max(rep.max_g2_deviation, dev);
      if (beta > 0.0) rep.C_g2 = std::max(rep.C_g2, dev / beta);
      ++rep.points;
    }
  }
  rep.C = std::max(rep.C_g1, rep.C_g2);
  if (beta == 0.0) {
    rep.holds = rep.max_abs_g1 <= 1e-10 && rep.max_g2_deviation <= 1e-10;
  } else if (fit) {
    rep.holds = std::isfinite(rep.C);
  } else {
    rep.holds = rep.C_g1 <= region.C && rep.C_g2 <= region.C;
  }
  return rep;
}

SegmentEstimateReport verify_segment_estimates(const ModelParams& params, int grid_points) {
  params.validate();
  if (params.lambda != 2.0 || params.beta != 0.0)
    throw ValidationError("verify_segment_estimates: requires lambda = 2 and beta = 0");
  if (grid_points < 2) throw ValidationError("verify_segment_estimates: grid too small");
  const double ln2 = std::log(2.0);
  const double c0 = 2.0 * ln2;
  constexpr double s_lo = -0.1, s_hi = -0.01;
  auto s_at = [&](int k) { return s_lo + (s_hi - s_lo) * k / (grid_points - 1); };

  SegmentEstimateReport rep;
  rep.grid_points = grid_points;

  // Closed forms along J and F(J).
  {
    double max_e = 0, max_de = 0, max_E = 0, max_dE = 0;
    double min_b = std::numeric_limits<double>::infinity();
    double min_dA = min_b, max_dB = -min_b;
    auto A_at = [&](double s) {
      const double e = std::log1p(std::pow(2.0, -10.0 / 3.0) * std::exp(-2.0 * s));
      return 4.0 * s + 2.0 * e - std::log1p(std::pow(2.0, -42.0 / 9.0) * std::exp(6.0 * s + 2.0 * e));
    };
    for (int k = 0; k < grid_points; ++k) {
      const double s = s_at(k);
      const double w = std::pow(2.0, -10.0 / 3.0) * std::exp(-2.0 * s);
      const double e = std::log1p(w);
      const double de = -2.0 * w / (1.0 + w);
      const double W = std::pow(2.0, -42.0 / 9.0) * std::exp(6.0 * s + 2.0 * e);
      const double E = std::log1p(W);
      const double dE = W * (6.0 + 2.0 * de) / (1.0 + W);
      max_e = std::max(max_e, std::abs(e));
      max_de = std::max(max_de, std::abs(de));
      max_E = std::max(max_E, std::abs(E));
      max_dE = std::max(max_dE, std::abs(dE));
      min_b = std::min(min_b, -s + e + 14.0 / 3.0 * ln2 + E);
      min_dA = std::min(min_dA, 4.0 + 2.0 * de - dE);
      max_dB = std::max(max_dB, -1.0 + de + dE);
    }
    rep.closed_form = {
        check_below("|e(s)| < 1/8", max_e, 1.0 / 8.0),
        check_below("|e'(s)| < 1/4", max_de, 1.0 / 4.0),
        check_below("|E(s)| < 1/16", max_E, 1.0 / 16.0),
        check_below("|E'(s)| < 3/8", max_dE, 3.0 / 8.0),
        check_above("F^2(J) above b = 3", min_b, 3.0),
        check_below("a of F^2(J) at s = -0.1 < -0.03", A_at(s_lo), -0.03),
        check_above("a of F^2(J) at s = -0.01 > 0.03", A_at(s_hi), 0.03),
        check_above("(4s + 2e - E)' > 0", min_dA, 0.0),
        check_below("(-s + e + E)' < 0", max_dB, 0.0),
    };
  }

  // The same quantities generated by map_F.
  {
    auto chain = [&](double s) {
      const PlanePoint j{s, -s + c0 / 3.0, Chart::AB};
      const PlanePoint fj = map_F(j, params);
      const PlanePoint ffj = map_F(fj, params);
      struct Out {
        double e, E, A, B;
      };
      return Out{error_term(j.first, j.second, params), error_term(fj.first, fj.second, params),
                 ffj.first, ffj.second};
    };
    constexpr double h = 1e-6;
    double max_e = 0, max_de = 0, max_E = 0, max_dE = 0;
    double min_b = std::numeric_limits<double>::infinity();
    double min_dA = min_b, max_dB = -min_b;
    for (int k = 0; k < grid_points; ++k) {
      const double s = s_at(k);
      const auto c = chain(s);
      const auto cp = chain(s + h);
      const auto cm = chain(s - h);
      max_e = std::max(max_e, std::abs(c.e));
      max_de = std::max(max_de, std::abs((cp.e - cm.e) / (2 * h)));
      max_E = std::max(max_E, std::abs(c.E));
      max_dE = std::max(max_dE, std::abs((cp.E - cm.E) / (2 * h)));
      min_b = std::min(min_b, c.B);
      min_dA = std::min(min_dA, (cp.A - cm.A) / (2 * h));
      max_dB = std::max(max_dB, (cp.B - cm.B) / (2 * h));
    }
    auto containment = [&](double t_lo, double t_hi) {
      const auto seg = Segment::ray_image(t_lo, t_hi, params.lambda);
      double a_min = std::numeric_limits<double>::infinity(), a_max = -a_min;
      for (int k = 0; k < grid_points; ++k) {
        const double t = t_lo + (t_hi - t_lo) * k / (grid_points - 1);
        const PlanePoint p{seg.origin[0] + t * seg.direction[0],
                           seg.origin[1] + t * seg.direction[1], Chart::AB};
        const double a = map_F(p, params).first;
        a_min = std::min(a_min, a);
        a_max = std::max(a_max, a);
      }
      return std::min(s_lo - a_min, a_max - s_hi);
    };
    rep.map_consistent = {
        check_below("map: |e| on J < 1/8", max_e, 1.0 / 8.0),
        check_below("map: |de/ds| on J < 1/4", max_de, 1.0 / 4.0),
        check_below("map: |E| on F(J) < 1/16", max_E, 1.0 / 16.0),
        check_below("map: |dE/ds| on F(J) < 3/8", max_dE, 3.0 / 8.0),
        check_above("map: F^2(J) above b = 3", min_b, 3.0),
        check_below("map: a of F^2(J) at s = -0.1 < -0.03", chain(s_lo).A, -0.03),
        check_above("map: a of F^2(J) at s = -0.01 > 0.03", chain(s_hi).A, 0.03),
        check_above("map: d/ds a of F^2(J) > 0", min_dA, 0.0),
        check_below("map: d/ds b of F^2(J) < 0", max_dB, 0.0),
        check_above("map: J inside F(I), t in [-0.4, 0]", containment(-0.4, 0.0), 0.0),
        check_above("map: J inside F(I), t in [-0.25, -0.15]", containment(-0.25, -0.15), 0.0),
    };
  }

  auto all = [](const std::vector<InequalityCheck>& v) {
    return std::all_of(v.begin(), v.end(), [](const InequalityCheck& c) { return c.holds; });
  };
  rep.closed_form_pass = all(rep.closed_form);
  rep.map_consistent_pass = all(rep.map_consistent);
  return rep;
}

Segment Segment::ray_image(double t_lo, double t_hi, double lambda) {
  const double c0 = 2.0 * std::log(lambda);
  Segment s;
  s.t_lo = t_lo;
  s.t_hi = t_hi;
  s.origin = {0.0, -2.0 * c0 / 3.0};
  s.direction = {1.0, 2.0};
  return s;
}

std::vector<Polyline> iterate_segment(const Segment& seg, int iterates, const ModelParams& params,
                                      int samples) {
  params.validate();
  if (iterates < 0) throw ValidationError("iterate_segment: iterates must be >= 0");
  if (samples < 2) throw ValidationError("iterate_segment: needs at least two samples");
  if (!(seg.t_hi > seg.t_lo)) throw ValidationError("iterate_segment: empty parameter range");

  Polyline base;
  base.iterate = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = seg.t_lo + (seg.t_hi - seg.t_lo) * k / (samples - 1);
    base.t.push_back(t);
    base.a.push_back(seg.origin[0] + t * seg.direction[0]);
    base.b.push_back(seg.origin[1] + t * seg.direction[1]);
  }
  std::vector<Polyline> out{base};
  for (int n = 1; n <= iterates; ++n) {
    const Polyline& prev = out.back();
    Polyline next;
    next.iterate = n;
    next.truncated = prev.truncated;
    for (std::size_t k = 0; k < prev.t.size(); ++k) {
      if (params.beta > 0.0 && z_beta(prev.a[k], prev.b[k], params) > kZBetaLimit) {
        next.truncated = true;
        break;
      }
      const auto img = map_F({prev.a[k], prev.b[k], Chart::AB}, params);
      next.t.push_back(prev.t[k]);
      next.a.push_back(img.first);
      next.b.push_back(img.second);
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace dyadic
