#include "dyadic/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dyadic/errors.hpp"
#include "dyadic/plane.hpp"
#include "dyadic/recursion.hpp"

namespace dyadic {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PositiveSide:
      return "positive";
    case Verdict::NegativeSide:
      return "negative";
    case Verdict::Undecided:
      return "undecided";
  }
  return "undecided";
}

namespace {

bool isfinite_real(double x) { return std::isfinite(x); }
bool isfinite_real(const Wide& x) { return boost::multiprecision::isfinite(x); }

// |a_n| > thr is tested as ρ > e^{thr} or ρ < e^{-thr} with
// ρ = λ^{2/3} α_{n-1}/α_n, which keeps logarithms out of the Wide loop.
template <class Real>
OrbitClass classify_impl(const Real& alpha0, const ModelParams& params,
                         const ClassifyOptions& options) {
  params.validate();
  if (!(alpha0 > 0)) throw ValidationError("classify_orbit: alpha0 must be > 0");
  if (!(options.threshold >= 1.0) || options.n_max < 10)
    throw ValidationError("classify_orbit: threshold must be >= 1 and n_max >= 10");

  const Real scale = std::pow(params.lambda, 2.0 / 3.0);
  const Real up = std::exp(options.threshold);
  const Real down = std::exp(-options.threshold);

  OrbitClass out;
  Real prev = 0;
  Real cur = alpha0;
  for (int n = 1; n <= options.n_max; ++n) {
    const Real next = next_alpha(prev, cur, params);
    // overflow ends the run; the last finite crossing stands
    if (!isfinite_real(next) || !(next > 0)) break;
    prev = cur;
    cur = next;
    const Real rho = scale * prev / cur;
    // transient exits re-enter the strip; later crossings keep the same sign
    if (!(rho > up || rho < down)) continue;
    const int sign = ((rho > up) == (n % 2 == 0)) ? 1 : -1;
    if (!out.escape_index) {
      out.escape_index = n;
      out.escape_value = std::log(static_cast<double>(rho));
      out.verdict = sign > 0 ? Verdict::PositiveSide : Verdict::NegativeSide;
    }
    out.crossing_signs.push_back(sign);
    if (out.crossing_signs.size() == 3) break;
  }
  return out;
}

OrbitClass classify_retry(const Wide& alpha0, const ModelParams& params,
                          const ClassifyOptions& options) {
  auto c = classify_orbit(alpha0, params, options);
  if (c.verdict != Verdict::Undecided) return c;
  ClassifyOptions twice = options;
  twice.n_max *= 2;
  return classify_orbit(alpha0, params, twice);
}

}  // namespace

OrbitClass classify_orbit(const Wide& alpha0, const ModelParams& params,
                          const ClassifyOptions& options) {
  return classify_impl<Wide>(alpha0, params, options);
}

OrbitClass classify_orbit(double alpha0, const ModelParams& params,
                          const ClassifyOptions& options) {
  return classify_impl<double>(alpha0, params, options);
}

AlphaSolution bisect_alpha0(const Wide& lo_in, const Wide& hi_in, const ModelParams& params,
                            double tol, const ClassifyOptions& options) {
  if (!(tol > 0.0)) throw ValidationError("bisect_alpha0: tol must be > 0");
  if (!(lo_in > 0) || !(hi_in > lo_in)) throw ValidationError("bisect_alpha0: need 0 < lo < hi");

  const Verdict v_lo = classify_retry(lo_in, params, options).verdict;
  const Verdict v_hi = classify_retry(hi_in, params, options).verdict;
  if (v_lo == Verdict::Undecided || v_hi == Verdict::Undecided || v_lo == v_hi)
    throw BracketError("bisect_alpha0: endpoints do not carry opposite verdicts");

  AlphaSolution sol;
  Wide lo = lo_in, hi = hi_in;
  while (hi - lo > tol) {
    const Wide mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;  // bracket at working precision
    const Verdict v = classify_retry(mid, params, options).verdict;
    sol.verdicts.push_back(v);
    if (v == Verdict::Undecided)
      throw BracketError("bisect_alpha0: midpoint undecided with doubled step budget");
    (v == v_lo ? lo : hi) = mid;
    ++sol.iterations;
  }
  sol.alpha0_wide = (lo + hi) / 2;
  sol.alpha0 = static_cast<double>(sol.alpha0_wide);
  sol.lo = static_cast<double>(lo);
  sol.hi = static_cast<double>(hi);
  return sol;
}

std::pair<double, double> bracket_alpha0(const ModelParams& params,
                                         const ClassifyOptions& options) {
  double lo = 0.1, hi = 1.0;
  for (int it = 0; it < 30; ++it) {
    const auto a = classify_retry(Wide(lo), params, options).verdict;
    const auto b = classify_retry(Wide(hi), params, options).verdict;
    if (a != Verdict::Undecided && b != Verdict::Undecided && a != b) return {lo, hi};
    lo /= 2.0;
    hi *= 2.0;
  }
  throw BracketError("bracket_alpha0: no sign change found");
}

AlphaSolution solve_alpha0(const ModelParams& params, double tol, const ClassifyOptions& options) {
  const auto [lo, hi] = bracket_alpha0(params, options);
  return bisect_alpha0(Wide(lo), Wide(hi), params, tol, options);
}

namespace {

struct Orbit {
  bool valid = false;
  double a = 0.0;
  double b = 0.0;
};

// Orbit end point as a function of the scan parameter t.
using OrbitFn = std::function<Orbit(double)>;

Intersection scan_and_bisect(const CurveGrid& curve, int N, const OrbitFn& orbit, double c0,
                             const IntersectOptions& options) {
  if (N < 0) throw ValidationError("intersect_with_curve: N must be >= 0");
  if (options.samples < 2 || !(options.t_hi > options.t_lo))
    throw ValidationError("intersect_with_curve: bad scan");
  const double R0 = curve.rect.R0;

  auto gap = [&](double t, double& out) {
    const Orbit o = orbit(t);
    if (!o.valid || o.b < R0) return false;
    out = o.a - curve(o.b);
    return true;
  };

  int crossings = 0;
  double br_lo = 0, br_hi = 0;
  bool have_prev = false;
  double t_prev = 0, g_prev = 0;
  for (int k = 0; k < options.samples; ++k) {
    const double t =
        options.t_lo + (options.t_hi - options.t_lo) * k / (options.samples - 1);
    double g;
    if (!gap(t, g)) {
      have_prev = false;
      continue;
    }
    if (have_prev && ((g_prev < 0) != (g < 0))) {
      if (crossings == 0) {
        br_lo = t_prev;
        br_hi = t;
      }
      ++crossings;
    }
    have_prev = true;
    t_prev = t;
    g_prev = g;
  }
  if (crossings == 0) throw NoIntersection("intersect_with_curve: no crossing at this N");

  double g_lo;
  gap(br_lo, g_lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (br_lo + br_hi);
    if (mid <= br_lo || mid >= br_hi) break;
    double g;
    if (!gap(mid, g)) throw NoIntersection("intersect_with_curve: orbit left the domain");
    if (g == 0.0) {
      br_lo = br_hi = mid;
      break;
    }
    if ((g < 0) == (g_lo < 0)) {
      br_lo = mid;
      g_lo = g;
    } else {
      br_hi = mid;
    }
  }

  Intersection x;
  x.iterate = N;
  x.t_star = 0.5 * (br_lo + br_hi);
  x.alpha0 = std::exp(x.t_star - c0 / 3.0);
  x.crossings = crossings;
  constexpr double delta = 1e-7;
  double gp, gm;
  if (gap(x.t_star + delta, gp) && gap(x.t_star - delta, gm))
    x.transversality_margin = std::abs(gp - gm) / (2.0 * delta);
  return x;
}

Orbit finite_or_invalid(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) return {};
  return {true, a, b};
}

}  // namespace

Intersection intersect_with_curve(const CurveGrid& curve, int N, const ModelParams& params,
                                  const IntersectOptions& options) {
  params.validate();
  const double c0 = 2.0 * std::log(params.lambda);
  const OrbitFn orbit = [&](double t) {
    PlanePoint p = to_chart(lift_ray(std::exp(t - c0 / 3.0), params), Chart::AB, params.lambda);
    for (int k = 0; k < N; ++k) p = map_F(p, params);
    return finite_or_invalid(p.first, p.second);
  };
  return scan_and_bisect(curve, N, orbit, c0, options);
}

Intersection intersect_with_curve(const CurveGrid& curve, int N, const ErrorFn& error, double c0,
                                  const IntersectOptions& options) {
  const OrbitFn orbit = [&](double t) {
    double a = t, b = 2.0 * t - 2.0 * c0 / 3.0;
    for (int k = 0; k < N; ++k) {
      const double e = error(a, b);
      a = -2.0 * a - e;
      b = b + c0 + e;
    }
    return finite_or_invalid(a, b);
  };
  return scan_and_bisect(curve, N, orbit, c0, options);
}

Intersection find_intersection(const CurveGrid& curve, const ModelParams& params, int n_first,
                               int n_last, const IntersectOptions& options) {
  if (n_first < 0 || n_last < n_first) throw ValidationError("find_intersection: bad range");
  for (int N = n_first; N <= n_last; ++N) {
    try {
      return intersect_with_curve(curve, N, params, options);
    } catch (const NoIntersection&) {
    }
  }
  throw NoIntersection("find_intersection: no crossing for any N in range");
}

}  // namespace dyadic
