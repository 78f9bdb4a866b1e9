#include "dyadic/curve.hpp"

#include <algorithm>
#include <cmath>

#include "dyadic/errors.hpp"

namespace dyadic {

CurveGrid CurveGrid::constant(const Rectangle& rect, double b_max, double spacing, double value) {
  rect.validate();
  if (!(spacing > 0.0)) throw ValidationError("curve grid: spacing must be > 0");
  if (!(b_max > rect.R0)) throw ValidationError("curve grid: b_max must exceed R0");
  CurveGrid g;
  g.rect = rect;
  g.b_max = b_max;
  const auto n = static_cast<std::size_t>(std::ceil((b_max - rect.R0) / spacing)) + 1;
  g.spacing = (b_max - rect.R0) / static_cast<double>(n - 1);
  g.b.resize(n);
  g.a.assign(n, value);
  for (std::size_t i = 0; i < n; ++i) g.b[i] = rect.R0 + g.spacing * static_cast<double>(i);
  g.b.back() = b_max;
  return g;
}

double CurveGrid::operator()(double bq) const {
  if (!std::isfinite(bq)) throw DomainError("curve: non-finite abscissa");
  if (bq < rect.R0) throw DomainError("curve: abscissa below R0");
  if (bq >= b_max) return a.back();
  const double pos = (bq - rect.R0) / spacing;
  const auto i = std::min(static_cast<std::size_t>(pos), a.size() - 2);
  const double w = pos - static_cast<double>(i);
  return a[i] + w * (a[i + 1] - a[i]);
}

double CurveGrid::sup_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double CurveGrid::lipschitz() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i)
    m = std::max(m, std::abs(a[i + 1] - a[i]) / (b[i + 1] - b[i]));
  return m;
}

double sup_distance(const CurveGrid& lhs, const CurveGrid& rhs) {
  if (lhs.a.size() != rhs.a.size()) throw ValidationError("sup_distance: grids differ");
  double m = 0.0;
  for (std::size_t i = 0; i < lhs.a.size(); ++i) m = std::max(m, std::abs(lhs.a[i] - rhs.a[i]));
  return m;
}

ErrorFn error_fn(const ModelParams& params) {
  params.validate();
  return [params](double a, double b) { return error_term(a, b, params); };
}

TransformResult graph_transform(const CurveGrid& curve, const ErrorFn& error, double c0,
                                const TransformOptions& options) {
  const double R0 = curve.rect.R0;
  const double R1 = curve.rect.R1;
  TransformResult res;
  res.curve = curve;
  for (std::size_t i = 0; i < curve.b.size(); ++i) {
    const double b = curve.b[i];
    // Start from the previous ordinate; the update contracts by about 1/2.
    double a = curve.a[i];
    int it = 0;
    for (;; ++it) {
      if (it >= options.max_inner)
        throw ContractionViolation("graph_transform: inner iteration did not settle");
      const double e = error(a, b);
      if (!std::isfinite(e)) throw ContractionViolation("graph_transform: non-finite error term");
      const double next = -(e + curve(std::max(b + c0 + e, R0))) / 2.0;
      const bool done = std::abs(next - a) <= options.inner_tol * std::max(1.0, std::abs(next));
      a = next;
      if (done) break;
    }
    res.max_inner_iterations = std::max(res.max_inner_iterations, it + 1);
    res.max_abs_unclipped = std::max(res.max_abs_unclipped, std::abs(a));
    if (std::abs(a) > R1) {
      res.clipped = true;
      a = std::clamp(a, -R1, R1);
    }
    res.curve.a[i] = a;
  }
  return res;
}

TransformResult graph_transform(const CurveGrid& curve, const ModelParams& params,
                                const TransformOptions& options) {
  return graph_transform(curve, error_fn(params), 2.0 * std::log(params.lambda), options);
}

InvariantCurve solve_invariant(const Rectangle& rect, const ErrorFn& error, double c0,
                               const SolveOptions& options) {
  rect.validate();
  if (!(options.tol > 0.0)) throw ValidationError("solve_invariant: tol must be > 0");
  if (options.max_iterations < 1) throw ValidationError("solve_invariant: max_iterations < 1");
  const double b_max = options.b_max.value_or(rect.R0 + 60.0);

  InvariantCurve out;
  CurveGrid gamma = CurveGrid::constant(rect, b_max, options.spacing, 0.0);
  double prev_change = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    auto step = graph_transform(gamma, error, c0, options.transform);
    const double change = sup_distance(step.curve, gamma);
    // Ratios are only meaningful well above rounding level.
    if (prev_change > 1e-13) {
      const double ratio = change / prev_change;
      out.diagnostics.contraction_ratio = std::max(out.diagnostics.contraction_ratio, ratio);
      if (ratio >= 1.0) throw ContractionViolation("solve_invariant: sup change did not shrink");
    }
    prev_change = change;
    gamma = std::move(step.curve);
    out.diagnostics.iterations = it;
    out.diagnostics.residual = change;
    out.diagnostics.clipped = step.clipped;
    out.diagnostics.max_abs_unclipped = step.max_abs_unclipped;
    if (change < options.tol) {
      out.curve = std::move(gamma);
      try {
        out.diagnostics.c_prime = decay_rate(out.curve).c_prime;
      } catch (const FitFailure&) {
      }
      return out;
    }
  }
  throw ContractionViolation("solve_invariant: no convergence within max_iterations");
}

InvariantCurve solve_invariant(const Rectangle& rect, const ModelParams& params,
                               const SolveOptions& options) {
  params.validate();
  return solve_invariant(rect, error_fn(params), 2.0 * std::log(params.lambda), options);
}

DecayFit decay_rate(const CurveGrid& curve) {
  const std::size_t n = curve.a.size();
  const std::size_t lo = n / 4;
  const std::size_t hi = (3 * n) / 4;
  std::vector<double> xs, ys;
  for (std::size_t i = lo; i < hi; ++i) {
    if (std::abs(curve.a[i]) < 1e-15) continue;
    xs.push_back(curve.b[i]);
    ys.push_back(std::log(std::abs(curve.a[i])));
  }
  if (xs.size() < 3) throw FitFailure("decay_rate: fewer than three usable ordinates");

  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    rss += r * r;
  }
  DecayFit fit;
  fit.c_prime = -slope;
  fit.fit_residual = std::sqrt(rss / m);
  fit.b_lo = xs.front();
  fit.b_hi = xs.back();
  return fit;
}

}  // namespace dyadic
