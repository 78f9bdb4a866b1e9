#include "dyadic/io.hpp"

#include <cstdio>
#include <ostream>

namespace dyadic::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const ModelParams& params) {
  os << "t";
  for (int j = 0; j <= params.shells; ++j) os << ",a" << j;
  os << ",energy\n";
  for (const auto& s : trajectory.states) {
    os << format_double(s.time);
    for (double v : s.values) os << ',' << format_double(v);
    os << ',' << format_double(energy(s, params)) << '\n';
  }
}

void write_curve_csv(std::ostream& os, const CurveGrid& curve) {
  os << "b,a\n";
  for (std::size_t i = 0; i < curve.b.size(); ++i)
    os << format_double(curve.b[i]) << ',' << format_double(curve.a[i]) << '\n';
}

void write_polylines_csv(std::ostream& os, const std::vector<Polyline>& lines) {
  os << "iterate,s,a,b\n";
  for (const auto& line : lines)
    for (std::size_t k = 0; k < line.t.size(); ++k)
      os << line.iterate << ',' << format_double(line.t[k]) << ',' << format_double(line.a[k])
         << ',' << format_double(line.b[k]) << '\n';
}

nlohmann::json profile_json(const Profile& profile, const KolmogorovFit& fit) {
  nlohmann::json j;
  j["lambda"] = profile.params.lambda;
  j["beta"] = profile.params.beta;
  j["alpha0"] = profile.alpha0;
  j["alphas"] = profile.alphas;
  j["a_star"] = profile.a_star();
  j["overflowed"] = profile.overflowed;
  j["diverged"] = fit.diverged;
  j["const_fit"] = fit.constant;
  j["residual"] = fit.residual;
  j["fit_window"] = {fit.n_lo, fit.n_hi};
  return j;
}

nlohmann::json checks_json(const std::vector<InequalityCheck>& checks) {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name},
                   {"value", c.value},
                   {"bound", c.bound},
                   {"relation", c.upper ? "below" : "above"},
                   {"holds", c.holds},
                   {"margin", c.margin}});
  return arr;
}

const char* to_string(BoundForm form) {
  return form == BoundForm::Exact ? "exact" : "legacy";
}

nlohmann::json certificate_json(const BoundCertificate& cert) {
  return {{"form", to_string(cert.form)},
          {"R0", cert.rect.R0},
          {"R1", cert.rect.R1},
          {"norm_E", cert.norm_E},
          {"norm_grad_E", cert.norm_gradE},
          {"norm_H_bound", cert.norm_H_bound},
          {"norm_grad_H_bound", cert.norm_gradH_bound},
          {"checks", checks_json(cert.checks)},
          {"admissible", cert.admissible}};
}

nlohmann::json segment_estimates_json(const SegmentEstimateReport& report) {
  return {{"grid_points", report.grid_points},
          {"closed_form", checks_json(report.closed_form)},
          {"closed_form_pass", report.closed_form_pass},
          {"map_consistent", checks_json(report.map_consistent)},
          {"map_consistent_pass", report.map_consistent_pass}};
}

nlohmann::json g_bounds_json(const GBoundsReport& r) {
  return {{"beta", r.beta},
          {"C_g1", r.C_g1},
          {"C_g2", r.C_g2},
          {"C", r.C},
          {"g1_at_zero", r.g1_at_zero},
          {"max_abs_g1", r.max_abs_g1},
          {"max_g2_deviation", r.max_g2_deviation},
          {"fitted", r.fitted},
          {"holds", r.holds},
          {"points", r.points}};
}

nlohmann::json curve_diagnostics_json(const CurveDiagnostics& d) {
  nlohmann::json j = {{"iterations", d.iterations},
                      {"residual", d.residual},
                      {"contraction_ratio", d.contraction_ratio},
                      {"clipped", d.clipped},
                      {"max_abs_unclipped", d.max_abs_unclipped}};
  j["c_prime"] = d.c_prime ? nlohmann::json(*d.c_prime) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dyadic::io
