#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyadic/alpha.hpp"
#include "dyadic/curve.hpp"
#include "dyadic/plane.hpp"
#include "dyadic/recursion.hpp"
#include "dyadic/shell_ode.hpp"

namespace dyadic::io {

/// %.17g
std::string format_double(double x);

/// Header `t,a0,...,aN,energy`.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          const ModelParams& params);
/// Header `b,a`.
void write_curve_csv(std::ostream& os, const CurveGrid& curve);
/// Header `iterate,s,a,b`.
void write_polylines_csv(std::ostream& os, const std::vector<Polyline>& lines);

nlohmann::json profile_json(const Profile& profile, const KolmogorovFit& fit);
nlohmann::json certificate_json(const BoundCertificate& cert);
nlohmann::json checks_json(const std::vector<InequalityCheck>& checks);
nlohmann::json segment_estimates_json(const SegmentEstimateReport& report);
nlohmann::json g_bounds_json(const GBoundsReport& report);
nlohmann::json curve_diagnostics_json(const CurveDiagnostics& diag);

const char* to_string(BoundForm form);

}  // namespace dyadic::io
