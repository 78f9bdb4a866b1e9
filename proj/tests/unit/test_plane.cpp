#include <doctest.h>

#include <cmath>
#include <random>

#include "dyadic/errors.hpp"
#include "dyadic/plane.hpp"
#include "dyadic/recursion.hpp"

using namespace dyadic;

namespace {

ModelParams with_beta(double beta) {
  ModelParams p;
  p.beta = beta;
  return p;
}

const double kC0 = std::log(4.0);

}  // namespace

TEST_CASE("chart constants follow lambda") {
  const auto k = ChartConstants::from_lambda(2.0);
  CHECK(k.c0 == doctest::Approx(std::log(4.0)).epsilon(1e-16));
  CHECK(k.c1 == 0.25);
  CHECK(k.c2 == doctest::Approx(std::pow(2.0, -10.0 / 9.0)).epsilon(1e-16));
}

TEST_CASE("to_chart: unit point and round trips") {
  const PlanePoint one{1.0, 1.0, Chart::XY};
  const auto uv = to_chart(one, Chart::UV, 2.0);
  CHECK(uv.first == 0.0);
  CHECK(uv.second == 0.0);
  const auto ab = to_chart(one, Chart::AB, 2.0);
  CHECK(ab.first == doctest::Approx(0.4621).epsilon(1e-4));
  CHECK(ab.first == doctest::Approx(kC0 / 3.0).epsilon(1e-15));
  CHECK(ab.second == 0.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const PlanePoint p{u(rng), u(rng), Chart::AB};
    const auto back = to_chart(to_chart(to_chart(p, Chart::UV, 2.0), Chart::XY, 2.0), Chart::AB, 2.0);
    CHECK(back.first == doctest::Approx(p.first).epsilon(1e-14).scale(1.0));
    CHECK(back.second == doctest::Approx(p.second).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("to_chart: the line v = 0 lands on b = 2a - 2c0/3") {
  for (double x : {0.1, 0.7, 1.0, 5.0}) {
    const auto ab = to_chart({x, 1.0, Chart::XY}, Chart::AB, 2.0);
    CHECK(ab.second == doctest::Approx(2.0 * ab.first - 2.0 * kC0 / 3.0).epsilon(1e-15).scale(1.0));
  }
}

TEST_CASE("to_chart: rejects points outside the quadrant") {
  CHECK_THROWS_AS(to_chart({0.0, 1.0, Chart::XY}, Chart::AB, 2.0), DomainError);
  CHECK_THROWS_AS(to_chart({1.0, -1.0, Chart::XY}, Chart::UV, 2.0), DomainError);
}

TEST_CASE("map_F: worked values in XY") {
  const auto f = map_F({1.0, 1.0, Chart::XY}, ModelParams{});
  CHECK(f.first == 1.0);
  CHECK(f.second == 5.0);
  const auto g = map_F({1.0, 1.0, Chart::XY}, with_beta(0.1));
  CHECK(g.first == 1.0);
  CHECK(g.second == doctest::Approx(4.2829).epsilon(1e-5));
}

TEST_CASE("map_F: AB and UV forms conjugate the XY map") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 8.0);
  for (double beta : {0.0, 0.01, 0.1}) {
    const auto p = with_beta(beta);
    for (int k = 0; k < 200; ++k) {
      const PlanePoint xy{u(rng), u(rng), Chart::XY};
      const auto via_xy = to_chart(map_F(xy, p), Chart::AB, 2.0);
      const auto via_ab = map_F(to_chart(xy, Chart::AB, 2.0), p);
      const auto via_uv = to_chart(map_F(to_chart(xy, Chart::UV, 2.0), p), Chart::AB, 2.0);
      CHECK(via_ab.first == doctest::Approx(via_xy.first).epsilon(1e-12).scale(1.0));
      CHECK(via_ab.second == doctest::Approx(via_xy.second).epsilon(1e-12).scale(1.0));
      CHECK(via_uv.first == doctest::Approx(via_xy.first).epsilon(1e-12).scale(1.0));
      CHECK(via_uv.second == doctest::Approx(via_xy.second).epsilon(1e-12).scale(1.0));
    }
  }
  const auto at_unit = map_F({kC0 / 3.0, 0.0, Chart::AB}, ModelParams{});
  const auto expect = to_chart({1.0, 5.0, Chart::XY}, Chart::AB, 2.0);
  CHECK(at_unit.first == doctest::Approx(expect.first).epsilon(1e-14));
  CHECK(at_unit.second == doctest::Approx(expect.second).epsilon(1e-14));
}

TEST_CASE("map_F is injective on sampled pairs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int k = 0; k < 2000; ++k) {
    const PlanePoint p{u(rng), u(rng), Chart::XY};
    const PlanePoint q{p.first + 1e-9 * (1 + k % 3), p.second + 1e-9 * (k % 2), Chart::XY};
    const auto fp = map_F(p, ModelParams{});
    const auto fq = map_F(q, ModelParams{});
    CHECK((fp.first != fq.first || fp.second != fq.second));
  }
}

TEST_CASE("error_term: beta = 0 closed form and decay") {
  const ModelParams p;
  // e(0, 6) from the chart-conjugated map: F(x, y) with a = 0, b = 6
  const PlanePoint ab{0.0, 6.0, Chart::AB};
  const auto xy = to_chart(ab, Chart::XY, 2.0);
  const auto img = to_chart(map_F(xy, p), Chart::AB, 2.0);
  const double from_map = img.second - ab.second - kC0;
  CHECK(error_term(0.0, 6.0, p) == doctest::Approx(from_map).epsilon(1e-13));
  CHECK(error_term(0.0, 6.0, p) ==
        doctest::Approx(std::log1p(std::pow(2.0, -10.0 / 9.0) * std::exp(-2.0))).epsilon(1e-15));

  double last = error_term(0.1, 0.0, p);
  for (double b = 0.5; b < 60.0; b += 0.5) {
    const double e = error_term(0.1, b, p);
    CHECK(e < last);
    CHECK(e > 0.0);
    last = e;
  }
}

TEST_CASE("error_term: beta > 0 tends to beta = 0 uniformly on X") {
  double previous = INFINITY;
  for (double beta : {0.05, 0.02, 0.01, 0.005, 0.001}) {
    double sup = 0.0;
    for (double a = -0.03; a <= 0.03 + 1e-12; a += 0.005)
      for (double b = 2.56; b < 60.0; b += 0.25)
        sup = std::max(sup, std::abs(error_term(a, b, with_beta(beta)) - error_term(a, b, ModelParams{})));
    CHECK(sup < previous);
    CHECK(sup < 2.0 * beta);
    previous = sup;
  }
}

TEST_CASE("jacobian_F_ab: analytic against differences, asymptotics, 4:1 relation") {
  const ModelParams p;
  for (double a = -0.5; a <= 0.5; a += 0.1) {
    for (double b = -2.0; b <= 20.0; b += 1.5) {
      const auto J = jacobian_F_ab(a, b, p);
      const auto D = jacobian_F_ab_fd(a, b, p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(J[i][j] == doctest::Approx(D[i][j]).epsilon(1e-7).scale(1.0));
      // ∂_a e = 4 ∂_b e, read off the second row
      CHECK(J[1][0] == doctest::Approx(4.0 * (J[1][1] - 1.0)).epsilon(1e-12).scale(1e-3));
    }
  }
  const auto far = jacobian_F_ab(0.0, 200.0, p);
  CHECK(far[0][0] == doctest::Approx(-2.0));
  CHECK(far[0][1] == doctest::Approx(0.0));
  CHECK(far[1][0] == doctest::Approx(0.0));
  CHECK(far[1][1] == doctest::Approx(1.0));
}

TEST_CASE("certify_rectangle: legacy bound reproduces the published constants") {
  const ModelParams p;
  CHECK(min_R0(0.03, p, BoundForm::Legacy) == doctest::Approx(2.552).epsilon(0.005 / 2.552));
  const double formula = 0.75 * (std::log(100.0 / 3.0) - 2.0 / 9.0 * std::log(2.0) + 0.05);
  CHECK(min_R0(0.03, p, BoundForm::Legacy) == doctest::Approx(formula).epsilon(1e-10));
  CHECK(certify_rectangle({2.56, 0.03}, p, BoundForm::Legacy).admissible);
  const auto bad = certify_rectangle({1.0, 0.03}, p, BoundForm::Legacy);
  CHECK_FALSE(bad.admissible);
  CHECK_FALSE(bad.checks[0].holds);
}

TEST_CASE("certify_rectangle: exact bound is the sup of the error term over X+") {
  const ModelParams p;
  const Rectangle rect{10.0, 0.03};
  const auto cert = certify_rectangle(rect, p);
  double sup_e = 0.0, sup_grad = 0.0;
  const double b_lo = rect.R0 - rect.R1 - kC0;
  for (double a = -rect.R1; a <= rect.R1 + 1e-12; a += rect.R1 / 20.0)
    for (double b = b_lo; b < b_lo + 40.0; b += 0.05) {
      sup_e = std::max(sup_e, error_term(a, b, p));
      sup_grad = std::max(sup_grad, std::abs(jacobian_F_ab(a, b, p)[1][0]));
    }
  CHECK(cert.norm_E == doctest::Approx(sup_e).epsilon(1e-12));
  CHECK(cert.norm_gradE == doctest::Approx(sup_grad).epsilon(1e-12));
  CHECK(cert.norm_gradH_bound ==
        doctest::Approx(2.0 * cert.norm_gradE / (1.0 - cert.norm_gradE)).epsilon(1e-15));
}

TEST_CASE("certify_rectangle: exact form needs a larger R0 than the legacy form") {
  const ModelParams p;
  CHECK_FALSE(certify_rectangle({2.56, 0.03}, p).admissible);
  const double r0 = min_R0(0.03, p);
  CHECK(r0 > 9.6);
  CHECK(r0 < 9.8);
  CHECK(certify_rectangle({r0, 0.03}, p).admissible);
  CHECK_FALSE(certify_rectangle({r0 - 1e-6, 0.03}, p).admissible);
}

TEST_CASE("certify_rectangle is monotone in R0") {
  for (BoundForm form : {BoundForm::Exact, BoundForm::Legacy}) {
    for (double R1 : {0.001, 0.01, 0.03}) {
      bool seen = false;
      for (double R0 = 0.5; R0 < 30.0; R0 += 0.25) {
        const bool ok = certify_rectangle({R0, R1}, ModelParams{}, form).admissible;
        if (seen) CHECK(ok);
        seen = seen || ok;
      }
      CHECK(seen);
    }
  }
}

TEST_CASE("min_R0: growth as R1 shrinks") {
  const ModelParams p;
  const double r_a = min_R0(1e-3, p, BoundForm::Legacy);
  const double r_b = min_R0(1e-6, p, BoundForm::Legacy);
  CHECK((r_b - r_a) / std::log(1e3) == doctest::Approx(0.75).epsilon(1e-2));
  const double e_a = min_R0(1e-3, p);
  const double e_b = min_R0(1e-6, p);
  CHECK((e_b - e_a) / std::log(1e3) == doctest::Approx(3.0).epsilon(1e-2));

  CHECK_THROWS_AS(min_R0(0.05, p), ValidationError);
  CHECK_THROWS_AS(min_R0(0.0, p), ValidationError);
}

TEST_CASE("min_R0: beta > 0 by sampled certificate") {
  const auto p = with_beta(0.005);
  const double r0 = min_R0(0.03, p);
  CHECK(r0 > min_R0(0.03, ModelParams{}));
  CHECK(certify_rectangle({r0, 0.03}, p).admissible);
  CHECK_FALSE(certify_rectangle({r0 * (1.0 - 1e-6), 0.03}, p).admissible);
}

TEST_CASE("verify_g_bounds: beta = 0 reduces to the closed form") {
  const auto rep = verify_g_bounds(ModelParams{}, GRegion{}, true);
  CHECK(rep.max_abs_g1 < 1e-10);
  CHECK(rep.max_g2_deviation < 1e-10);
  CHECK(rep.holds);
}

TEST_CASE("verify_g_bounds: beta > 0 has bounded constants") {
  double last_c = INFINITY;
  for (double beta : {0.05, 0.01, 0.001}) {
    const auto rep = verify_g_bounds(with_beta(beta), GRegion{}, true);
    CAPTURE(beta);
    CHECK(rep.holds);
    CHECK(std::isfinite(rep.C));
    CHECK(rep.C < 10.0);
    CHECK(std::abs(rep.g1_at_zero) < 1e-14);
    CHECK(rep.max_g2_deviation <= beta * rep.C_g2 * (1.0 + 1e-12));
    last_c = rep.C;
  }
  // the constant stays bounded as beta shrinks
  CHECK(last_c < 10.0);
  const auto tested = verify_g_bounds(with_beta(0.01), GRegion{}, false);
  CHECK(tested.holds);
}

TEST_CASE("verify_g_bounds: unsettled plateau is reported") {
  GRegion region;
  region.b_plateau = 15.0;
  CHECK_THROWS_AS(verify_g_bounds(with_beta(0.01), region, true), PlateauError);
}

TEST_CASE("verify_segment_estimates: closed-form estimates") {
  const auto rep = verify_segment_estimates(ModelParams{});
  CHECK(rep.grid_points == 10000);
  CHECK(rep.closed_form_pass);
  for (const auto& c : rep.closed_form) {
    CAPTURE(c.name);
    CHECK(c.holds);
    CHECK(c.margin > 0.0);
  }
  CHECK(rep.closed_form[0].value ==
        doctest::Approx(std::log1p(std::pow(2.0, -10.0 / 3.0) * std::exp(0.2))).epsilon(1e-12));
  CHECK(rep.closed_form[0].value == doctest::Approx(0.1144).epsilon(1e-3));
}

TEST_CASE("verify_segment_estimates: the map-generated estimates are reported separately") {
  const auto rep = verify_segment_estimates(ModelParams{}, 2000);
  REQUIRE(rep.map_consistent.size() == 11);
  // F²(J) stays above b = 3 with the true map as well
  CHECK(rep.map_consistent[4].holds);
  // the true error along J is larger than the closed form suggests
  CHECK_FALSE(rep.map_consistent[0].holds);
  CHECK_FALSE(rep.map_consistent_pass);
}

TEST_CASE("verify_segment_estimates: preconditions") {
  CHECK_THROWS_AS(verify_segment_estimates(with_beta(0.01)), ValidationError);
  ModelParams p;
  p.lambda = 3.0;
  CHECK_THROWS_AS(verify_segment_estimates(p), ValidationError);
}

TEST_CASE("iterate_segment: ray image and its forward iterates") {
  const ModelParams p;
  const auto seg = Segment::ray_image(-0.25, -0.15, 2.0);
  const auto lines = iterate_segment(seg, 4, p, 51);
  REQUIRE(lines.size() == 5);
  for (std::size_t k = 0; k < lines[0].t.size(); ++k) {
    CHECK(lines[0].a[k] == doctest::Approx(lines[0].t[k]));
    CHECK(lines[0].b[k] == doctest::Approx(2.0 * lines[0].t[k] - 2.0 * kC0 / 3.0));
  }
  for (int n = 1; n <= 4; ++n) {
    const auto& prev = lines[n - 1];
    const auto& cur = lines[n];
    CHECK(cur.iterate == n);
    CHECK_FALSE(cur.truncated);
    for (std::size_t k : {std::size_t{0}, prev.t.size() - 1}) {
      const auto img = map_F({prev.a[k], prev.b[k], Chart::AB}, p);
      CHECK(cur.a[k] == img.first);
      CHECK(cur.b[k] == img.second);
    }
  }
  const auto only = iterate_segment(seg, 0, p, 11);
  REQUIRE(only.size() == 1);
  CHECK(only[0].t.size() == 11);
}

TEST_CASE("iterate_segment: leaving the series region truncates") {
  // a large negative a makes x/y huge and pushes Z_β past 1/2
  Segment seg;
  seg.t_lo = 0.0;
  seg.t_hi = 1.0;
  seg.origin = {1.0, 0.0};
  seg.direction = {1.0, 0.0};
  const auto lines = iterate_segment(seg, 3, with_beta(0.2), 21);
  CHECK(lines.back().truncated);
  CHECK(lines.back().t.size() < 21);
}
