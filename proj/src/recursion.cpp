#include "dyadic/recursion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "dyadic/shell_ode.hpp"

namespace dyadic {

std::vector<double> Profile::a_star() const {
  std::vector<double> out(alphas.size());
  double scale = 1.0;
  for (std::size_t n = 0; n < alphas.size(); ++n) {
    out[n] = alphas[n] * scale;
    scale /= params.lambda;
  }
  return out;
}

double next_alpha_naive(double prev, double cur, const ModelParams& params) {
  if (!(params.beta > 0.0)) throw ValidationError("next_alpha_naive: requires beta > 0");
  if (!(cur > 0.0)) throw DomainError("next_alpha_naive: current value must be positive");
  const double lam = params.lambda;
  const double beta = params.beta;
  const double half = lam / (2.0 * beta) * cur;
  return -half + std::sqrt(half * half + lam / beta *
                                             (lam * lam * prev * prev + beta * lam * prev * cur + cur));
}

double quadratic_oracle(double prev, double cur, const ModelParams& params) {
  if (!(cur > 0.0)) throw DomainError("quadratic_oracle: current value must be positive");
  if (prev < 0.0) throw DomainError("quadratic_oracle: previous value must be non-negative");

  // Shell j = 1 of the unforced system with (a_0, a_1, a_2) = (x, y/λ, z).
  // Self-similarity requires −a_1 = rhs_1, i.e. P(z) = rhs_1 + a_1 = 0.
  ModelParams local = params;
  local.forcing = 0.0;
  local.shells = 2;
  const ShellSystem sys(local);
  const double lam = params.lambda;
  const double a1 = cur / lam;
  auto P = [&](double z) {
    const std::array<double, 3> state{prev, a1, z};
    std::array<double, 3> out{};
    sys(state, out);
    return out[1] + a1;
  };

  const double s = (1.0 + lam * lam * prev * prev / cur) / (lam * lam);
  const double c = P(0.0);
  const double plus = P(s);
  const double minus = P(-s);
  const double qa = (plus + minus - 2.0 * c) / (2.0 * s * s);
  const double qb = (plus - minus) / (2.0 * s);

  // qa <= 0, qb < 0 and c > 0: one positive root, taken in the form free of
  // cancellation.
  const double disc = std::max(qb * qb - 4.0 * qa * c, 0.0);
  const double z = 2.0 * c / (-qb + std::sqrt(disc));
  return z * lam * lam;
}

namespace {

template <class Real>
Profile generate_impl(const Real& alpha0, int n_max, const ModelParams& params) {
  params.validate();
  if (!(alpha0 > 0)) throw ValidationError("generate_profile: alpha0 must be > 0");
  if (n_max < 2) throw ValidationError("generate_profile: n_max must be >= 2");

  Profile profile;
  profile.params = params;
  profile.alpha0 = static_cast<double>(alpha0);
  profile.alphas.reserve(static_cast<std::size_t>(n_max) + 1);
  profile.alphas.push_back(static_cast<double>(alpha0));

  Real prev = 0;
  Real cur = alpha0;
  for (int n = 1; n <= n_max; ++n) {
    Real next = next_alpha(prev, cur, params);
    if (!(next < kProfileOverflow)) {
      profile.overflowed = true;
      break;
    }
    profile.alphas.push_back(static_cast<double>(next));
    prev = cur;
    cur = next;
  }
  return profile;
}

}  // namespace

Profile generate_profile(double alpha0, int n_max, const ModelParams& params) {
  return generate_impl(alpha0, n_max, params);
}

Profile generate_profile(const Wide& alpha0, int n_max, const ModelParams& params) {
  return generate_impl(alpha0, n_max, params);
}

KolmogorovFit fit_kolmogorov(const Profile& profile) {
  const int count = static_cast<int>(profile.alphas.size());
  if (profile.overflowed) {
    KolmogorovFit fit;
    fit.diverged = true;
    fit.n_hi = count - 1;
    return fit;
  }
  if (count < 10) throw ValidationError("fit_kolmogorov: needs at least 10 entries");
  return fit_kolmogorov(profile, count / 2, count - 1);
}

KolmogorovFit fit_kolmogorov(const Profile& profile, int n_lo, int n_hi) {
  const int count = static_cast<int>(profile.alphas.size());
  KolmogorovFit fit;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  if (n_lo < 0 || n_hi <= n_lo) throw ValidationError("fit_kolmogorov: empty window");
  if (profile.overflowed || n_hi >= count) {
    if (!profile.overflowed) throw ValidationError("fit_kolmogorov: window beyond profile");
    fit.diverged = true;
    return fit;
  }
  if (n_hi - n_lo + 1 < 2) throw ValidationError("fit_kolmogorov: window too short");

  const double lam = profile.params.lambda;
  std::vector<double> ratios;
  for (int n = n_lo; n <= n_hi; ++n)
    ratios.push_back(profile.alphas[static_cast<std::size_t>(n)] * std::pow(lam, -2.0 * n / 3.0));
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double worst = 0.0;
  for (double r : ratios) worst = std::max(worst, std::abs(r / mean - 1.0));
  fit.constant = mean;
  fit.residual = worst;
  return fit;
}

ProfileEnergy profile_energy(const Profile& profile) {
  ProfileEnergy result;
  const auto a_star = profile.a_star();
  double sum = 0.0;
  for (double v : a_star) sum += v * v;
  result.value = sum;
  if (profile.overflowed || a_star.size() < 4) {
    result.diverged = profile.overflowed;
    return result;
  }

  const std::size_t count = a_star.size();
  const std::size_t first = std::min(count - 2, count * 3 / 4);
  double ratio_sum = 0.0;
  double ratio_max = 0.0;
  std::size_t used = 0;
  for (std::size_t k = first; k + 1 < count; ++k) {
    const double tk = a_star[k] * a_star[k];
    if (!(tk > 0.0)) continue;
    const double r = a_star[k + 1] * a_star[k + 1] / tk;
    ratio_sum += r;
    ratio_max = std::max(ratio_max, r);
    ++used;
  }
  if (used == 0 || ratio_max >= 1.0) {
    result.diverged = true;
    return result;
  }
  const double r = ratio_sum / static_cast<double>(used);
  const double last = a_star.back() * a_star.back();
  result.tail = last * r / (1.0 - r);
  result.value = sum + result.tail;
  return result;
}

}  // namespace dyadic
