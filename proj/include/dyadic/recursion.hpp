#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dyadic/errors.hpp"
#include "dyadic/model.hpp"
#include "dyadic/wide.hpp"

namespace dyadic {

/// Normalized self-similar profile α_n = λ^n a_n*, with α_{-1} = 0 implied.
struct Profile {
  ModelParams params;
  double alpha0 = 0.0;
  std::vector<double> alphas;  // alphas[n] = α_n
  bool overflowed = false;     // iteration stopped once α_n exceeded 1e300

  /// a_n* = λ^{-n} α_n.
  std::vector<double> a_star() const;
};

inline constexpr double kProfileOverflow = 1e300;

/// α_{n+1} from (α_{n-1}, α_n).
///
/// β = 0 gives 1 + λ² x² / y. For β > 0 the positive root of the stationarity
/// quadratic is evaluated as 2(λ²x²/y + βλx + 1) / (1 + √(1 + Z)) with
/// Z = (4β/λ)(λ²x²/y² + βλx/y + 1/y); this avoids subtracting two O(1/β)
/// terms.
template <class Real>
Real next_alpha(const Real& prev, const Real& cur, const ModelParams& params) {
  if (!(cur > 0)) throw DomainError("next_alpha: current value must be positive");
  if (prev < 0) throw DomainError("next_alpha: previous value must be non-negative");
  using std::sqrt;
  const Real lam = params.lambda;
  const Real sq = lam * lam * prev * prev / cur;
  if (params.beta == 0.0) return 1 + sq;
  const Real beta = params.beta;
  const Real z = 4 * beta / lam * (sq / cur + beta * lam * prev / cur + 1 / cur);
  return 2 * (sq + beta * lam * prev + 1) / (1 + sqrt(1 + z));
}

/// The β > 0 recursion written as −(λ/2β) y + √((λy/2β)² + (λ/β)(λ²x² + βλxy + y)).
/// Kept for the cancellation regression; loses about log10(1/β) digits.
double next_alpha_naive(double prev, double cur, const ModelParams& params);

/// Positive root of the quadratic obtained by inserting a_j(t) = a_j*/(t − t0)
/// into shell j = 1 of the ODE. The coefficients are read off the ODE
/// right-hand side, not from the closed-form recursion.
double quadratic_oracle(double prev, double cur, const ModelParams& params);

/// Iterates next_alpha from (α_{-1}, α_0) = (0, alpha0) up to n_max.
Profile generate_profile(double alpha0, int n_max, const ModelParams& params);
/// Same, carried out in Wide precision and rounded on output.
Profile generate_profile(const Wide& alpha0, int n_max, const ModelParams& params);

struct KolmogorovFit {
  bool diverged = false;
  double constant = 0.0;
  double residual = 0.0;  // max relative deviation from `constant` on the window
  int n_lo = 0;
  int n_hi = 0;
};

/// Mean and max relative spread of α_n λ^{-2n/3} over the trailing half.
KolmogorovFit fit_kolmogorov(const Profile& profile);
/// Same over the inclusive window [n_lo, n_hi].
KolmogorovFit fit_kolmogorov(const Profile& profile, int n_lo, int n_hi);

struct ProfileEnergy {
  bool diverged = false;
  double value = 0.0;  // partial sum plus tail estimate
  double tail = 0.0;
};

/// Σ (λ^{-n} α_n)². The tail beyond the last entry is estimated from the mean
/// term ratio over the trailing quarter; a ratio >= 1 or an overflowed
/// profile is reported as divergence.
ProfileEnergy profile_energy(const Profile& profile);

}  // namespace dyadic
