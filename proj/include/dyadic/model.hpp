#pragma once

#include <cstddef>

namespace dyadic {

/// Model configuration shared by every module.
///
/// `shells` is the truncation index N: shell amplitudes a_0 .. a_N are
/// evolved, so a state carries N + 1 values. The closures a_{-1} = 0 and
/// a_{N+1} = 0 are implied.
struct ModelParams {
  double lambda = 2.0;
  double beta = 0.0;
  double forcing = 0.0;
  int shells = 20;

  /// Throws ValidationError when lambda <= 1, beta < 0, forcing < 0,
  /// shells < 2 or any field is non-finite.
  void validate() const;

  std::size_t state_size() const { return static_cast<std::size_t>(shells) + 1; }
};

}  // namespace dyadic
