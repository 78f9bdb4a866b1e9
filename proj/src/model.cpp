#include "dyadic/model.hpp"

#include <cmath>

#include "dyadic/errors.hpp"

namespace dyadic {

void ModelParams::validate() const {
  if (!std::isfinite(lambda) || !(lambda > 1.0))
    throw ValidationError("lambda must be a finite value > 1");
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("beta must be finite and >= 0");
  if (!std::isfinite(forcing) || forcing < 0.0)
    throw ValidationError("forcing must be finite and >= 0");
  if (shells < 2) throw ValidationError("shells must be >= 2");
}

}  // namespace dyadic
