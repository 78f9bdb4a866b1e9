#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace dyadic {

/// 113-bit binary float. Orbits of the profile recursion separate from the
/// invariant curve by a factor of about two per step, so resolving the
/// selected orbit to n ~ 60 needs roughly 34 significant digits.
using Wide = boost::multiprecision::cpp_bin_float_quad;

}  // namespace dyadic
