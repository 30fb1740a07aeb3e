#pragma once

#include <cmath>
#include <stdexcept>

namespace csense {

// Upper Gaussian tail integral  \int_t^inf exp(-x^2/2) dx
// = sqrt(pi/2) * erfc(t / sqrt(2)).
inline double gaussian_upper_tail(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::domain_error("gaussian_upper_tail: t must be finite and >= 0");
  return std::sqrt(M_PI / 2.0) * std::erfc(t / std::sqrt(2.0));
}

}  // namespace csense
