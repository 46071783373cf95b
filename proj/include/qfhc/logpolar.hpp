#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "qfhc/errors.hpp"

namespace qfhc {

// Nonzero complex number stored as (log|z|, arg z). Products of weights such
// as n! mu^{n(n-1)/2} stay representable long after the linear value has
// overflowed. The phase is accumulated without re-wrapping into (-pi, pi].
struct LogPolar {
  double logmag = 0.0;
  double phase = 0.0;

  static LogPolar from_complex(std::complex<double> z) {
    if (z == std::complex<double>(0.0)) {
      throw InvalidArgument("LogPolar cannot represent zero");
    }
    return {std::log(std::abs(z)), std::arg(z)};
  }

  static LogPolar from_positive(double x) { return {std::log(x), 0.0}; }

  // exp(logmag) underflows to 0 below about -745 and overflows above 709.
  std::complex<double> to_complex() const {
    const double mag = std::exp(logmag);
    if (phase == 0.0) return {mag, 0.0};
    return {mag * std::cos(phase), mag * std::sin(phase)};
  }

  double magnitude() const { return std::exp(logmag); }

  LogPolar inverse() const { return {-logmag, -phase}; }

  LogPolar pow(std::int64_t k) const {
    const double kd = static_cast<double>(k);
    return {kd * logmag, kd * phase};
  }

  friend LogPolar operator*(LogPolar a, LogPolar b) {
    return {a.logmag + b.logmag, a.phase + b.phase};
  }
  friend LogPolar operator/(LogPolar a, LogPolar b) {
    return {a.logmag - b.logmag, a.phase - b.phase};
  }
  bool operator==(const LogPolar&) const = default;
};

}  // namespace qfhc
