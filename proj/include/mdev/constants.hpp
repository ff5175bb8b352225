#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mdev {

// How the small constant c of the T1/T2 bounds is obtained:
//   closed_form   c = min{1/2, 2^-q / sqrt(D)}
//   solved_delta  c = delta*/2, where delta* in (0,1) solves
//                 (delta/(1-delta))^p * p/(p-1) * D = 2^-q   (beta = 2)
// Both use C = q 8^q / (2^q - 1).
enum class ConstantsMode { closed_form, solved_delta };

struct Constants {
  double c = 0.0;
  double C = 0.0;
  ConstantsMode mode = ConstantsMode::closed_form;
  double delta = std::numeric_limits<double>::quiet_NaN();  // solved_delta only
  double beta = 2.0;
};

inline double big_constant_C(double q) {
  if (!(q > 0)) throw std::invalid_argument("big_constant_C: q must be > 0");
  // 8^q and 2^q via exp2 so integer q comes out exact
  return q * std::exp2(3.0 * q) / (std::exp2(q) - 1.0);
}

inline Constants bound_constants(double q, double D, ConstantsMode mode = ConstantsMode::closed_form,
                                 double p = 2.0) {
  if (!(q > 0)) throw std::invalid_argument("bound_constants: q must be > 0");
  if (!(D >= 1)) throw std::invalid_argument("bound_constants: D must be >= 1");
  Constants k;
  k.mode = mode;
  k.C = big_constant_C(q);
  if (mode == ConstantsMode::closed_form) {
    k.c = std::min(0.5, std::exp2(-q) / std::sqrt(D));
    return k;
  }
  if (!(p > 1)) throw std::invalid_argument("bound_constants: solved_delta needs p > 1");
  const double target = std::exp2(-q);
  auto coeff = [&](double delta) {
    return std::pow(delta / (1.0 - delta), p) * (p / (p - 1.0)) * D;
  };
  double lo = 0.0, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (coeff(mid) < target ? lo : hi) = mid;
  }
  k.delta = 0.5 * (lo + hi);
  k.c = 0.5 * k.delta;
  return k;
}

inline ConstantsMode constants_mode_from_string(const std::string& s) {
  if (s == "closed_form") return ConstantsMode::closed_form;
  if (s == "solved_delta") return ConstantsMode::solved_delta;
  throw std::invalid_argument("unknown constants mode '" + s + "' (closed_form|solved_delta)");
}

inline const char* to_string(ConstantsMode m) {
  return m == ConstantsMode::closed_form ? "closed_form" : "solved_delta";
}

}  // namespace mdev
