#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace mdev {

enum class NormKind { euclidean, sup, p_norm };

// A finite-dimensional normed space together with a declared smoothness
// certificate (r, D): every martingale in it is assumed to satisfy
// E|sum X_i|^r <= D * sum E|X_i|^r. The certificate is user input; it is
// falsified empirically (verify_smoothness), never derived.
struct SmoothSpaceSpec {
  int dim = 1;
  NormKind norm_kind = NormKind::euclidean;
  double norm_p = 2.0;  // exponent for NormKind::p_norm, >= 1
  double r = 2.0;       // in (1, 2]
  double D = 1.0;       // >= 1

  // Euclidean R^d: orthogonality forces D = 1 at r = 2.
  static SmoothSpaceSpec euclidean(int dim) { return SmoothSpaceSpec{dim, NormKind::euclidean, 2.0, 2.0, 1.0}; }

  static SmoothSpaceSpec with_certificate(int dim, NormKind kind, double norm_p, double r, double D) {
    SmoothSpaceSpec s{dim, kind, norm_p, r, D};
    s.validate();
    return s;
  }

  void validate() const {
    if (dim < 1) throw std::invalid_argument("SmoothSpaceSpec: dim must be positive");
    if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("SmoothSpaceSpec: r must lie in (1,2]");
    if (!(D >= 1.0)) throw std::invalid_argument("SmoothSpaceSpec: D must be >= 1");
    if (norm_kind == NormKind::p_norm && !(norm_p >= 1.0))
      throw std::invalid_argument("SmoothSpaceSpec: p_norm exponent must be >= 1");
  }
};

inline double norm(const SmoothSpaceSpec& space, std::span<const double> v) {
  if (static_cast<int>(v.size()) != space.dim)
    throw std::invalid_argument("norm: vector length " + std::to_string(v.size()) +
                                " does not match space dim " + std::to_string(space.dim));
  switch (space.norm_kind) {
    case NormKind::euclidean: {
      double s = 0.0;
      for (double x : v) s += x * x;
      return std::sqrt(s);
    }
    case NormKind::sup: {
      double m = 0.0;
      for (double x : v) m = std::max(m, std::fabs(x));
      return m;
    }
    case NormKind::p_norm: {
      double s = 0.0;
      for (double x : v) s += std::pow(std::fabs(x), space.norm_p);
      return std::pow(s, 1.0 / space.norm_p);
    }
  }
  return 0.0;
}

}  // namespace mdev
