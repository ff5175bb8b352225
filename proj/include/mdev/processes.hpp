#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdev/errors.hpp"
#include "mdev/rng.hpp"
#include "mdev/smooth_space.hpp"
#include "mdev/tail_function.hpp"

namespace mdev {

enum class IncrementKind { iid_sign, iid_pareto_sym, iid_uniform_sphere, vol_modulated };

// sigma_i = (previous innovation < 0 ? lo : hi), bounded and known one step
// ahead; lo == hi collapses to constant volatility
struct VolProfile {
  double lo = 1.0;
  double hi = 1.0;
  bool constant() const { return lo == hi; }
};

// Generative model of a strictly stationary martingale difference sequence
// realised as a shift over iid innovations, with analytic increment tails and
// conditional moments wherever the kind allows.
struct MartingaleModel {
  SmoothSpaceSpec space = SmoothSpaceSpec::euclidean(1);
  IncrementKind kind = IncrementKind::iid_sign;
  double alpha = 0.0;  // pareto shape (> 1)
  double scale = 1.0;  // pareto scale
  VolProfile vol{};    // vol_modulated
  double p = 2.0;      // moment order used by the bounds, in (1, r]

  static MartingaleModel sign(double p = 2.0) {
    MartingaleModel m;
    m.kind = IncrementKind::iid_sign;
    m.p = p;
    m.validate();
    return m;
  }
  static MartingaleModel pareto_sym(double alpha, double scale, double p) {
    MartingaleModel m;
    m.kind = IncrementKind::iid_pareto_sym;
    m.alpha = alpha;
    m.scale = scale;
    m.p = p;
    m.validate();
    return m;
  }
  static MartingaleModel uniform_sphere(int dim, double p = 2.0) {
    MartingaleModel m;
    m.space = SmoothSpaceSpec::euclidean(dim);
    m.kind = IncrementKind::iid_uniform_sphere;
    m.p = p;
    m.validate();
    return m;
  }
  // sign innovations scaled by the switching volatility
  static MartingaleModel vol_switch(double lo, double hi, double p = 2.0) {
    MartingaleModel m;
    m.kind = IncrementKind::vol_modulated;
    m.vol = VolProfile{lo, hi};
    m.p = p;
    m.validate();
    return m;
  }

  void validate() const {
    space.validate();
    if (!(p > 1.0 && p <= space.r))
      throw std::invalid_argument("MartingaleModel: p must lie in (1, r]");
    switch (kind) {
      case IncrementKind::iid_pareto_sym:
        if (!(alpha > 1.0)) throw std::invalid_argument("MartingaleModel: pareto alpha must be > 1");
        if (!(scale > 0.0)) throw std::invalid_argument("MartingaleModel: pareto scale must be > 0");
        if (space.dim != 1) throw std::invalid_argument("MartingaleModel: pareto increments are scalar");
        break;
      case IncrementKind::vol_modulated:
        if (!(vol.lo >= 0.0) || !(vol.hi >= vol.lo))
          throw std::invalid_argument("MartingaleModel: need 0 <= lo <= hi");
        if (space.dim != 1) throw std::invalid_argument("MartingaleModel: vol_modulated increments are scalar");
        break;
      case IncrementKind::iid_sign:
        if (space.dim != 1) throw std::invalid_argument("MartingaleModel: sign increments are scalar");
        break;
      case IncrementKind::iid_uniform_sphere:
        if (space.dim < 1) throw std::invalid_argument("MartingaleModel: bad dim");
        break;
    }
  }

  bool finite_support() const {
    return kind == IncrementKind::iid_sign || kind == IncrementKind::vol_modulated;
  }
};

namespace detail {
inline void draw_sphere(RngStream& rng, int dim, double* out) {
  if (dim == 1) {
    out[0] = rng.rademacher();
    return;
  }
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      out[i] = rng.normal();
      norm2 += out[i] * out[i];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int i = 0; i < dim; ++i) out[i] *= inv;
}
}  // namespace detail

// Fills out (n * dim doubles, row i = X_{i+1}) with one path. Deterministic
// given the stream identity; the stream is consumed in a fixed draw order.
inline void sample_path(const MartingaleModel& model, std::int64_t n, RngStream& rng,
                        std::vector<double>& out) {
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  const int dim = model.space.dim;
  out.assign(static_cast<std::size_t>(n) * dim, 0.0);
  switch (model.kind) {
    case IncrementKind::iid_sign:
      for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = rng.rademacher();
      break;
    case IncrementKind::iid_pareto_sym:
      for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = rng.pareto_sym(model.alpha, model.scale);
      break;
    case IncrementKind::iid_uniform_sphere:
      for (std::int64_t i = 0; i < n; ++i)
        detail::draw_sphere(rng, dim, out.data() + static_cast<std::size_t>(i) * dim);
      break;
    case IncrementKind::vol_modulated: {
      double prev = rng.rademacher();  // warm-up innovation fixing sigma_1
      for (std::int64_t i = 0; i < n; ++i) {
        const double sigma = prev < 0 ? model.vol.lo : model.vol.hi;
        const double eps = rng.rademacher();
        out[static_cast<std::size_t>(i)] = sigma * eps;
        prev = eps;
      }
      break;
    }
  }
}

// E|X|^p (norm of one increment); domain error when divergent
inline double increment_abs_moment(const MartingaleModel& model, double p) {
  switch (model.kind) {
    case IncrementKind::iid_sign:
    case IncrementKind::iid_uniform_sphere:
      return 1.0;
    case IncrementKind::iid_pareto_sym:
      if (p >= model.alpha)
        throw std::domain_error("increment_abs_moment: E|X|^p divergent (p >= alpha)");
      return std::pow(model.scale, p) * model.alpha / (model.alpha - p);
    case IncrementKind::vol_modulated:
      return 0.5 * (std::pow(model.vol.lo, p) + std::pow(model.vol.hi, p));
  }
  return 0.0;
}

// exact tail of |X| (one increment); vol_modulated with non-constant sigma
// has no analytic representation here and reports unsupported
inline TailFunction increment_tail(const MartingaleModel& model) {
  switch (model.kind) {
    case IncrementKind::iid_sign:
    case IncrementKind::iid_uniform_sphere:
      return TailFunction::step(1.0);
    case IncrementKind::iid_pareto_sym:
      return TailFunction::pareto(model.alpha, model.scale);
    case IncrementKind::vol_modulated:
      if (model.vol.constant()) {
        if (model.vol.lo == 0.0) return TailFunction::zero();
        return TailFunction::step(model.vol.lo);
      }
      throw UnsupportedError("increment_tail: analytic tail unavailable for non-constant sigma; use an empirical tail");
  }
  return TailFunction::zero();
}

// tail of E[|X_i|^p | F_{i-1}]: constant for iid kinds, a two-point law for
// the switching volatility
inline TailFunction conditional_moment_tail(const MartingaleModel& model, double p) {
  if (!(p > 1.0 && p <= model.space.r))
    throw std::invalid_argument("conditional_moment_tail: p must lie in (1, r]");
  switch (model.kind) {
    case IncrementKind::iid_sign:
    case IncrementKind::iid_uniform_sphere:
      return TailFunction::step(1.0);
    case IncrementKind::iid_pareto_sym:
      return TailFunction::step(increment_abs_moment(model, p));
    case IncrementKind::vol_modulated: {
      const double lo = std::pow(model.vol.lo, p);
      const double hi = std::pow(model.vol.hi, p);
      if (lo == hi) return lo == 0.0 ? TailFunction::zero() : TailFunction::step(lo);
      if (lo == 0.0) return TailFunction::piecewise({hi}, {0.5, 0.0});
      return TailFunction::piecewise({lo, hi}, {1.0, 0.5, 0.0});
    }
  }
  return TailFunction::zero();
}

// tail of max_{i<=n} |X_i|
inline TailFunction maxinc_tail(const MartingaleModel& model, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("maxinc_tail: n must be >= 1");
  switch (model.kind) {
    case IncrementKind::iid_sign:
    case IncrementKind::iid_uniform_sphere:
      return TailFunction::step(1.0);  // |X_i| = 1 a.s.
    case IncrementKind::iid_pareto_sym:
      return TailFunction::iid_max(TailFunction::pareto(model.alpha, model.scale), n);
    case IncrementKind::vol_modulated:
      if (model.vol.constant()) {
        if (model.vol.lo == 0.0) return TailFunction::zero();
        return TailFunction::step(model.vol.lo);
      }
      throw UnsupportedError("maxinc_tail: analytic tail unavailable for non-constant sigma; use an empirical tail");
  }
  return TailFunction::zero();
}

namespace detail {
// survival function of Binomial(n, 1/2): P{K >= k}
inline std::vector<double> binomial_half_survival(std::int64_t n) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1);
  // log C(n,k) - n log 2, rolled up iteratively
  double logp = -static_cast<double>(n) * std::log(2.0);  // k = 0
  pmf[0] = std::exp(logp);
  for (std::int64_t k = 1; k <= n; ++k) {
    logp += std::log(static_cast<double>(n - k + 1)) - std::log(static_cast<double>(k));
    pmf[static_cast<std::size_t>(k)] = std::exp(logp);
  }
  std::vector<double> surv(static_cast<std::size_t>(n) + 2, 0.0);
  for (std::int64_t k = n; k >= 0; --k)
    surv[static_cast<std::size_t>(k)] = surv[static_cast<std::size_t>(k) + 1] + pmf[static_cast<std::size_t>(k)];
  for (auto& s : surv) s = std::min(1.0, s);
  return surv;
}
}  // namespace detail

// tail of sum_{i<=n} E[|X_i|^p | F_{i-1}]
inline TailFunction condsum_tail(const MartingaleModel& model, double p, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("condsum_tail: n must be >= 1");
  switch (model.kind) {
    case IncrementKind::iid_sign:
    case IncrementKind::iid_uniform_sphere:
      return TailFunction::step(static_cast<double>(n));
    case IncrementKind::iid_pareto_sym:
      return TailFunction::step(static_cast<double>(n) * increment_abs_moment(model, p));
    case IncrementKind::vol_modulated: {
      const double lo = std::pow(model.vol.lo, p);
      const double hi = std::pow(model.vol.hi, p);
      if (lo == hi)
        return lo == 0.0 ? TailFunction::zero() : TailFunction::step(static_cast<double>(n) * lo);
      // sum = (n-K) lo^p + K hi^p with K ~ Binomial(n, 1/2)
      const auto surv = detail::binomial_half_survival(n);
      std::vector<double> knots, values;
      values.push_back(1.0);
      for (std::int64_t k = 0; k <= n; ++k) {
        knots.push_back(static_cast<double>(n - k) * lo + static_cast<double>(k) * hi);
        values.push_back(surv[static_cast<std::size_t>(k) + 1]);
      }
      return TailFunction::piecewise(std::move(knots), std::move(values));
    }
  }
  return TailFunction::zero();
}

}  // namespace mdev
