#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "mdev/errors.hpp"

namespace mdev {

// Tail function t -> P{Z > t} of a non-negative random variable: the common
// currency of every bound evaluator. Non-increasing, [0,1]-valued,
// right-continuous. Analytic kinds carry exact knots, moments and decay
// envelopes so quadrature can split at kinks and bound truncation remainders.
class TailFunction {
 public:
  struct PowerEnvelope {
    double A;      // G(t) <= A * t^-alpha ...
    double alpha;  //
    double t0;     // ... for t >= t0
  };

  // ---- factories ----

  static TailFunction zero() { return TailFunction(Piecewise{{}, {0.0}}); }

  // degenerate P{Z > t} = 1 for every t (Z = +infinity)
  static TailFunction one() { return TailFunction(Piecewise{{}, {1.0}}); }

  // point mass at `at` (> 0): G = 1 below, 0 from `at` on
  static TailFunction step(double at) {
    if (!(at > 0)) throw std::invalid_argument("TailFunction::step: location must be > 0");
    return TailFunction(Piecewise{{at}, {1.0, 0.0}});
  }

  // values[k] on [knots[k-1], knots[k]); values.size() == knots.size() + 1
  static TailFunction piecewise(std::vector<double> knots, std::vector<double> values) {
    Piecewise pw{std::move(knots), std::move(values)};
    check_piecewise(pw);
    return TailFunction(std::move(pw));
  }

  static TailFunction pareto(double alpha, double scale = 1.0) {
    if (!(alpha > 0) || !(scale > 0))
      throw std::invalid_argument("TailFunction::pareto: alpha and scale must be > 0");
    return TailFunction(Pareto{alpha, scale});
  }

  static TailFunction exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("TailFunction::exponential: rate must be > 0");
    return TailFunction(Exponential{rate});
  }

  // tail of max of n iid copies with base tail g: 1 - (1-g)^n
  static TailFunction iid_max(TailFunction base, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("TailFunction::iid_max: n must be >= 1");
    if (n == 1) return base;
    return TailFunction(IidMax{std::make_shared<TailFunction>(std::move(base)), n});
  }

  // right-continuous empirical exceedance function
  static TailFunction from_samples(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("TailFunction::from_samples: empty sample set");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 0) throw std::invalid_argument("TailFunction::from_samples: negative sample");
    const double n = static_cast<double>(sorted.size());
    std::vector<double> knots, values;
    values.push_back(1.0);
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      knots.push_back(sorted[i]);
      values.push_back(static_cast<double>(sorted.size() - j) / n);
      i = j;
    }
    TailFunction t{Piecewise{std::move(knots), std::move(values)}};
    t.empirical_ = true;
    return t;
  }

  // ---- evaluation ----

  double operator()(double t) const {
    if (t < 0) t = 0;
    return std::visit([&](const auto& k) { return eval(k, t); }, impl_);
  }

  // P{Z >= t} (left limit); differs from operator() only at atoms
  double left_limit(double t) const {
    if (t <= 0) return std::visit([&](const auto& k) { return eval(k, 0.0); }, impl_);
    if (const auto* pw = std::get_if<Piecewise>(&impl_)) {
      const auto it = std::lower_bound(pw->knots.begin(), pw->knots.end(), t);
      return pw->values[static_cast<std::size_t>(it - pw->knots.begin())];
    }
    if (const auto* im = std::get_if<IidMax>(&impl_)) return one_minus_pow(im->base->left_limit(t), im->n);
    return (*this)(t);
  }

  // locations of jumps / kinks, ascending
  const std::vector<double>& knots() const { return knots_; }

  // smallest t with G == 0 beyond it; +inf when the tail never vanishes
  double upper_support() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Piecewise>) {
            if (k.values.back() > 0) return std::numeric_limits<double>::infinity();
            std::size_t j = k.values.size() - 1;
            while (j > 0 && k.values[j - 1] == 0.0) --j;
            if (j == 0) return 0.0;
            return k.knots[j - 1];
          } else if constexpr (std::is_same_v<K, IidMax>) {
            return k.base->upper_support();
          } else {
            return std::numeric_limits<double>::infinity();
          }
        },
        impl_);
  }

  std::optional<PowerEnvelope> power_envelope() const {
    if (const auto* p = std::get_if<Pareto>(&impl_))
      return PowerEnvelope{std::pow(p->scale, p->alpha), p->alpha, p->scale};
    if (const auto* im = std::get_if<IidMax>(&impl_)) {
      if (auto base = im->base->power_envelope())
        return PowerEnvelope{static_cast<double>(im->n) * base->A, base->alpha, base->t0};
    }
    return std::nullopt;
  }

  std::optional<double> exp_rate() const {
    if (const auto* e = std::get_if<Exponential>(&impl_)) return e->rate;
    if (const auto* im = std::get_if<IidMax>(&impl_))
      if (auto r = im->base->exp_rate()) return r;  // union bound keeps the rate
    return std::nullopt;
  }

  bool is_empirical() const { return empirical_; }

  // ---- exact moments ----
  // E[Z^rho]; std::domain_error when divergent
  double moment(double rho) const { return moment_above(rho, 0.0); }

  // E[Z^rho 1{Z >= a}]
  double moment_above(double rho, double a) const {
    if (!(rho > 0)) throw std::invalid_argument("moment_above: rho must be > 0");
    if (a < 0) a = 0;
    return std::pow(a, rho) * left_limit(a) + rho * tail_power_integral(rho, a);
  }

  // E[Z^rho 1{Z < a}] (finite even when the full moment diverges)
  double moment_below(double rho, double a) const {
    if (!(rho > 0)) throw std::invalid_argument("moment_below: rho must be > 0");
    if (!(a > 0)) return 0.0;
    return rho * head_power_integral(rho, a) - std::pow(a, rho) * left_limit(a);
  }

 private:
  struct Piecewise {
    std::vector<double> knots;   // ascending, > 0 allowed to include 0 atoms
    std::vector<double> values;  // size knots.size()+1, non-increasing in [0,1]
  };
  struct Pareto {
    double alpha, scale;
  };
  struct Exponential {
    double rate;
  };
  struct IidMax {
    std::shared_ptr<const TailFunction> base;
    std::int64_t n;
  };

  template <typename Impl>
  explicit TailFunction(Impl impl) : impl_(std::move(impl)) {
    knots_ = std::visit(
        [](const auto& k) -> std::vector<double> {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Piecewise>) return k.knots;
          else if constexpr (std::is_same_v<K, Pareto>) return {k.scale};
          else if constexpr (std::is_same_v<K, IidMax>) return k.base->knots();
          else return {};
        },
        impl_);
  }

  static void check_piecewise(const Piecewise& pw) {
    if (pw.values.size() != pw.knots.size() + 1)
      throw std::invalid_argument("TailFunction: values.size() must equal knots.size()+1");
    for (std::size_t i = 1; i < pw.knots.size(); ++i)
      if (!(pw.knots[i] > pw.knots[i - 1]))
        throw std::invalid_argument("TailFunction: knots must be strictly increasing");
    for (std::size_t i = 0; i < pw.values.size(); ++i) {
      if (!(pw.values[i] >= 0.0 && pw.values[i] <= 1.0))
        throw std::invalid_argument("TailFunction: values must lie in [0,1]");
      if (i > 0 && pw.values[i] > pw.values[i - 1] + 1e-15)
        throw std::invalid_argument("TailFunction: values must be non-increasing");
    }
  }

  static double one_minus_pow(double g, std::int64_t n) {
    if (g <= 0) return 0.0;
    if (g >= 1) return 1.0;
    return -std::expm1(static_cast<double>(n) * std::log1p(-g));
  }

  static double eval(const Piecewise& pw, double t) {
    const auto it = std::upper_bound(pw.knots.begin(), pw.knots.end(), t);
    return pw.values[static_cast<std::size_t>(it - pw.knots.begin())];
  }
  static double eval(const Pareto& p, double t) {
    if (t <= p.scale) return 1.0;
    return std::pow(p.scale / t, p.alpha);
  }
  static double eval(const Exponential& e, double t) { return std::exp(-e.rate * t); }
  static double eval(const IidMax& im, double t) { return one_minus_pow((*im.base)(t), im.n); }

  // int_a^infty t^{rho-1} G(t) dt, exact per kind
  double tail_power_integral(double rho, double a) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Piecewise>) {
            if (k.values.back() > 0) throw std::domain_error("TailFunction: divergent moment (tail does not vanish)");
            double acc = 0.0, lo = a;
            for (std::size_t j = 0; j < k.knots.size(); ++j) {
              const double hi = k.knots[j];
              if (hi > lo) acc += k.values[j] * (std::pow(hi, rho) - std::pow(lo, rho)) / rho;
              lo = std::max(lo, hi);
            }
            return acc;
          } else if constexpr (std::is_same_v<K, Pareto>) {
            if (rho >= k.alpha) throw std::domain_error("TailFunction: divergent moment (rho >= pareto alpha)");
            double acc = 0.0;
            const double s = k.scale;
            if (a < s) acc += (std::pow(s, rho) - std::pow(a, rho)) / rho;
            const double b = std::max(a, s);
            acc += std::pow(s, k.alpha) * std::pow(b, rho - k.alpha) / (k.alpha - rho);
            return acc;
          } else if constexpr (std::is_same_v<K, Exponential>) {
            // int_a^inf t^{rho-1} e^{-rt} dt = r^-rho * Gamma(rho, r a)
            return std::pow(k.rate, -rho) * boost::math::tgamma(rho, k.rate * a);
          } else {
            throw UnsupportedError("TailFunction: no closed-form moment for iid_max tails");
          }
        },
        impl_);
  }

  // int_0^a t^{rho-1} G(t) dt, exact per kind
  double head_power_integral(double rho, double a) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, Piecewise>) {
            double acc = 0.0, lo = 0.0;
            for (std::size_t j = 0; j <= k.knots.size(); ++j) {
              const double hi = std::min(a, j < k.knots.size() ? k.knots[j] : a);
              if (hi > lo) acc += k.values[j] * (std::pow(hi, rho) - std::pow(lo, rho)) / rho;
              lo = std::max(lo, hi);
              if (lo >= a) break;
            }
            return acc;
          } else if constexpr (std::is_same_v<K, Pareto>) {
            const double s = k.scale;
            double acc = std::pow(std::min(a, s), rho) / rho;
            if (a > s) {
              if (rho == k.alpha) acc += std::pow(s, k.alpha) * std::log(a / s);
              else acc += std::pow(s, k.alpha) * (std::pow(a, rho - k.alpha) - std::pow(s, rho - k.alpha)) / (rho - k.alpha);
            }
            return acc;
          } else if constexpr (std::is_same_v<K, Exponential>) {
            return std::pow(k.rate, -rho) * boost::math::tgamma_lower(rho, k.rate * a);
          } else {
            throw UnsupportedError("TailFunction: no closed-form moment for iid_max tails");
          }
        },
        impl_);
  }

  std::variant<Piecewise, Pareto, Exponential, IidMax> impl_;
  bool empirical_ = false;
  std::vector<double> knots_;
};

// Sanity check helper used by quadrature entry points and tests: G must be
// non-increasing and [0,1]-valued on the given grid.
inline bool tail_is_monotone_01(const TailFunction& g, std::span<const double> grid, double tol = 1e-12) {
  double prev = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double v = g(t);
    if (!(v >= -tol && v <= 1.0 + tol)) return false;
    if (v > prev + tol) return false;
    prev = v;
  }
  return true;
}

}  // namespace mdev
