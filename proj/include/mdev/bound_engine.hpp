#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mdev/constants.hpp"
#include "mdev/quadrature.hpp"
#include "mdev/tail_function.hpp"

namespace mdev {

// numeric value together with its absolute-error budget (quadrature estimate
// plus any truncation remainder)
struct BoundValue {
  double value = 0.0;
  double err = 0.0;
};

// Parameters shared by the bound evaluators. n is a scalar for sequence
// bounds and a d-vector for field bounds.
struct BoundParams {
  double p = 2.0;  // in (1, r]
  double q = 0.0;  // > p where a min-weight is used, > 0 otherwise
  double r = 2.0;
  double D = 1.0;
  int d = 1;
  double x = 0.0;  // > 0
  std::vector<std::int64_t> n;
  int axis = 1;  // j for the field conditional-moment bound
  ConstantsMode cmode = ConstantsMode::closed_form;
  double s = 0.0;  // weak-norm exponent for the large-deviation family

  std::int64_t n_scalar() const {
    if (n.size() != 1) throw std::invalid_argument("BoundParams: expected scalar n");
    return n[0];
  }
  std::int64_t box_size() const {
    std::int64_t v = 1;
    for (auto k : n) v *= k;
    return v;
  }
  void require_x() const {
    if (!(x > 0)) throw std::invalid_argument("BoundParams: x must be > 0");
  }
  void require_qp() const {
    if (!(p > 1)) throw std::invalid_argument("BoundParams: p must be > 1");
    if (!(q > p)) throw std::invalid_argument("BoundParams: q > p is required");
  }
  void require_n() const {
    if (n.empty()) throw std::invalid_argument("BoundParams: n is required");
    for (auto k : n)
      if (k < 1) throw std::invalid_argument("BoundParams: n must be >= 1 componentwise");
  }
};

enum class IntegralDomain { unit, halfline };

namespace detail {

// Core weighted tail integral over u in (lo, hi):
//   int G(scale * u^rho) * u^{kappa(u)-1} * (1 + |log u|)^logk du
// with kappa = kb below u=1 and ka above. Piecewise-constant tails are
// integrated exactly via the closed-form antiderivatives; smooth tails get a
// closed-form flat head, adaptive Gauss-Kronrod panels split at every knot,
// and an explicit truncation remainder from the tail's decay envelope.
inline BoundValue tail_weighted_core(const TailFunction& G, double scale, double rho, double lo,
                                     double hi, double kb, double ka, int logk) {
  if (!(scale > 0)) throw std::invalid_argument("weighted_tail_integral: scale must be > 0");
  if (!(rho > 0)) throw std::invalid_argument("weighted_tail_integral: argument power must be > 0");
  const bool to_inf = std::isinf(hi);

  auto weight_kappa = [&](double u) { return u < 1.0 ? kb : ka; };
  auto weight = [&](double u) {
    const double k = weight_kappa(u);
    double w = std::pow(u, k - 1.0);
    if (logk > 0) w *= std::pow(1.0 + std::fabs(std::log(u)), logk);
    return w;
  };
  auto integrand = [&](double u) { return G(scale * std::pow(u, rho)) * weight(u); };
  auto exact_const_piece = [&](double gval, double a, double b) -> double {
    if (gval == 0.0 || !(b > a)) return 0.0;
    double acc = 0.0;
    if (a < 1.0) acc += gval * powerlog_below1(a, std::min(b, 1.0), kb, logk);
    if (b > 1.0) acc += gval * powerlog_above1(std::max(a, 1.0), b, ka, logk);
    return acc;
  };

  // monotonicity sanity check on a coarse geometric grid
  {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = -24; k <= 24; k += 2) {
      const double v = G(std::exp2(static_cast<double>(k)));
      if (!(v >= -1e-12 && v <= 1.0 + 1e-12) || v > prev + 1e-12)
        throw std::invalid_argument("weighted_tail_integral: tail sample is not a non-increasing [0,1] function");
      prev = v;
    }
  }

  // the kinds that are not piecewise-constant between their knots expose
  // either a power envelope or an exponential rate
  const bool smooth = G.power_envelope().has_value() || G.exp_rate().has_value();
  const double support = G.upper_support();

  // effective upper limit: compact supports cut the domain exactly
  double cut = hi;
  if (!std::isinf(support)) {
    const double u_sup = std::pow(support / scale, 1.0 / rho);
    cut = std::min(cut, u_sup);
    if (!(cut > lo)) return {0.0, 0.0};
  } else if (to_inf) {
    // divergence guards for tails that never vanish
    const auto env = G.power_envelope();
    if (!env && !G.exp_rate().has_value())
      throw std::domain_error("weighted_tail_integral: half-line integral of a non-vanishing tail diverges");
    if (env && !(rho * env->alpha > ka))
      throw std::domain_error("weighted_tail_integral: divergent (tail decay too slow for the weight)");
  }

  // split points: every tail knot mapped into u-space, plus the weight kink at
  // u=1; doubling panels take over from `gk_end` when the domain is unbounded
  std::vector<double> u_knots;
  for (double k : G.knots()) {
    if (k <= 0) continue;
    const double u = std::pow(k / scale, 1.0 / rho);
    if (u > lo && u < cut) u_knots.push_back(u);
  }
  double gk_end = cut;
  if (std::isinf(cut)) {
    gk_end = std::max(2.0, 2.0 * std::max(lo, 1.0));
    for (double u : u_knots) gk_end = std::max(gk_end, 2.0 * u);
  }
  std::vector<double> splits(u_knots);
  splits.push_back(1.0);
  splits.push_back(gk_end);
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());

  BoundValue out;
  // G is constant below its first knot; that head is integrated in closed form
  const double first_knot = G.knots().empty() ? 0.0 : G.knots().front();
  const double u_flat = first_knot > 0 ? std::pow(first_knot / scale, 1.0 / rho)
                                       : (smooth ? 0.0 : std::numeric_limits<double>::infinity());

  double a = lo;
  for (double b : splits) {
    if (!(b > a)) continue;
    if (b > gk_end) break;
    if (!smooth || b <= u_flat * (1.0 + 1e-15)) {
      // constant piece, exact
      const double mid = a + 0.5 * (b - a);
      out.value += exact_const_piece(G(scale * std::pow(std::min(mid, 1e30), rho)), a, b);
    } else {
      double start = a;
      if (start == 0.0) {
        // no flat head (e.g. exponential tails): bracket a vanishing head interval
        const double eps0 = std::min(b, 1.0) * 0x1.0p-40;
        const double head_w = exact_const_piece(1.0, 0.0, eps0);
        const double g_hi = G(0.0);
        const double g_lo = G(scale * std::pow(eps0, rho));
        out.value += 0.5 * (g_hi + g_lo) * head_w;
        out.err += 0.5 * (g_hi - g_lo) * head_w;
        start = eps0;
      }
      const QuadResult r = integrate_adaptive(integrand, start, b, 1e-11, 1e-9);
      out.value += r.value;
      out.err += r.err;
    }
    a = b;
  }

  // tail beyond gk_end: doubling panels with an explicit truncation remainder
  if (to_inf && std::isinf(cut)) {
    double U = gk_end;
    const auto env = G.power_envelope();
    const auto rate = G.exp_rate();
    for (int it = 0; it < 1024; ++it) {
      const double tol_here = 1e-14 * std::max(1.0, std::fabs(out.value));
      if (env) {
        const double rem = env->A * std::pow(scale, -env->alpha) *
                           powerlog_above1(std::max(U, 1.0), std::numeric_limits<double>::infinity(),
                                           ka - rho * env->alpha, logk);
        if (rem < tol_here && integrand(U) < 1e-14) {
          out.err += rem;
          return out;
        }
      } else if (rate) {
        const double lambda = *rate * scale * rho * std::pow(std::max(U, 1.0), rho - 1.0);
        if (lambda * U >= 2.0 * (ka + logk + 1.0) && integrand(U) < 1e-14) {
          out.err += integrand(U) * std::max(2.0 / lambda, 1.0);
          return out;
        }
      }
      const QuadResult r = integrate_adaptive(integrand, U, 2.0 * U, 1e-12, 1e-9);
      out.value += r.value;
      out.err += r.err;
      U *= 2.0;
    }
    throw std::domain_error("weighted_tail_integral: half-line integral failed to converge");
  }
  return out;
}

}  // namespace detail

// domain unit:      int_0^1  G(scale u^rho) u^{q-1} (1+|log u|)^{d-1} du
// domain halfline:  int_0^oo G(scale u^rho) min{u^{q-1}, u^{p-1}} (1+|log u|)^{d-1} du   (q > p)
inline BoundValue weighted_tail_integral(const TailFunction& G, double scale, double q,
                                         std::optional<double> p, int d, IntegralDomain domain,
                                         double arg_power = 1.0) {
  if (!(q > 0)) throw std::invalid_argument("weighted_tail_integral: q must be > 0");
  if (d < 1) throw std::invalid_argument("weighted_tail_integral: d must be >= 1");
  if (domain == IntegralDomain::halfline) {
    if (!p) throw std::invalid_argument("weighted_tail_integral: half-line domain needs p");
    if (!(q > *p)) throw std::invalid_argument("weighted_tail_integral: q > p is required on the half-line");
    return detail::tail_weighted_core(G, scale, arg_power, 0.0,
                                      std::numeric_limits<double>::infinity(), q, *p, d - 1);
  }
  return detail::tail_weighted_core(G, scale, arg_power, 0.0, 1.0, q, q, d - 1);
}

// ---- deviation bounds ----

// P{max ||S_i|| > x} <= C int_0^1 P{max ||X_i|| > c x u} u^{q-1} du
//                     + C int_0^1 P{sum E[||X_i||^p | F] > c x^p u^p} u^{q-1} du
inline BoundValue theorem1_rhs(const TailFunction& maxinc_tail, const TailFunction& condsum_tail,
                               const BoundParams& pr) {
  pr.require_x();
  if (!(pr.q > 0)) throw std::invalid_argument("theorem1_rhs: q must be > 0");
  const Constants K = bound_constants(pr.q, pr.D, pr.cmode, pr.p);
  const BoundValue i1 = weighted_tail_integral(maxinc_tail, K.c * pr.x, pr.q, {}, 1, IntegralDomain::unit);
  const BoundValue i2 = weighted_tail_integral(condsum_tail, K.c * std::pow(pr.x, pr.p), pr.q, {}, 1,
                                               IntegralDomain::unit, pr.p);
  return {K.C * (i1.value + i2.value), K.C * (i1.err + i2.err)};
}

// stationary bound without the conditional-moment term:
// P{max_{i<=n} ||S_i|| > x n^{1/p}} <= C int_0^oo P{||m|| > x u} min{u^{q-1},u^{p-1}} du
inline BoundValue theorem2_rhs(const TailFunction& m_tail, const BoundParams& pr) {
  pr.require_x();
  pr.require_qp();
  const Constants K = bound_constants(pr.q, pr.D, pr.cmode, pr.p);
  const BoundValue i = weighted_tail_integral(m_tail, pr.x, pr.q, pr.p, 1, IntegralDomain::halfline);
  return {K.C * i.value, K.C * i.err};
}

// stationary bound with the conditional-moment term
inline BoundValue theorem2_rhs_condvar(const TailFunction& m_tail, const TailFunction& condmom_tail,
                                       const BoundParams& pr) {
  pr.require_x();
  pr.require_qp();
  pr.require_n();
  const double n = static_cast<double>(pr.n_scalar());
  const Constants K = bound_constants(pr.q, pr.D, pr.cmode, pr.p);
  const double npow = std::pow(n, 1.0 / pr.p);
  const BoundValue i1 = weighted_tail_integral(m_tail, K.c * pr.x * npow, pr.q, {}, 1, IntegralDomain::unit);
  const BoundValue i2 = weighted_tail_integral(condmom_tail, K.c * std::pow(pr.x, pr.p), pr.q, pr.p, 1,
                                               IntegralDomain::halfline, pr.p);
  return {K.C * (n * i1.value + i2.value), K.C * (n * i1.err + i2.err)};
}

// field bound without the conditional-moment term:
// P{max_{1<=i<=n} |S_i(m)| > x |n|^{1/p}}
//   <= C int_0^oo P{|m| > x u} min{u^{q-1},u^{p-1}} (1+|log u|)^{d-1} du
inline BoundValue theorem3_rhs(const TailFunction& m_tail, const BoundParams& pr) {
  pr.require_x();
  pr.require_qp();
  if (pr.d < 1) throw std::invalid_argument("theorem3_rhs: d must be >= 1");
  const Constants K = bound_constants(pr.q, pr.D, pr.cmode, pr.p);
  const BoundValue i = weighted_tail_integral(m_tail, pr.x, pr.q, pr.p, pr.d, IntegralDomain::halfline);
  return {K.C * i.value, K.C * i.err};
}

// field bound with the conditional-moment term along axis j
inline BoundValue theorem3_rhs_condvar(const TailFunction& m_tail, const TailFunction& condmom_tail,
                                       const BoundParams& pr) {
  pr.require_x();
  pr.require_qp();
  pr.require_n();
  if (pr.axis < 1 || pr.axis > static_cast<int>(pr.n.size()))
    throw std::invalid_argument("theorem3_rhs_condvar: axis j out of range");
  const double nj = static_cast<double>(pr.n[static_cast<std::size_t>(pr.axis - 1)]);
  const Constants K = bound_constants(pr.q, pr.D, pr.cmode, pr.p);
  const double njpow = std::pow(nj, 1.0 / pr.p);
  const BoundValue i1 =
      weighted_tail_integral(m_tail, pr.x * njpow, pr.q, {}, pr.d, IntegralDomain::unit);
  const BoundValue i2 = weighted_tail_integral(condmom_tail, std::pow(pr.x, pr.p), pr.q, pr.p, pr.d,
                                               IntegralDomain::halfline, pr.p);
  return {K.C * (nj * i1.value + i2.value), K.C * (nj * i1.err + i2.err)};
}

// ---- iterated weight ----

struct IteratedWeight {
  double value = 0.0;
  double err = 0.0;
  double envelope = 0.0;  // (1+|log v|)^{d-1} min{v^{p-1}, v^{q-1}}
};

// I(v) = int_0^oo (1+|log s|)^{d-2} min{s^{p-2},s^{q-2}} min{(v/s)^{p-1},(v/s)^{q-1}} ds
inline IteratedWeight iterated_weight_I(double v, double p, double q, int d) {
  if (!(v > 0)) throw std::invalid_argument("iterated_weight_I: v must be > 0");
  if (!(q > p)) throw std::invalid_argument("iterated_weight_I: q > p is required");
  if (d < 2) throw std::invalid_argument("iterated_weight_I: d must be >= 2");
  const double lv = std::log(v);
  const int k = d - 2;
  // integrate in y = log s; decay rate q-p on both sides
  auto f = [&](double y) {
    const double w1 = std::min((p - 1.0) * y, (q - 1.0) * y);
    const double z = lv - y;  // log(v/s)
    const double w2 = std::min((p - 1.0) * z, (q - 1.0) * z);
    double g = std::exp(w1 + w2);
    if (k > 0) g *= std::pow(1.0 + std::fabs(y), k);
    return g;
  };
  const double lam = q - p;
  const double Y = std::max(1.0, std::fabs(lv)) + 40.0 / lam;
  // beyond |y| = Y the integrand is exactly (1+|y|)^k e^{a*lv} e^{-lam|y|}
  // with a = q-1 on the right and p-1 on the left; both remainders in closed form
  const double gamma_tail =
      detail::factorial(k) * std::pow(lam, -(k + 1)) * detail::poly_exp_sum(lam * (1.0 + Y), k);
  const double rem = (std::exp((q - 1.0) * lv - lam * Y) + std::exp((p - 1.0) * lv - lam * Y)) * gamma_tail;
  const double splits[2] = {std::min(0.0, lv), std::max(0.0, lv)};
  const QuadResult r = integrate_adaptive(f, -Y, Y, 1e-12, 1e-10, splits);
  IteratedWeight out;
  out.value = r.value;
  out.err = r.err + rem;
  out.envelope = std::pow(1.0 + std::fabs(lv), d - 1) * std::min(std::pow(v, p - 1.0), std::pow(v, q - 1.0));
  return out;
}

// ---- proof-step functionals ----

// one-step stopping bound: coefficient * P{max||S|| > x} + P{max||X|| > dx} + P{sum cond > (dx)^p}
inline double lemma1_rhs(double prob_max_gt_x, double maxinc_tail_at_dx, double condsum_tail_at_dxp,
                         double beta, double delta, double p, double D,
                         bool include_moment_factor = true) {
  if (!(beta > 1.0)) throw std::invalid_argument("lemma1_rhs: beta must be > 1");
  if (!(delta > 0.0 && delta < beta - 1.0))
    throw std::invalid_argument("lemma1_rhs: need 0 < delta < beta - 1");
  if (!(p > 1.0)) throw std::invalid_argument("lemma1_rhs: p must be > 1");
  if (!(D >= 1.0)) throw std::invalid_argument("lemma1_rhs: D must be >= 1");
  for (double v : {prob_max_gt_x, maxinc_tail_at_dx, condsum_tail_at_dxp})
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("lemma1_rhs: probabilities must lie in [0,1]");
  double coef = std::pow(delta / (beta - 1.0 - delta), p) * D;
  if (include_moment_factor) coef *= p / (p - 1.0);
  return coef * prob_max_gt_x + maxinc_tail_at_dx + condsum_tail_at_dxp;
}

// f(x) <= C int_0^1 g(b x t) t^{q-1} dt for the doubling recursion's solutions
inline BoundValue iteration_lemma_bound(const std::function<double(double)>& g, double b, double q,
                                        double x) {
  if (!(b > 0) || !(q > 0) || !(x > 0))
    throw std::invalid_argument("iteration_lemma_bound: b, q, x must be > 0");
  // g must be non-increasing and within [0,2]
  double prev = std::numeric_limits<double>::infinity();
  for (int k = -30; k <= 30; ++k) {
    const double v = g(std::exp2(static_cast<double>(k)));
    if (!(v >= -1e-12 && v <= 2.0 + 1e-12) || v > prev + 1e-12)
      throw std::invalid_argument("iteration_lemma_bound: g must be non-increasing with 0 <= g <= 2");
    prev = v;
  }
  std::vector<double> splits;
  for (int k = 1; k <= 50; ++k) splits.push_back(std::exp2(static_cast<double>(-k)));
  std::sort(splits.begin(), splits.end());
  auto f = [&](double t) { return g(b * x * t) * std::pow(t, q - 1.0); };
  const QuadResult r = integrate_adaptive(f, 0.0, 1.0, 1e-12, 1e-10, splits);
  const double C = big_constant_C(q);
  return {C * r.value, C * r.err};
}

// P{X > 2t} <= int_1^oo P{Y > s t} ds under the weak-type hypothesis
inline BoundValue weak_type_bound(const TailFunction& y_tail, double t) {
  if (!(t > 0)) throw std::invalid_argument("weak_type_bound: t must be > 0");
  return detail::tail_weighted_core(y_tail, t, 1.0, 1.0, std::numeric_limits<double>::infinity(),
                                    1.0, 1.0, 0);
}

// ---- weak norms ----

enum class WeakNormMode { sup, limsup_window };

struct WeakNormResult {
  double value = 0.0;
  bool unbounded = false;
};

inline constexpr double kWeakNormUnboundedThreshold = 1e9;

// sup over t of t^s P{Z > t}, searched on a geometric grid (2^-40 .. 2^40)
// plus golden-section refinement and exact probes at the tail's jump points;
// limsup_window restricts to t >= T as an L^{s,oo}_0 diagnostic
inline WeakNormResult weak_norm(const TailFunction& tail, double s,
                                WeakNormMode mode = WeakNormMode::sup, double window_T = 0.0) {
  if (!(s > 0)) throw std::invalid_argument("weak_norm: s must be > 0");
  const double tmin = mode == WeakNormMode::limsup_window ? std::max(window_T, 1e-300) : 0.0;
  auto m = [&](double t) { return std::pow(t, s) * tail(t); };

  double best = 0.0, best_t = 1.0;
  for (int k = -40; k <= 40; ++k) {
    const double t = std::exp2(static_cast<double>(k));
    if (t < tmin) continue;
    const double v = m(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  // still growing at the top of the grid: polynomial escape to +infinity
  const bool growing_at_top = m(std::exp2(40.0)) > m(std::exp2(35.0)) * 1.07 &&
                              m(std::exp2(40.0)) > 0.0;
  // jump points carry the suprema of step-like tails; probe both one-sided limits
  for (double knot : tail.knots()) {
    if (knot <= 0 || knot < tmin) continue;
    best = std::max(best, std::pow(knot, s) * tail.left_limit(knot));
    best = std::max(best, m(knot));
  }
  // golden-section refinement around the best grid point
  {
    double lo = std::max(tmin, best_t * 0.5), hi = best_t * 2.0;
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - phi * (b - a), d2 = a + phi * (b - a);
    for (int it = 0; it < 160 && (b - a) > 1e-14 * b; ++it) {
      if (m(c) >= m(d2)) b = d2;
      else a = c;
      c = b - phi * (b - a);
      d2 = a + phi * (b - a);
    }
    best = std::max(best, m(0.5 * (a + b)));
  }
  WeakNormResult out;
  out.value = best;
  out.unbounded = best > kWeakNormUnboundedThreshold || growing_at_top;
  return out;
}

// ---- large-deviation bounds ----

struct Thm5Bound {
  double value = 0.0;
  double err = 0.0;
  double trunc_moment = 0.0;  // E[||m||^p 1{||m|| >= theta}], theta = 2^{n(1-1/p)} x
  double implied_K = std::numeric_limits<double>::infinity();
};

// valid upper bound for 2^{n(p-1)} P{max_{i<=2^n} ||S_i|| > 2^n x}:
//   C(q) x^-p [ E[||m||^p min{1, ||m||/theta}^{q-p}] / (q-p) + E[||m||^p 1{||m||>=theta}] / p ]
inline Thm5Bound largedev_thm5(const TailFunction& m_tail, double p, double q, double x, int n_exp) {
  if (!(p > 1)) throw std::invalid_argument("largedev_thm5: p must be > 1");
  if (!(q > p)) throw std::invalid_argument("largedev_thm5: q > p required");
  if (!(x > 0)) throw std::invalid_argument("largedev_thm5: x must be > 0");
  if (n_exp < 0) throw std::invalid_argument("largedev_thm5: n must be >= 0");
  const double theta = std::exp2(static_cast<double>(n_exp) * (1.0 - 1.0 / p)) * x;
  const double trunc = m_tail.moment_above(p, theta);
  const double mixed = std::pow(theta, p - q) * m_tail.moment_below(q, theta) + trunc;
  const double C = big_constant_C(q);
  Thm5Bound out;
  out.trunc_moment = trunc;
  out.value = C * std::pow(x, -p) * (mixed / (q - p) + trunc / p);
  out.err = 1e-13 * out.value;
  if (trunc > 0) out.implied_K = out.value / trunc;
  return out;
}

// sup_n 2^{ns/2} P{max_{i<=2^n} ||S_i|| > 2^n x} under weak-norm hypotheses
inline BoundValue largedev_thm6_weak(const TailFunction& m_tail, const TailFunction& condvar_tail,
                                     double s, double x, double D) {
  if (!(s > 2)) throw std::invalid_argument("largedev_thm6_weak: s must be > 2");
  if (!(x > 0)) throw std::invalid_argument("largedev_thm6_weak: x must be > 0");
  const Constants K = bound_constants(2.0 * s, D, ConstantsMode::closed_form);
  const WeakNormResult l1 = weak_norm(m_tail, s / 2.0 + 1.0);
  const WeakNormResult l2 = weak_norm(condvar_tail, s / 2.0);
  if (l1.unbounded || l2.unbounded)
    throw std::domain_error("largedev_thm6_weak: infinite weak norm");
  const double term1 = l1.value * std::pow(K.c * x, -(s / 2.0 + 1.0)) / (1.5 * s - 1.0);
  const double term2 = l2.value * std::pow(K.c, -s / 2.0) * std::pow(x, -s) * (1.0 / s + 1.0 / (s - 2.0));
  return {K.C * (term1 + term2), 0.0};
}

// corollary form: hypotheses on ||m|| only
inline BoundValue largedev_cor_weak(const TailFunction& m_tail, double s, double x, double D) {
  if (!(s > 2)) throw std::invalid_argument("largedev_cor_weak: s must be > 2");
  if (!(x > 0)) throw std::invalid_argument("largedev_cor_weak: x must be > 0");
  const Constants K = bound_constants(2.0 * s, D, ConstantsMode::closed_form);
  const WeakNormResult lam = weak_norm(m_tail, s);
  if (lam.unbounded) throw std::domain_error("largedev_cor_weak: infinite weak norm");
  // conditional Jensen at exponent (s+2)/4 passes the weak norm through E[.|G]
  const double cond_const = std::pow(2.0 * s / (s - 2.0), 2.0 * s / (s + 2.0));
  const double bracket = std::pow(K.c, -s) / s +
                         cond_const * std::pow(K.c, -s / 2.0) * (1.0 / s + 1.0 / (s - 2.0));
  return {K.C * lam.value * std::pow(x, -s) * bracket, 0.0};
}

// summed dyadic bound: sum_n 2^{ns/2} P{...} <= value
inline BoundValue largedev_thm7_series(const TailFunction& m_tail, const TailFunction& condvar_tail,
                                       double s, double x, double D) {
  if (!(s > 2)) throw std::invalid_argument("largedev_thm7_series: s must be > 2");
  if (!(x > 0)) throw std::invalid_argument("largedev_thm7_series: x must be > 0");
  const Constants K = bound_constants(2.0 * s, D, ConstantsMode::closed_form);
  const double mu1 = m_tail.moment(s / 2.0 + 1.0);          // E ||m||^{s/2+1}
  const double mu2 = condvar_tail.moment(s / 2.0);          // E (E[||m||^2|TF_0])^{s/2}
  auto geom = [](double qq) { return 1.0 / (1.0 - std::exp2(-qq)); };
  const double term1 = geom(s / 2.0 + 1.0) * std::pow(K.c * x, -(s / 2.0 + 1.0)) * mu1 / (1.5 * s - 1.0);
  const double term2 =
      geom(s / 2.0) * std::pow(K.c, -s / 2.0) * std::pow(x, -s) * mu2 * (1.0 / s + 1.0 / (s - 2.0));
  return {K.C * (term1 + term2), 0.0};
}

}  // namespace mdev
