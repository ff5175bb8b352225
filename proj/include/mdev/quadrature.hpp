#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace mdev {

struct QuadResult {
  double value = 0.0;
  double err = 0.0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    err += o.err;
    return *this;
  }
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights (positive half)
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGk15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
QuadResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0, resabs = 0.0;
  double fv[15];
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGk15Nodes[i];
    const double f1 = f(c - dx);
    const double f2 = (i == 7) ? f1 : f(c + dx);
    fv[i] = f1;
    fv[14 - i] = f2;
    const double s = (i == 7) ? f1 : (f1 + f2);
    resk += kGk15WK[i] * s;
    resabs += kGk15WK[i] * ((i == 7) ? std::fabs(f1) : (std::fabs(f1) + std::fabs(f2)));
    if (i % 2 == 1) resg += kGk15WG[i / 2] * s;
  }
  const double mean = 0.5 * resk;
  double resasc = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double d1 = std::fabs(fv[i] - mean), d2 = std::fabs(fv[14 - i] - mean);
    resasc += kGk15WK[i] * ((i == 7) ? d1 : (d1 + d2));
  }
  resasc *= h;
  double err = std::fabs(resk - resg) * h;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  return {resk * h, err};
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a,b] with optional pre-splits at known kinks.
// Stops when the accumulated error estimate drops under
// max(abs_tol, rel_tol*|value|) or the panel budget runs out; the achieved
// error estimate is always reported.
template <typename F>
QuadResult integrate_adaptive(const F& f, double a, double b, double abs_tol = 1e-12,
                              double rel_tol = 1e-10, std::span<const double> splits = {},
                              int max_panels = 4000) {
  if (!(b > a)) return {0.0, 0.0};
  struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  std::priority_queue<Panel> heap;
  double total = 0.0, toterr = 0.0;
  auto push = [&](double lo, double hi) {
    const QuadResult r = detail::gk15(f, lo, hi);
    heap.push(Panel{lo, hi, r.value, r.err});
    total += r.value;
    toterr += r.err;
  };
  double lo = a;
  for (double s : splits) {
    if (s > lo && s < b) {
      push(lo, s);
      lo = s;
    }
  }
  push(lo, b);

  int panels = static_cast<int>(heap.size());
  while (panels < max_panels && toterr > std::max(abs_tol, rel_tol * std::fabs(total))) {
    const Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    toterr -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval below double resolution
      total += worst.value;
      heap.push(worst);
      break;
    }
    push(worst.a, mid);
    push(mid, worst.b);
    ++panels;
  }
  return {total, toterr};
}

// ---- exact antiderivatives of the power-log weights ----
//
// The bound integrands combine piecewise-constant tails with weights
// u^{kappa-1} (1+|log u|)^k. On segments not crossing u=1 the integral has a
// closed form, which keeps empirical tails with 1e5 knots exact and cheap.

namespace detail {
inline double poly_exp_sum(double z, int k) {  // sum_{j<=k} z^j / j!
  double term = 1.0, acc = 1.0;
  for (int j = 1; j <= k; ++j) {
    term *= z / j;
    acc += term;
  }
  return acc;
}
inline double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}
}  // namespace detail

// int_a^b u^{kappa-1} (1 - log u)^k du for 0 <= a < b <= 1, kappa > 0, k >= 0
inline double powerlog_below1(double a, double b, double kappa, int k) {
  if (!(kappa > 0)) throw std::invalid_argument("powerlog_below1: kappa must be > 0");
  auto antideriv = [&](double u) -> double {  // int_0^u
    if (u <= 0) return 0.0;
    const double lu = std::log(u);
    if (kappa * lu < -700.0) return 0.0;  // u^kappa underflows; true value does too
    const double z = kappa * (1.0 - lu);
    return std::exp(kappa * lu) * detail::factorial(k) * detail::poly_exp_sum(z, k) /
           std::pow(kappa, k + 1);
  };
  return antideriv(b) - antideriv(a);
}

// int_a^b u^{kappa-1} (1 + log u)^k du for 1 <= a < b (b may be +inf when
// kappa < 0), any real kappa, k >= 0
inline double powerlog_above1(double a, double b, double kappa, int k) {
  const bool binf = std::isinf(b);
  if (kappa == 0.0) {
    if (binf) throw std::domain_error("powerlog_above1: divergent (kappa == 0)");
    auto w = [&](double u) { return std::pow(1.0 + std::log(u), k + 1) / (k + 1); };
    return w(b) - w(a);
  }
  if (kappa < 0) {
    const double m = -kappa;
    auto antideriv = [&](double u) -> double {  // -int_u^inf
      if (std::isinf(u)) return 0.0;
      const double lu = std::log(u);
      if (kappa * lu < -700.0) return 0.0;
      const double z = m * (1.0 + lu);
      return -std::exp(kappa * lu) * detail::factorial(k) * detail::poly_exp_sum(z, k) /
             std::pow(m, k + 1);
    };
    return antideriv(binf ? std::numeric_limits<double>::infinity() : b) - antideriv(a);
  }
  if (binf) throw std::domain_error("powerlog_above1: divergent (kappa > 0 on half-line)");
  auto antideriv = [&](double u) -> double {
    const double w = 1.0 + std::log(u);
    double acc = 0.0, fac = detail::factorial(k);
    for (int j = 0; j <= k; ++j) {
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * (fac / detail::factorial(j)) * std::pow(kappa, j - k - 1) * std::pow(w, j);
    }
    return std::pow(u, kappa) * acc;
  };
  return antideriv(b) - antideriv(a);
}

// int over [a,b] of u^{kappa-1} (1+|log u|)^k, splitting at u=1 as needed
inline double powerlog_segment(double a, double b, double kappa, int k) {
  double acc = 0.0;
  if (a < 1.0) acc += powerlog_below1(a, std::min(b, 1.0), kappa, k);
  if (b > 1.0) acc += powerlog_above1(std::max(a, 1.0), b, kappa, k);
  return acc;
}

}  // namespace mdev
