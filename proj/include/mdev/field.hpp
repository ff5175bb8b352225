#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdev/errors.hpp"
#include "mdev/rng.hpp"
#include "mdev/tail_function.hpp"

namespace mdev {

enum class AxisKind { sign, pareto_sym };

struct AxisDesc {
  AxisKind kind = AxisKind::sign;
  double alpha = 0.0;
  double scale = 1.0;
};

// d-dimensional stationary orthomartingale difference field built as a
// product over independent iid axis innovations: m at site i equals
// prod_q eps^q_{i_q}. The per-axis filtrations commute completely, which the
// enumeration checks below verify exactly for sign axes.
struct FieldModel {
  std::vector<AxisDesc> axes;  // size d >= 1
  double p = 2.0;
  double r = 2.0;
  double D = 1.0;

  int d() const { return static_cast<int>(axes.size()); }

  static FieldModel product_sign(int d, double p = 2.0) {
    if (d < 1) throw std::invalid_argument("FieldModel: d must be >= 1");
    FieldModel f;
    f.axes.assign(static_cast<std::size_t>(d), AxisDesc{});
    f.p = p;
    return f;
  }

  void validate() const {
    if (axes.empty()) throw std::invalid_argument("FieldModel: needs at least one axis");
    if (!(p > 1.0 && p <= r)) throw std::invalid_argument("FieldModel: p must lie in (1, r]");
    for (const auto& a : axes)
      if (a.kind == AxisKind::pareto_sym && !(a.alpha > 1.0 && a.scale > 0))
        throw std::invalid_argument("FieldModel: pareto axis needs alpha > 1, scale > 0");
  }

  bool all_sign() const {
    return std::all_of(axes.begin(), axes.end(),
                       [](const AxisDesc& a) { return a.kind == AxisKind::sign; });
  }
};

inline std::int64_t box_volume(std::span<const std::int64_t> n) {
  std::int64_t v = 1;
  for (auto x : n) {
    if (x < 1) throw std::invalid_argument("box_volume: all box sides must be >= 1");
    v *= x;
  }
  return v;
}

// Draws the increments m o T^i over the box [1, n]; out is laid out with the
// last axis fastest. One iid sequence per axis, drawn axis by axis in fixed
// order, so the sample is a pure function of the stream identity.
inline void sample_field(const FieldModel& field, std::span<const std::int64_t> n, RngStream& rng,
                         std::vector<double>& out, std::int64_t budget = (std::int64_t{1} << 22)) {
  if (static_cast<int>(n.size()) != field.d())
    throw std::invalid_argument("sample_field: box dimension mismatch");
  const std::int64_t vol = box_volume(n);
  if (vol > budget)
    throw ResourceError("sample_field: box volume " + std::to_string(vol) +
                        " exceeds budget " + std::to_string(budget));
  const int d = field.d();
  std::vector<std::vector<double>> axis_draws(static_cast<std::size_t>(d));
  for (int q = 0; q < d; ++q) {
    auto& v = axis_draws[static_cast<std::size_t>(q)];
    v.resize(static_cast<std::size_t>(n[static_cast<std::size_t>(q)]));
    for (auto& x : v) {
      const auto& ax = field.axes[static_cast<std::size_t>(q)];
      x = ax.kind == AxisKind::sign ? rng.rademacher() : rng.pareto_sym(ax.alpha, ax.scale);
    }
  }
  out.assign(static_cast<std::size_t>(vol), 1.0);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  for (std::int64_t flat = 0; flat < vol; ++flat) {
    double prod = 1.0;
    for (int q = 0; q < d; ++q) prod *= axis_draws[static_cast<std::size_t>(q)][static_cast<std::size_t>(idx[static_cast<std::size_t>(q)])];
    out[static_cast<std::size_t>(flat)] = prod;
    for (int q = d - 1; q >= 0; --q) {
      if (++idx[static_cast<std::size_t>(q)] < n[static_cast<std::size_t>(q)]) break;
      idx[static_cast<std::size_t>(q)] = 0;
    }
  }
}

// In-place d-dimensional prefix sums (last axis fastest): afterwards
// data[i] = S_{i+1} = sum of increments over the box [1, i+1].
inline void prefix_sums_inplace(std::vector<double>& data, std::span<const std::int64_t> n) {
  const int d = static_cast<int>(n.size());
  const std::int64_t vol = box_volume(n);
  if (static_cast<std::int64_t>(data.size()) != vol)
    throw std::invalid_argument("prefix_sums_inplace: size mismatch");
  std::int64_t stride = 1;
  for (int q = d - 1; q >= 0; --q) {
    const std::int64_t len = n[static_cast<std::size_t>(q)];
    const std::int64_t block = stride * len;
    for (std::int64_t base = 0; base < vol; base += block)
      for (std::int64_t off = 0; off < stride; ++off)
        for (std::int64_t i = 1; i < len; ++i)
          data[static_cast<std::size_t>(base + off + i * stride)] +=
              data[static_cast<std::size_t>(base + off + (i - 1) * stride)];
    stride = block;
  }
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// exact tail of |m| when the product law admits one: all-sign axes give a
// point mass, a single heavy axis among signs keeps that axis' tail
inline TailFunction field_increment_tail(const FieldModel& field) {
  double sign_scale = 1.0;
  const AxisDesc* heavy = nullptr;
  for (const auto& a : field.axes) {
    if (a.kind == AxisKind::sign) continue;
    if (heavy) throw UnsupportedError("field_increment_tail: more than one non-sign axis");
    heavy = &a;
  }
  if (!heavy) return TailFunction::step(sign_scale);
  return TailFunction::pareto(heavy->alpha, heavy->scale);
}

// tail of E[|m|^p | T_j F_0]: innovations on axes other than j are known at
// that conditioning, axis j contributes its p-th absolute moment
inline TailFunction field_condmom_tail(const FieldModel& field, double p, int j) {
  if (j < 1 || j > field.d()) throw std::invalid_argument("field_condmom_tail: axis out of range");
  double known_moment = 1.0;  // constant factor from sign axes
  const AxisDesc* heavy_other = nullptr;
  for (int q = 0; q < field.d(); ++q) {
    const auto& a = field.axes[static_cast<std::size_t>(q)];
    if (a.kind == AxisKind::sign) continue;
    if (q + 1 == j) continue;  // handled via its moment below
    if (heavy_other) throw UnsupportedError("field_condmom_tail: more than one non-sign axis");
    heavy_other = &a;
  }
  const auto& axj = field.axes[static_cast<std::size_t>(j - 1)];
  double moment_j = 1.0;
  if (axj.kind == AxisKind::pareto_sym) {
    if (p >= axj.alpha) throw std::domain_error("field_condmom_tail: divergent axis moment");
    moment_j = std::pow(axj.scale, p) * axj.alpha / (axj.alpha - p);
  }
  if (!heavy_other) return TailFunction::step(known_moment * moment_j);
  // value = |eps|^p * moment_j with eps pareto: tail at t is pareto tail of
  // |eps| at (t / moment_j)^{1/p}, i.e. pareto with shape alpha/p
  const double a = heavy_other->alpha / p;
  const double s = std::pow(heavy_other->scale, p) * moment_j;
  return TailFunction::pareto(a, s);
}

// ---------------------------------------------------------------------------
// Exact enumeration checks on sign fields (site values +-1, uniform measure).
// ---------------------------------------------------------------------------

namespace enumeration {

// A field on the box [1,n] whose increment at a site is a deterministic
// function of the +-1 axis variables. `assignment` packs all axis variables:
// axis q occupies indices [offset_q, offset_q + n_q).
struct SignFieldSpec {
  std::vector<std::int64_t> n;
  // increment(bits, site): site is 1-based per axis
  std::function<double(std::span<const int>, std::span<const std::int64_t>)> increment;

  int d() const { return static_cast<int>(n.size()); }
  std::int64_t total_vars() const { return std::accumulate(n.begin(), n.end(), std::int64_t{0}); }
  std::int64_t var_offset(int axis) const {
    return std::accumulate(n.begin(), n.begin() + axis, std::int64_t{0});
  }
};

inline SignFieldSpec product_field(std::vector<std::int64_t> n) {
  SignFieldSpec spec;
  spec.n = std::move(n);
  const auto dims = spec.n;
  spec.increment = [dims](std::span<const int> bits, std::span<const std::int64_t> site) {
    double prod = 1.0;
    std::int64_t off = 0;
    for (std::size_t q = 0; q < dims.size(); ++q) {
      prod *= bits[static_cast<std::size_t>(off + site[q] - 1)] ? 1.0 : -1.0;
      off += dims[q];
    }
    return prod;
  };
  return spec;
}

inline SignFieldSpec abs_product_field(std::vector<std::int64_t> n) {
  SignFieldSpec spec = product_field(std::move(n));
  auto base = spec.increment;
  spec.increment = [base](std::span<const int> bits, std::span<const std::int64_t> site) {
    return std::fabs(base(bits, site));
  };
  return spec;
}

// Enumerates all 2^V assignments; evaluates per-assignment functionals and
// exact conditional expectations given any subset of the variables.
class Enumerator {
 public:
  explicit Enumerator(const SignFieldSpec& spec) : spec_(spec) {
    nvars_ = spec.total_vars();
    if (nvars_ > 20)
      throw ResourceError("enumeration: " + std::to_string(nvars_) + " variables exceed the 2^20 budget");
    count_ = std::int64_t{1} << nvars_;
  }

  std::int64_t states() const { return count_; }

  // value of functional f on every assignment
  template <typename F>
  std::vector<double> tabulate(F&& f) const {
    std::vector<double> out(static_cast<std::size_t>(count_));
    std::vector<int> bits(static_cast<std::size_t>(nvars_));
    for (std::int64_t w = 0; w < count_; ++w) {
      for (std::int64_t v = 0; v < nvars_; ++v) bits[static_cast<std::size_t>(v)] = (w >> v) & 1;
      out[static_cast<std::size_t>(w)] = f(std::span<const int>(bits));
    }
    return out;
  }

  // E[f | sigma(vars in mask)] as a table over assignments
  std::vector<double> cond_expect(std::span<const double> table, std::uint64_t mask) const {
    std::vector<double> sum(static_cast<std::size_t>(count_), 0.0);
    std::vector<std::int64_t> cnt(static_cast<std::size_t>(count_), 0);
    for (std::int64_t w = 0; w < count_; ++w) {
      const std::uint64_t key = static_cast<std::uint64_t>(w) & mask;
      sum[static_cast<std::size_t>(key)] += table[static_cast<std::size_t>(w)];
      cnt[static_cast<std::size_t>(key)] += 1;
    }
    std::vector<double> out(static_cast<std::size_t>(count_));
    for (std::int64_t w = 0; w < count_; ++w) {
      const std::uint64_t key = static_cast<std::uint64_t>(w) & mask;
      out[static_cast<std::size_t>(w)] = sum[static_cast<std::size_t>(key)] / static_cast<double>(cnt[static_cast<std::size_t>(key)]);
    }
    return out;
  }

  // mask of sigma(eps^q_i : i <= k_q for every axis q); k is 0-based counts
  std::uint64_t filtration_mask(const SignFieldSpec& spec, std::span<const std::int64_t> k) const {
    std::uint64_t mask = 0;
    std::int64_t off = 0;
    for (int q = 0; q < spec.d(); ++q) {
      for (std::int64_t i = 0; i < std::min(k[static_cast<std::size_t>(q)], spec.n[static_cast<std::size_t>(q)]); ++i)
        mask |= std::uint64_t{1} << (off + i);
      off += spec.n[static_cast<std::size_t>(q)];
    }
    return mask;
  }

 private:
  const SignFieldSpec& spec_;
  std::int64_t nvars_ = 0;
  std::int64_t count_ = 0;
};

struct OrthoCheckResult {
  bool martingale_in_last_axis = true;      // fixed leading coords: martingale in j
  bool max_is_submartingale = true;         // running box max is a submartingale in j
  bool fixed_last_is_orthomartingale = true;  // freezing the last coord stays an orthomartingale
  bool mds_property = true;                 // E[m o T^i | F_j] = 0 whenever i is not <= j

  bool all() const {
    return martingale_in_last_axis && max_is_submartingale && fixed_last_is_orthomartingale &&
           mds_property;
  }
};

OrthoCheckResult check_orthomartingale_properties(const SignFieldSpec& spec, double tol = 1e-12);

}  // namespace enumeration

// Exhaustive verification of the orthomartingale properties for a product
// sign field on the given (small) box; see enumeration::check_* for the
// individual properties.
inline bool verify_orthomartingale(const FieldModel& field, std::span<const std::int64_t> n) {
  if (!field.all_sign())
    throw UnsupportedError("verify_orthomartingale: exact enumeration needs finite-support (sign) axes");
  if (static_cast<int>(n.size()) != field.d())
    throw std::invalid_argument("verify_orthomartingale: box dimension mismatch");
  auto spec = enumeration::product_field(std::vector<std::int64_t>(n.begin(), n.end()));
  return enumeration::check_orthomartingale_properties(spec).all();
}

// ---------------------------------------------------------------------------

namespace enumeration {

inline OrthoCheckResult check_orthomartingale_properties(const SignFieldSpec& spec, double tol) {
  OrthoCheckResult res;
  const Enumerator en(spec);
  const int d = spec.d();
  const auto& n = spec.n;

  // per-site increment tables
  const std::int64_t vol = box_volume(n);
  std::vector<std::vector<double>> inc(static_cast<std::size_t>(vol));
  std::vector<std::int64_t> site(static_cast<std::size_t>(d), 1);
  std::vector<std::vector<std::int64_t>> sites;
  for (std::int64_t flat = 0; flat < vol; ++flat) {
    sites.push_back(site);
    inc[static_cast<std::size_t>(flat)] =
        en.tabulate([&](std::span<const int> bits) { return spec.increment(bits, site); });
    for (int q = d - 1; q >= 0; --q) {
      if (++site[static_cast<std::size_t>(q)] <= n[static_cast<std::size_t>(q)]) break;
      site[static_cast<std::size_t>(q)] = 1;
    }
  }
  auto flat_of = [&](std::span<const std::int64_t> s) {
    std::int64_t f = 0;
    for (int q = 0; q < d; ++q) f = f * n[static_cast<std::size_t>(q)] + (s[static_cast<std::size_t>(q)] - 1);
    return f;
  };

  // S_i tables (box partial sums) for every i in [1,n]
  std::vector<std::vector<double>> S(static_cast<std::size_t>(vol),
                                     std::vector<double>(static_cast<std::size_t>(en.states()), 0.0));
  for (std::int64_t f = 0; f < vol; ++f) {
    // sum of increments over [1, site_f]
    for (std::int64_t g = 0; g < vol; ++g) {
      bool inside = true;
      for (int q = 0; q < d; ++q)
        if (sites[static_cast<std::size_t>(g)][static_cast<std::size_t>(q)] >
            sites[static_cast<std::size_t>(f)][static_cast<std::size_t>(q)]) {
          inside = false;
          break;
        }
      if (!inside) continue;
      const auto& tg = inc[static_cast<std::size_t>(g)];
      auto& tf = S[static_cast<std::size_t>(f)];
      for (std::size_t w = 0; w < tf.size(); ++w) tf[w] += tg[w];
    }
  }

  auto near = [&](std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
  };
  auto dominates = [&](std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] < b[i] - tol) return false;
    return true;
  };

  // marginal filtration along the last axis: all vars of axes < d, axis d up to j
  auto marginal_mask = [&](std::int64_t j) {
    std::vector<std::int64_t> k(n.begin(), n.end());
    k[static_cast<std::size_t>(d - 1)] = j;
    return en.filtration_mask(spec, k);
  };

  // (1) martingale along the last coordinate for each fixed leading index
  // (2) running box maximum is a submartingale along the last coordinate
  if (d >= 1) {
    const std::int64_t nd = n[static_cast<std::size_t>(d - 1)];
    std::vector<std::int64_t> lead(static_cast<std::size_t>(d - 1), 1);
    for (bool more = true; more;) {
      for (std::int64_t j = 1; j < nd; ++j) {
        std::vector<std::int64_t> sj(lead);
        sj.push_back(j);
        std::vector<std::int64_t> sj1(lead);
        sj1.push_back(j + 1);
        const auto& Sj = S[static_cast<std::size_t>(flat_of(sj))];
        const auto& Sj1 = S[static_cast<std::size_t>(flat_of(sj1))];
        const auto cond = en.cond_expect(Sj1, marginal_mask(j));
        if (!near(cond, Sj)) res.martingale_in_last_axis = false;

        // max over the leading box at levels j and j+1
        std::vector<double> Mj(static_cast<std::size_t>(en.states()), 0.0);
        std::vector<double> Mj1(static_cast<std::size_t>(en.states()), 0.0);
        for (std::int64_t g = 0; g < vol; ++g) {
          const auto& sg = sites[static_cast<std::size_t>(g)];
          bool inside = true;
          for (int q = 0; q + 1 < d; ++q)
            if (sg[static_cast<std::size_t>(q)] > lead[static_cast<std::size_t>(q)]) inside = false;
          if (!inside) continue;
          const auto& tg = S[static_cast<std::size_t>(g)];
          if (sg[static_cast<std::size_t>(d - 1)] == j)
            for (std::size_t w = 0; w < Mj.size(); ++w) Mj[w] = std::max(Mj[w], std::fabs(tg[w]));
          if (sg[static_cast<std::size_t>(d - 1)] == j + 1)
            for (std::size_t w = 0; w < Mj1.size(); ++w) Mj1[w] = std::max(Mj1[w], std::fabs(tg[w]));
        }
        const auto condM = en.cond_expect(Mj1, marginal_mask(j));
        if (!dominates(condM, Mj)) res.max_is_submartingale = false;
      }
      // next leading index
      more = false;
      for (int q = d - 2; q >= 0; --q) {
        if (++lead[static_cast<std::size_t>(q)] <= n[static_cast<std::size_t>(q)]) {
          more = true;
          break;
        }
        lead[static_cast<std::size_t>(q)] = 1;
      }
      if (d == 1) break;
    }
  }

  // (3) freezing the last coordinate leaves a (d-1)-dim orthomartingale:
  // E[S'_{i'} | F'_i] = S'_i for i <= i', where F'_i knows all of axis d
  if (d >= 2) {
    const std::int64_t nd = n[static_cast<std::size_t>(d - 1)];
    for (std::int64_t j = 1; j <= nd; ++j) {
      for (std::int64_t f = 0; f < vol; ++f) {
        if (sites[static_cast<std::size_t>(f)][static_cast<std::size_t>(d - 1)] != j) continue;
        for (std::int64_t g = 0; g < vol; ++g) {
          if (sites[static_cast<std::size_t>(g)][static_cast<std::size_t>(d - 1)] != j) continue;
          bool leq = true;
          for (int q = 0; q + 1 < d; ++q)
            if (sites[static_cast<std::size_t>(g)][static_cast<std::size_t>(q)] >
                sites[static_cast<std::size_t>(f)][static_cast<std::size_t>(q)])
              leq = false;
          if (!leq) continue;  // need site_g <= site_f in the leading coords
          std::vector<std::int64_t> k(sites[static_cast<std::size_t>(g)]);
          k[static_cast<std::size_t>(d - 1)] = n[static_cast<std::size_t>(d - 1)];  // F' knows all of axis d
          const auto cond = en.cond_expect(S[static_cast<std::size_t>(f)], en.filtration_mask(spec, k));
          if (!near(cond, S[static_cast<std::size_t>(g)])) res.fixed_last_is_orthomartingale = false;
        }
      }
    }
  }

  // (4) E[m o T^i | F_j] = 0 whenever i is not coordinatewise <= j
  for (std::int64_t f = 0; f < vol; ++f) {
    const auto& si = sites[static_cast<std::size_t>(f)];
    std::vector<std::int64_t> j(static_cast<std::size_t>(d), 0);
    for (bool more = true; more;) {
      bool i_leq_j = true;
      for (int q = 0; q < d; ++q)
        if (si[static_cast<std::size_t>(q)] > j[static_cast<std::size_t>(q)]) i_leq_j = false;
      if (!i_leq_j) {
        const auto cond = en.cond_expect(inc[static_cast<std::size_t>(f)], en.filtration_mask(spec, j));
        for (double v : cond)
          if (std::fabs(v) > tol) {
            res.mds_property = false;
            break;
          }
      }
      more = false;
      for (int q = d - 1; q >= 0; --q) {
        if (++j[static_cast<std::size_t>(q)] <= n[static_cast<std::size_t>(q)]) {
          more = true;
          break;
        }
        j[static_cast<std::size_t>(q)] = 0;
      }
    }
  }

  return res;
}

}  // namespace enumeration
}  // namespace mdev
