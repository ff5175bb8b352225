#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "mdev/errors.hpp"
#include "mdev/field.hpp"
#include "mdev/parallel.hpp"
#include "mdev/processes.hpp"
#include "mdev/rng.hpp"
#include "mdev/tail_function.hpp"

namespace mdev {

// Exceedance-count estimate of a tail probability with an exact (Clopper-
// Pearson) two-sided confidence interval. Identical (seed, trials, model,
// threshold) give identical counts no matter how many workers ran the trials.
struct MCEstimate {
  std::uint64_t exceedances = 0;
  std::uint64_t trials = 0;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  int worker_count = 1;
  bool exact = false;  // set when filled from an enumeration oracle
};

inline std::pair<double, double> clopper_pearson(std::uint64_t k, std::uint64_t n, double gamma) {
  if (n == 0) throw std::invalid_argument("clopper_pearson: trials must be positive");
  if (k > n) throw std::invalid_argument("clopper_pearson: successes exceed trials");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("clopper_pearson: confidence in (0,1)");
  using boost::math::binomial_distribution;
  const double alpha = 1.0 - gamma;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double lo = (k == 0) ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(nn, kk, alpha / 2);
  const double hi = (k == n) ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(nn, kk, alpha / 2);
  return {lo, hi};
}

inline MCEstimate make_estimate(std::uint64_t exceed, std::uint64_t trials, double gamma,
                                std::uint64_t seed, int workers) {
  MCEstimate e;
  e.exceedances = exceed;
  e.trials = trials;
  e.point = static_cast<double>(exceed) / static_cast<double>(trials);
  std::tie(e.ci_low, e.ci_high) = clopper_pearson(exceed, trials, gamma);
  e.confidence = gamma;
  e.seed = seed;
  e.worker_count = workers;
  return e;
}

inline MCEstimate make_exact_estimate(double prob) {
  MCEstimate e;
  e.exceedances = 0;
  e.trials = 1;
  e.point = e.ci_low = e.ci_high = prob;
  e.exact = true;
  return e;
}

inline constexpr std::uint64_t kTrialChunk = 4096;

// max_{1<=i<=n} ||S_i|| along one simulated path
inline double path_running_max(const MartingaleModel& model, std::int64_t n, RngStream& rng,
                               std::vector<double>& scratch) {
  const int dim = model.space.dim;
  double best = 0.0;
  if (dim == 1) {
    double s = 0.0;
    switch (model.kind) {
      case IncrementKind::iid_sign:
        for (std::int64_t i = 0; i < n; ++i) {
          s += rng.rademacher();
          best = std::max(best, std::fabs(s));
        }
        return best;
      case IncrementKind::iid_pareto_sym:
        for (std::int64_t i = 0; i < n; ++i) {
          s += rng.pareto_sym(model.alpha, model.scale);
          best = std::max(best, std::fabs(s));
        }
        return best;
      case IncrementKind::vol_modulated: {
        double prev = rng.rademacher();
        for (std::int64_t i = 0; i < n; ++i) {
          const double sigma = prev < 0 ? model.vol.lo : model.vol.hi;
          const double eps = rng.rademacher();
          s += sigma * eps;
          prev = eps;
          best = std::max(best, std::fabs(s));
        }
        return best;
      }
      default:
        break;
    }
  }
  scratch.assign(static_cast<std::size_t>(dim), 0.0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::int64_t i = 0; i < n; ++i) {
    detail::draw_sphere(rng, dim, x.data());
    for (int k = 0; k < dim; ++k) scratch[static_cast<std::size_t>(k)] += x[static_cast<std::size_t>(k)];
    best = std::max(best, norm(model.space, scratch));
  }
  return best;
}

// exceedance counts for several thresholds over a shared path set (common
// random numbers: one simulation pass feeds every threshold)
inline std::vector<std::uint64_t> exceedance_counts(const MartingaleModel& model, std::int64_t n,
                                                    std::span<const double> thresholds,
                                                    std::uint64_t trials, std::uint64_t seed,
                                                    int workers) {
  if (trials == 0) throw std::invalid_argument("exceedance_counts: trials must be positive");
  using Counts = std::vector<std::uint64_t>;
  Counts zero(thresholds.size(), 0);
  return parallel_chunked<Counts>(
      trials, kTrialChunk, workers,
      [&](std::uint64_t b, std::uint64_t e) {
        Counts local(thresholds.size(), 0);
        std::vector<double> scratch;
        for (std::uint64_t t = b; t < e; ++t) {
          RngStream rng(seed, t);
          const double m = path_running_max(model, n, rng, scratch);
          for (std::size_t j = 0; j < thresholds.size(); ++j)
            if (m > thresholds[j]) ++local[j];
        }
        return local;
      },
      zero,
      [](Counts a, const Counts& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return a;
      });
}

inline MCEstimate estimate_max_tail(const MartingaleModel& model, std::int64_t n, double threshold,
                                    std::uint64_t trials, std::uint64_t seed, double gamma = 0.99,
                                    int workers = 0) {
  if (workers <= 0) workers = default_workers();
  const double thr[1] = {threshold};
  const auto counts = exceedance_counts(model, n, thr, trials, seed, workers);
  return make_estimate(counts[0], trials, gamma, seed, workers);
}

// field version: prefix-sum array per trial, O(prod n) work and memory
inline std::vector<std::uint64_t> field_exceedance_counts(const FieldModel& field,
                                                          std::span<const std::int64_t> n,
                                                          std::span<const double> thresholds,
                                                          std::uint64_t trials, std::uint64_t seed,
                                                          int workers,
                                                          std::int64_t budget = (std::int64_t{1} << 22)) {
  if (trials == 0) throw std::invalid_argument("field_exceedance_counts: trials must be positive");
  box_volume(n);  // validates sides; budget checked inside sample_field
  using Counts = std::vector<std::uint64_t>;
  Counts zero(thresholds.size(), 0);
  std::vector<std::int64_t> dims(n.begin(), n.end());
  return parallel_chunked<Counts>(
      trials, kTrialChunk, workers,
      [&, dims](std::uint64_t b, std::uint64_t e) {
        Counts local(thresholds.size(), 0);
        std::vector<double> buf;
        for (std::uint64_t t = b; t < e; ++t) {
          RngStream rng(seed, t);
          sample_field(field, dims, rng, buf, budget);
          prefix_sums_inplace(buf, dims);
          const double m = max_abs(buf);
          for (std::size_t j = 0; j < thresholds.size(); ++j)
            if (m > thresholds[j]) ++local[j];
        }
        return local;
      },
      zero,
      [](Counts a, const Counts& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return a;
      });
}

inline MCEstimate estimate_field_max_tail(const FieldModel& field, std::span<const std::int64_t> n,
                                          double threshold, std::uint64_t trials, std::uint64_t seed,
                                          double gamma = 0.99, int workers = 0,
                                          std::int64_t budget = (std::int64_t{1} << 22)) {
  if (workers <= 0) workers = default_workers();
  const double thr[1] = {threshold};
  const auto counts = field_exceedance_counts(field, n, thr, trials, seed, workers, budget);
  return make_estimate(counts[0], trials, gamma, seed, workers);
}

// ---- exact enumeration oracles ----

struct ExactProb {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value = 0.0;
};

// P{max_{1<=i<=n} |S_i| > threshold} by full enumeration of the +-1
// innovations (sign and switching-volatility models only)
inline ExactProb brute_force_max_tail(const MartingaleModel& model, std::int64_t n, double threshold) {
  if (n < 1) throw std::invalid_argument("brute_force_max_tail: n must be >= 1");
  if (!model.finite_support())
    throw UnsupportedError("brute_force_max_tail: model does not have finite support");
  const bool vol = model.kind == IncrementKind::vol_modulated;
  const std::int64_t sites = vol ? n + 1 : n;  // warm-up innovation for sigma_1
  if (sites > 20) throw ResourceError("brute_force_max_tail: state space above 2^20");
  const std::uint64_t states = std::uint64_t{1} << sites;
  std::uint64_t hits = 0;
  for (std::uint64_t w = 0; w < states; ++w) {
    double s = 0.0, best = 0.0;
    if (vol) {
      double prev = (w & 1) ? 1.0 : -1.0;
      for (std::int64_t i = 1; i <= n; ++i) {
        const double sigma = prev < 0 ? model.vol.lo : model.vol.hi;
        const double eps = ((w >> i) & 1) ? 1.0 : -1.0;
        s += sigma * eps;
        prev = eps;
        best = std::max(best, std::fabs(s));
      }
    } else {
      for (std::int64_t i = 0; i < n; ++i) {
        s += ((w >> i) & 1) ? 1.0 : -1.0;
        best = std::max(best, std::fabs(s));
      }
    }
    if (best > threshold) ++hits;
  }
  return {hits, states, static_cast<double>(hits) / static_cast<double>(states)};
}

inline ExactProb brute_force_field_max_tail(const FieldModel& field, std::span<const std::int64_t> n,
                                            double threshold) {
  if (!field.all_sign())
    throw UnsupportedError("brute_force_field_max_tail: needs finite-support (sign) axes");
  const std::int64_t sites = std::accumulate(n.begin(), n.end(), std::int64_t{0});
  if (sites > 20) throw ResourceError("brute_force_field_max_tail: state space above 2^20");
  const std::uint64_t states = std::uint64_t{1} << sites;
  const std::int64_t vol = box_volume(n);
  std::vector<std::int64_t> dims(n.begin(), n.end());
  std::vector<double> buf(static_cast<std::size_t>(vol));
  const int d = field.d();
  std::uint64_t hits = 0;
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<std::int64_t> offs(static_cast<std::size_t>(d), 0);
  for (int q = 1; q < d; ++q) offs[static_cast<std::size_t>(q)] = offs[static_cast<std::size_t>(q - 1)] + dims[static_cast<std::size_t>(q - 1)];
  for (std::uint64_t w = 0; w < states; ++w) {
    std::fill(idx.begin(), idx.end(), 0);
    for (std::int64_t flat = 0; flat < vol; ++flat) {
      double prod = 1.0;
      for (int q = 0; q < d; ++q)
        prod *= ((w >> (offs[static_cast<std::size_t>(q)] + idx[static_cast<std::size_t>(q)])) & 1) ? 1.0 : -1.0;
      buf[static_cast<std::size_t>(flat)] = prod;
      for (int q = d - 1; q >= 0; --q) {
        if (++idx[static_cast<std::size_t>(q)] < dims[static_cast<std::size_t>(q)]) break;
        idx[static_cast<std::size_t>(q)] = 0;
      }
    }
    prefix_sums_inplace(buf, dims);
    if (max_abs(buf) > threshold) ++hits;
  }
  return {hits, states, static_cast<double>(hits) / static_cast<double>(states)};
}

// right-continuous empirical exceedance function of a nonempty sample set
inline TailFunction empirical_tail(std::span<const double> samples) {
  return TailFunction::from_samples(samples);
}

// ---- shared-path utilities ----

// norms of `count` independent increments (for empirical increment tails)
inline std::vector<double> collect_increment_norms(const MartingaleModel& model, std::uint64_t count,
                                                   std::uint64_t seed, std::uint64_t stream_salt = 0x6d) {
  std::vector<double> out(static_cast<std::size_t>(count));
  std::vector<double> path;
  for (std::uint64_t i = 0; i < count; ++i) {
    RngStream rng(seed ^ (stream_salt * 0x9e3779b97f4a7c15ull), i);
    sample_path(model, 1, rng, path);
    out[static_cast<std::size_t>(i)] = norm(model.space, path);
  }
  return out;
}

// per-k exceedance counts of P{max_{i <= 2^k} ||S_i|| > threshold_of_k(k)}
// for k in [k_min, k_max], all k sharing one path per trial
inline std::vector<std::uint64_t> dyadic_exceedance_counts(
    const MartingaleModel& model, int k_min, int k_max,
    const std::function<double(int)>& threshold_of_k, std::uint64_t trials, std::uint64_t seed,
    int workers) {
  if (k_min < 0 || k_max < k_min || k_max > 40)
    throw std::invalid_argument("dyadic_exceedance_counts: bad exponent range");
  if (trials == 0) throw std::invalid_argument("dyadic_exceedance_counts: trials must be positive");
  const int nk = k_max - k_min + 1;
  std::vector<double> thresholds(static_cast<std::size_t>(nk));
  for (int k = 0; k < nk; ++k) thresholds[static_cast<std::size_t>(k)] = threshold_of_k(k_min + k);
  using Counts = std::vector<std::uint64_t>;
  Counts zero(static_cast<std::size_t>(nk), 0);
  const std::int64_t n_full = std::int64_t{1} << k_max;
  // fewer trials per chunk: paths are long
  const std::uint64_t chunk = std::max<std::uint64_t>(1, kTrialChunk >> std::max(0, k_max - 8));
  return parallel_chunked<Counts>(
      trials, chunk, workers,
      [&](std::uint64_t b, std::uint64_t e) {
        Counts local(static_cast<std::size_t>(nk), 0);
        std::vector<double> scratch;
        for (std::uint64_t t = b; t < e; ++t) {
          RngStream rng(seed, t);
          const int dim = model.space.dim;
          double s = 0.0, best = 0.0;
          std::vector<double> vs, vx;
          if (dim > 1) {
            vs.assign(static_cast<std::size_t>(dim), 0.0);
            vx.assign(static_cast<std::size_t>(dim), 0.0);
          }
          double prev = 0.0;
          if (model.kind == IncrementKind::vol_modulated) prev = rng.rademacher();
          int next_k = k_min;
          for (std::int64_t i = 1; i <= n_full; ++i) {
            switch (model.kind) {
              case IncrementKind::iid_sign:
                s += rng.rademacher();
                best = std::max(best, std::fabs(s));
                break;
              case IncrementKind::iid_pareto_sym:
                s += rng.pareto_sym(model.alpha, model.scale);
                best = std::max(best, std::fabs(s));
                break;
              case IncrementKind::vol_modulated: {
                const double sigma = prev < 0 ? model.vol.lo : model.vol.hi;
                const double eps = rng.rademacher();
                s += sigma * eps;
                prev = eps;
                best = std::max(best, std::fabs(s));
                break;
              }
              case IncrementKind::iid_uniform_sphere: {
                detail::draw_sphere(rng, dim, vx.data());
                for (int c = 0; c < dim; ++c) vs[static_cast<std::size_t>(c)] += vx[static_cast<std::size_t>(c)];
                best = std::max(best, norm(model.space, vs));
                break;
              }
            }
            if (i == (std::int64_t{1} << next_k)) {
              if (best > thresholds[static_cast<std::size_t>(next_k - k_min)])
                ++local[static_cast<std::size_t>(next_k - k_min)];
              if (++next_k > k_max) break;
            }
          }
        }
        return local;
      },
      zero,
      [](Counts a, const Counts& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
        return a;
      });
}

}  // namespace mdev
