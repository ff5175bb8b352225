// Acceptance battery: every criterion prints one [PASS]/[FAIL] line.
// Run all with no arguments, or a single criterion with --only N.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mdev/report_io.hpp"
#include "mdev/smoothness_check.hpp"
#include "mdev/verify.hpp"

using namespace mdev;

namespace {

// ---- criterion 2 battery (shared with criterion 10) ----

std::vector<Scenario> t12_battery(std::uint64_t seed) {
  struct Row {
    MartingaleModel model;
    double p;
    std::string tag;
  };
  const std::vector<Row> rows = {
      {MartingaleModel::sign(1.5), 1.5, "sign_p15"},
      {MartingaleModel::sign(2.0), 2.0, "sign_p20"},
      {MartingaleModel::pareto_sym(1.8, 1.0, 1.5), 1.5, "pareto18_p15"},
  };
  std::vector<Scenario> out;
  for (const auto& row : rows) {
    for (TheoremKind t : {TheoremKind::T1, TheoremKind::T2, TheoremKind::T2_condvar}) {
      Scenario sc;
      sc.id = std::string("b_") + row.tag + "_" + to_string(t);
      sc.theorem = t;
      sc.model = row.model;
      sc.params.p = row.p;
      sc.params.q = row.p + 1.5;
      sc.params.D = 1.0;
      sc.params.cmode = row.p == 2.0 ? ConstantsMode::closed_form : ConstantsMode::solved_delta;
      sc.x_grid = {1.0, 2.0, 4.0, 8.0};
      sc.n_grid = {{8}, {64}, {512}};
      sc.mc.trials = 100000;
      sc.mc.seed = seed;
      out.push_back(sc);
    }
  }
  return out;
}

bool criterion1(std::string& detail) {
  struct Row {
    double q, D, c, C;
  };
  const Row rows[] = {
      {1, 1, 0.5, 8.0},          {1, 4, 0.25, 8.0},
      {2, 1, 0.25, 128.0 / 3.0}, {2, 4, 0.125, 128.0 / 3.0},
      {3, 1, 0.125, 1536.0 / 7.0}, {3, 4, 0.0625, 1536.0 / 7.0},
  };
  for (const auto& r : rows) {
    const Constants k = bound_constants(r.q, r.D);
    if (k.c != r.c || k.C != r.C) {
      detail = "mismatch at q=" + std::to_string(r.q) + " D=" + std::to_string(r.D);
      return false;
    }
  }
  detail = "c and C exact at q in {1,2,3}, D in {1,4}";
  return true;
}

bool criterion2(std::string& detail) {
  int hard = 0, cells = 0, vacuous = 0, noise = 0;
  for (const auto& sc : t12_battery(20240811)) {
    const auto rep = run_scenario(sc);
    hard += rep.hard_failures;
    cells += static_cast<int>(rep.cells.size());
    for (const auto& c : rep.cells) {
      if (c.status == CellStatus::vacuous) ++vacuous;
      if (c.status == CellStatus::mc_noise) ++noise;
    }
  }
  std::ostringstream os;
  os << cells << " cells, " << vacuous << " vacuous, " << noise << " mc_noise, " << hard
     << " hard failures";
  detail = os.str();
  return hard == 0;
}

bool criterion3(std::string& detail) {
  int hard = 0, cells = 0;
  for (const auto& box : {std::vector<std::int64_t>{8, 8}, std::vector<std::int64_t>{4, 4, 4}}) {
    for (TheoremKind t : {TheoremKind::T3, TheoremKind::T3_condvar}) {
      Scenario sc;
      sc.id = "t3_battery";
      sc.theorem = t;
      sc.field = FieldModel::product_sign(static_cast<int>(box.size()));
      sc.params.p = 2.0;
      sc.params.q = 5.0;
      sc.params.d = static_cast<int>(box.size());
      sc.params.axis = 1;
      sc.x_grid = {2.0, 4.0, 8.0};
      sc.n_grid = {box};
      sc.mc.trials = 100000;
      sc.mc.seed = 20240812;
      const auto rep = run_scenario(sc);
      hard += rep.hard_failures;
      cells += static_cast<int>(rep.cells.size());
    }
  }
  std::ostringstream os;
  os << cells << " cells (d=2 and d=3), " << hard << " hard failures";
  detail = os.str();
  return hard == 0;
}

bool criterion4(std::string& detail) {
  struct Case {
    std::function<double()> oracle;
    std::function<MCEstimate(std::uint64_t)> estimate;
    std::string tag;
  };
  const auto sign = MartingaleModel::sign(2.0);
  const auto vol = MartingaleModel::vol_switch(0.5, 1.5, 2.0);
  const auto field2 = FieldModel::product_sign(2);
  const auto field3 = FieldModel::product_sign(3);
  std::vector<Case> cases;
  for (std::int64_t n : {2, 4, 8, 16})
    for (double thr : {1.0, 2.5})
      cases.push_back(
          {[=] { return brute_force_max_tail(sign, n, thr).value; },
           [=](std::uint64_t seed) { return estimate_max_tail(sign, n, thr, 100000, seed, 0.99); },
           "sign_n" + std::to_string(n)});
  static const std::int64_t box2[] = {2, 2};
  static const std::int64_t box3[] = {2, 2, 2};
  for (double thr : {1.5, 3.5})
    cases.push_back({[=] { return brute_force_field_max_tail(field2, box2, thr).value; },
                     [=](std::uint64_t seed) {
                       return estimate_field_max_tail(field2, box2, thr, 100000, seed, 0.99);
                     },
                     "field2x2"});
  cases.push_back({[=] { return brute_force_field_max_tail(field3, box3, 3.5).value; },
                   [=](std::uint64_t seed) {
                     return estimate_field_max_tail(field3, box3, 3.5, 100000, seed, 0.99);
                   },
                   "field2x2x2"});
  cases.push_back({[=] { return brute_force_max_tail(vol, 7, 2.0).value; },
                   [=](std::uint64_t seed) { return estimate_max_tail(vol, 7, 2.0, 100000, seed, 0.99); },
                   "vol_n7"});

  int worst = 100;
  std::string worst_tag = "-";
  for (const auto& c : cases) {
    const double truth = c.oracle();
    int covered = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
      const auto est = c.estimate(1000 + run);
      if (est.ci_low <= truth && truth <= est.ci_high) ++covered;
    }
    if (covered < worst) {
      worst = covered;
      worst_tag = c.tag;
    }
    if (covered < 95) {
      detail = c.tag + ": only " + std::to_string(covered) + "/100 runs covered the oracle";
      return false;
    }
  }
  detail = "all cases >= 95/100 (worst " + std::to_string(worst) + "/100 at " + worst_tag + ")";
  return true;
}

bool criterion5(std::string& detail) {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(std::exp2(static_cast<double>(k)));
  const std::pair<std::string, std::function<double(double)>> gs[] = {
      {"zero", [](double) { return 0.0; }},
      {"two", [](double) { return 2.0; }},
      {"min2_inv", [](double t) { return std::min(2.0, 1.0 / t); }},
  };
  double worst = -1e300;
  for (const auto& [name, g] : gs) {
    for (double q : {1.0, 2.0}) {
      const auto rep = lemma2_property_check(g, 1.0, q, grid, 1e-8);
      worst = std::max(worst, rep.worst_gap);
      if (!rep.pass) {
        detail = "g=" + name + " q=" + std::to_string(q) + " rollout exceeded the bound";
        return false;
      }
    }
  }
  std::ostringstream os;
  os << "rollout <= bound on x in {2^0..2^10}; worst rollout-bound gap " << worst;
  detail = os.str();
  return true;
}

bool criterion6(std::string& detail) {
  const double ts[] = {0.5, 1.0, 2.0, 4.0};
  McConfig mc;
  mc.trials = 100000;
  mc.seed = 60;
  const std::pair<std::string, YLaw> ys[] = {
      {"exponential", YLaw::exponential(1.0)},
      {"pareto2", YLaw::pareto(2.0)},
  };
  for (const auto& [name, y] : ys) {
    for (auto coupling : {Lemma3Coupling::x_equals_y, Lemma3Coupling::ergodic_average}) {
      const auto rep = lemma3_property_check(y, coupling, ts, 64, mc);
      if (!rep.pass) {
        detail = name + (coupling == Lemma3Coupling::x_equals_y ? " exact" : " ergodic") +
                 " coupling violated the weak-type bound";
        return false;
      }
    }
  }
  detail = "exponential and pareto(2) pass in both couplings on t in {0.5,1,2,4}";
  return true;
}

bool criterion7(std::string& detail) {
  for (auto [p, q] : {std::pair<double, double>{1.5, 3.0}, {1.9, 4.0}}) {
    const auto iw = iterated_weight_I(1.0, p, q, 2);
    const double expect = 2.0 / (q - p);
    if (std::fabs(iw.value - expect) > 1e-8 * expect) {
      detail = "I(1) != 2/(q-p) at p=" + std::to_string(p);
      return false;
    }
  }
  double K = 0.0;
  for (int e = -6; e <= 6; ++e) {
    const auto iw = iterated_weight_I(std::pow(10.0, e), 1.5, 3.0, 2);
    if (!(iw.envelope > 0.0) || !std::isfinite(iw.value / iw.envelope)) {
      detail = "envelope ratio not finite at v=1e" + std::to_string(e);
      return false;
    }
    K = std::max(K, iw.value / iw.envelope);
  }
  std::ostringstream os;
  os << "I(1) identities hold; fitted K = " << K << " over v in [1e-6, 1e6]";
  detail = os.str();
  return std::isfinite(K);
}

bool criterion8(std::string& detail) {
  DecaySpec heavy;
  heavy.model = MartingaleModel::pareto_sym(1.8, 1.0, 1.5);
  heavy.theorem = TheoremKind::T5;
  heavy.p = 1.5;
  heavy.x = 1.0;
  heavy.k_from = 4;
  heavy.k_to = 12;
  heavy.mc.trials = 1000000;
  heavy.mc.seed = 4242;
  const auto rh = check_decay(heavy);
  if (!rh.envelope_monotone) {
    detail = "pareto upper-CI envelope not monotone on the top half";
    return false;
  }
  if (!(rh.log_slope_top_half <= 0.0)) {
    detail = "pareto fitted log-slope positive: " + std::to_string(rh.log_slope_top_half);
    return false;
  }

  DecaySpec sign;
  sign.model = MartingaleModel::sign(2.0);
  sign.theorem = TheoremKind::T6_item2;
  sign.s = 3.0;
  sign.x = 1.0;
  sign.k_from = 4;
  sign.k_to = 12;
  sign.mc.trials = 1000000;
  sign.mc.seed = 4243;
  const auto rs = check_decay(sign);
  if (!rs.pass()) {
    detail = "sign-model scaled tail failed the trend check";
    return false;
  }
  std::ostringstream os;
  os << "pareto slope " << rh.log_slope_top_half << ", envelope monotone; sign cells "
     << (rs.all_below_resolution ? "all below MC resolution (exact zeros)" : "decaying");
  detail = os.str();
  return true;
}

bool criterion9(std::string& detail) {
  const auto model = MartingaleModel::sign(2.0);
  for (std::int64_t n : {4, 16, 64}) {
    const auto rep = verify_smoothness(SmoothSpaceSpec::euclidean(1), model, n, 200000, 20240811);
    if (!(rep.ratio_ci_low <= 1.0 && 1.0 <= rep.ratio_ci_high)) {
      detail = "ratio CI misses 1 at n=" + std::to_string(n) + " (ratio " + std::to_string(rep.ratio) + ")";
      return false;
    }
  }
  detail = "ratio CI contains 1 at n in {4,16,64}";
  return true;
}

bool criterion10(std::string& detail) {
  auto render = [](int workers) {
    std::string all;
    for (const auto& sc : t12_battery(777)) all += report_csv(run_scenario(sc, workers));
    return all;
  };
  const std::string w1 = render(1);
  const std::string w8 = render(8);
  if (w1 != w8) {
    detail = "CSV differs between 1 and 8 workers";
    return false;
  }
  std::ostringstream os;
  os << "byte-identical CSV across worker counts (" << w1.size() << " bytes)";
  detail = os.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "constants exactness", criterion1},
      {2, "T1/T2 soundness battery", criterion2},
      {3, "T3 soundness (d=2,3)", criterion3},
      {4, "oracle equivalence", criterion4},
      {5, "iteration-lemma rollout", criterion5},
      {6, "weak-type couplings", criterion6},
      {7, "iterated-weight identity", criterion7},
      {8, "decay trends", criterion8},
      {9, "smoothness certificate", criterion9},
      {10, "determinism across workers", criterion10},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1fs) - %s\n", ok ? "PASS" : "FAIL", c.id, c.name, secs,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
