#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdev/bound_engine.hpp"
#include "mdev/field.hpp"
#include "mdev/processes.hpp"

namespace mdev {

enum class TheoremKind { T1, T2_condvar, T2, T3_condvar, T3, T5, T6_item1, T6_item2, COR, T7, LEM1, LEM2, LEM3 };

inline const char* to_string(TheoremKind t) {
  switch (t) {
    case TheoremKind::T1: return "T1";
    case TheoremKind::T2_condvar: return "T2_condvar";
    case TheoremKind::T2: return "T2";
    case TheoremKind::T3_condvar: return "T3_condvar";
    case TheoremKind::T3: return "T3";
    case TheoremKind::T5: return "T5";
    case TheoremKind::T6_item1: return "T6_item1";
    case TheoremKind::T6_item2: return "T6_item2";
    case TheoremKind::COR: return "COR";
    case TheoremKind::T7: return "T7";
    case TheoremKind::LEM1: return "LEM1";
    case TheoremKind::LEM2: return "LEM2";
    case TheoremKind::LEM3: return "LEM3";
  }
  return "?";
}

inline TheoremKind theorem_from_string(const std::string& s) {
  for (TheoremKind t : {TheoremKind::T1, TheoremKind::T2_condvar, TheoremKind::T2,
                        TheoremKind::T3_condvar, TheoremKind::T3, TheoremKind::T5,
                        TheoremKind::T6_item1, TheoremKind::T6_item2, TheoremKind::COR,
                        TheoremKind::T7, TheoremKind::LEM1, TheoremKind::LEM2, TheoremKind::LEM3})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown theorem '" + s + "'");
}

struct McConfig {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double confidence = 0.99;
};

enum class LhsMode { auto_oracle, mc_only, oracle_only };

// Extra knobs for the lemma scenarios.
struct LemmaSpec {
  // LEM2: g in {"zero", "two", "min2_inv"}; bound uses b and params.q
  std::string g = "min2_inv";
  double b = 1.0;
  // LEM3: Y in {"exponential", "pareto"}; coupling in {"exact", "ergodic"}
  std::string y = "exponential";
  double y_param = 1.0;   // rate or alpha
  double y_scale = 1.0;   // pareto scale
  std::string coupling = "exact";
  int k_max = 64;
  // LEM1
  double beta = 2.0;
  double delta = 0.25;
};

// One theorem-verification job: model + parameters + evaluation grids.
struct Scenario {
  std::string id;
  TheoremKind theorem = TheoremKind::T2;
  std::optional<MartingaleModel> model;
  std::optional<FieldModel> field;
  BoundParams params;
  std::vector<double> x_grid;
  std::vector<std::vector<std::int64_t>> n_grid;
  McConfig mc;
  double slack = 0.0;
  LhsMode lhs_mode = LhsMode::auto_oracle;
  LemmaSpec lemma;
};

inline bool theorem_uses_field(TheoremKind t) {
  return t == TheoremKind::T3 || t == TheoremKind::T3_condvar;
}
inline bool theorem_is_lemma(TheoremKind t) {
  return t == TheoremKind::LEM1 || t == TheoremKind::LEM2 || t == TheoremKind::LEM3;
}
inline bool theorem_is_largedev(TheoremKind t) {
  return t == TheoremKind::T5 || t == TheoremKind::T6_item1 || t == TheoremKind::T6_item2 ||
         t == TheoremKind::COR || t == TheoremKind::T7;
}

inline void validate(const Scenario& sc) {
  if (sc.id.empty()) throw std::invalid_argument("scenario: id must be nonempty");
  const std::string where = "scenario '" + sc.id + "': ";
  if (sc.x_grid.empty()) throw std::invalid_argument(where + "x_grid must be nonempty");
  for (double x : sc.x_grid)
    if (!(x > 0)) throw std::invalid_argument(where + "x_grid values must be > 0");
  if (!(sc.slack >= 0)) throw std::invalid_argument(where + "slack must be >= 0");
  if (sc.mc.trials == 0) throw std::invalid_argument(where + "mc.trials must be positive");
  if (!(sc.mc.confidence > 0 && sc.mc.confidence < 1))
    throw std::invalid_argument(where + "mc.confidence must lie in (0,1)");

  const TheoremKind t = sc.theorem;
  if (theorem_uses_field(t)) {
    if (!sc.field) throw std::invalid_argument(where + "field model required");
    sc.field->validate();
  } else if (!theorem_is_lemma(t) || t == TheoremKind::LEM1) {
    if (!sc.model) throw std::invalid_argument(where + "martingale model required");
    sc.model->validate();
  }

  const auto& pr = sc.params;
  switch (t) {
    case TheoremKind::T1:
      if (!(pr.q > 0)) throw std::invalid_argument(where + "T1 requires q > 0");
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid must be nonempty");
      break;
    case TheoremKind::T2:
    case TheoremKind::T2_condvar:
      if (!(pr.q > pr.p))
        throw std::invalid_argument(where + to_string(t) + std::string(" requires q > p (got q=") +
                                    std::to_string(pr.q) + ", p=" + std::to_string(pr.p) + ")");
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid must be nonempty");
      break;
    case TheoremKind::T3:
    case TheoremKind::T3_condvar: {
      if (!(pr.q > pr.p))
        throw std::invalid_argument(where + to_string(t) + std::string(" requires q > p (got q=") +
                                    std::to_string(pr.q) + ", p=" + std::to_string(pr.p) + ")");
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid must be nonempty");
      const int d = sc.field->d();
      for (const auto& nv : sc.n_grid)
        if (static_cast<int>(nv.size()) != d)
          throw std::invalid_argument(where + "n_grid entries must have d components");
      break;
    }
    case TheoremKind::T5:
      if (!(pr.p > 1 && pr.p < pr.r))
        throw std::invalid_argument(where + "T5 requires 1 < p < r");
      if (!(pr.q > pr.p)) throw std::invalid_argument(where + "T5 requires q > p");
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid (dyadic exponents) must be nonempty");
      break;
    case TheoremKind::T6_item1:
    case TheoremKind::T6_item2:
    case TheoremKind::COR:
    case TheoremKind::T7:
      if (!(pr.s > 2)) throw std::invalid_argument(where + to_string(t) + std::string(" requires s > 2"));
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid (dyadic exponents) must be nonempty");
      break;
    case TheoremKind::LEM1:
      if (!(sc.lemma.beta > 1) || !(sc.lemma.delta > 0) || !(sc.lemma.delta < sc.lemma.beta - 1))
        throw std::invalid_argument(where + "LEM1 requires beta > 1 and 0 < delta < beta - 1");
      if (sc.n_grid.empty()) throw std::invalid_argument(where + "n_grid must be nonempty");
      break;
    case TheoremKind::LEM2:
      if (!(pr.q > 0)) throw std::invalid_argument(where + "LEM2 requires q > 0");
      if (sc.lemma.g != "zero" && sc.lemma.g != "two" && sc.lemma.g != "min2_inv")
        throw std::invalid_argument(where + "LEM2 g must be zero|two|min2_inv");
      break;
    case TheoremKind::LEM3:
      if (sc.lemma.y != "exponential" && sc.lemma.y != "pareto")
        throw std::invalid_argument(where + "LEM3 y must be exponential|pareto");
      if (sc.lemma.coupling != "exact" && sc.lemma.coupling != "ergodic")
        throw std::invalid_argument(where + "LEM3 coupling must be exact|ergodic");
      if (sc.lemma.y == "pareto" && !(sc.lemma.y_param > 1))
        throw std::invalid_argument(where + "LEM3 pareto Y needs alpha > 1 for a finite mean");
      break;
  }
}

// ---- JSON (de)serialization of the config format ----

using nlohmann::json;

inline MartingaleModel martingale_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const double p = j.value("p", 2.0);
  MartingaleModel m;
  if (kind == "iid_sign") m = MartingaleModel::sign(p);
  else if (kind == "iid_pareto_sym")
    m = MartingaleModel::pareto_sym(j.at("alpha").get<double>(), j.value("scale", 1.0), p);
  else if (kind == "iid_uniform_sphere") m = MartingaleModel::uniform_sphere(j.value("dim", 2), p);
  else if (kind == "vol_modulated")
    m = MartingaleModel::vol_switch(j.at("lo").get<double>(), j.at("hi").get<double>(), p);
  else throw std::invalid_argument("unknown model kind '" + kind + "'");
  if (j.contains("space")) {
    const json& s = j["space"];
    const std::string nk = s.value("norm", "euclidean");
    NormKind k = nk == "euclidean" ? NormKind::euclidean
                 : nk == "sup"     ? NormKind::sup
                 : nk == "p_norm"  ? NormKind::p_norm
                                   : throw std::invalid_argument("unknown norm '" + nk + "'");
    m.space = SmoothSpaceSpec::with_certificate(s.value("dim", m.space.dim), k, s.value("rho", 2.0),
                                                s.value("r", 2.0), s.value("D", 1.0));
    m.validate();
  }
  return m;
}

inline FieldModel field_from_json(const json& j) {
  FieldModel f;
  f.p = j.value("p", 2.0);
  for (const auto& a : j.at("axes")) {
    if (a.is_string()) {
      const std::string s = a.get<std::string>();
      if (s == "sign") f.axes.push_back(AxisDesc{});
      else throw std::invalid_argument("unknown axis kind '" + s + "'");
    } else {
      AxisDesc d;
      const std::string s = a.at("kind").get<std::string>();
      if (s == "sign") d.kind = AxisKind::sign;
      else if (s == "pareto_sym") {
        d.kind = AxisKind::pareto_sym;
        d.alpha = a.at("alpha").get<double>();
        d.scale = a.value("scale", 1.0);
      } else throw std::invalid_argument("unknown axis kind '" + s + "'");
      f.axes.push_back(d);
    }
  }
  f.validate();
  return f;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.id = j.at("id").get<std::string>();
  sc.theorem = theorem_from_string(j.at("theorem").get<std::string>());
  if (j.contains("model")) {
    const json& m = j["model"];
    const std::string type = m.value("type", "martingale");
    if (type == "martingale") sc.model = martingale_from_json(m);
    else if (type == "field") sc.field = field_from_json(m);
    else throw std::invalid_argument("model type must be martingale|field");
  }
  if (j.contains("params")) {
    const json& p = j["params"];
    sc.params.p = p.value("p", sc.model ? sc.model->p : (sc.field ? sc.field->p : 2.0));
    sc.params.q = p.value("q", 0.0);
    sc.params.r = p.value("r", sc.model ? sc.model->space.r : 2.0);
    sc.params.D = p.value("D", sc.model ? sc.model->space.D : 1.0);
    sc.params.d = p.value("d", sc.field ? sc.field->d() : 1);
    sc.params.axis = p.value("axis", 1);
    sc.params.s = p.value("s", 0.0);
    if (p.contains("constants_mode"))
      sc.params.cmode = constants_mode_from_string(p["constants_mode"].get<std::string>());
    else
      sc.params.cmode = sc.params.p == 2.0 ? ConstantsMode::closed_form : ConstantsMode::solved_delta;
  } else if (sc.model) {
    sc.params.p = sc.model->p;
  }
  sc.x_grid = j.at("x_grid").get<std::vector<double>>();
  if (j.contains("n_grid")) {
    for (const auto& e : j["n_grid"]) {
      if (e.is_array()) sc.n_grid.push_back(e.get<std::vector<std::int64_t>>());
      else sc.n_grid.push_back({e.get<std::int64_t>()});
    }
  }
  if (j.contains("mc")) {
    sc.mc.trials = j["mc"].value("trials", sc.mc.trials);
    sc.mc.seed = j["mc"].value("seed", sc.mc.seed);
    sc.mc.confidence = j["mc"].value("confidence", sc.mc.confidence);
  }
  sc.slack = j.value("slack", 0.0);
  const std::string lm = j.value("lhs", "auto");
  sc.lhs_mode = lm == "auto"     ? LhsMode::auto_oracle
                : lm == "mc"     ? LhsMode::mc_only
                : lm == "oracle" ? LhsMode::oracle_only
                                 : throw std::invalid_argument("lhs must be auto|mc|oracle");
  if (j.contains("lemma")) {
    const json& l = j["lemma"];
    sc.lemma.g = l.value("g", sc.lemma.g);
    sc.lemma.b = l.value("b", sc.lemma.b);
    sc.lemma.y = l.value("y", sc.lemma.y);
    sc.lemma.y_param = l.value("y_param", sc.lemma.y_param);
    sc.lemma.y_scale = l.value("y_scale", sc.lemma.y_scale);
    sc.lemma.coupling = l.value("coupling", sc.lemma.coupling);
    sc.lemma.k_max = l.value("k_max", sc.lemma.k_max);
    sc.lemma.beta = l.value("beta", sc.lemma.beta);
    sc.lemma.delta = l.value("delta", sc.lemma.delta);
  }
  validate(sc);
  return sc;
}

inline json model_to_json(const MartingaleModel& m) {
  json j;
  j["type"] = "martingale";
  switch (m.kind) {
    case IncrementKind::iid_sign: j["kind"] = "iid_sign"; break;
    case IncrementKind::iid_pareto_sym:
      j["kind"] = "iid_pareto_sym";
      j["alpha"] = m.alpha;
      j["scale"] = m.scale;
      break;
    case IncrementKind::iid_uniform_sphere:
      j["kind"] = "iid_uniform_sphere";
      j["dim"] = m.space.dim;
      break;
    case IncrementKind::vol_modulated:
      j["kind"] = "vol_modulated";
      j["lo"] = m.vol.lo;
      j["hi"] = m.vol.hi;
      break;
  }
  j["p"] = m.p;
  j["space"] = {{"dim", m.space.dim},
                {"norm", m.space.norm_kind == NormKind::euclidean ? "euclidean"
                         : m.space.norm_kind == NormKind::sup    ? "sup"
                                                                 : "p_norm"},
                {"rho", m.space.norm_p},
                {"r", m.space.r},
                {"D", m.space.D}};
  return j;
}

inline json field_to_json(const FieldModel& f) {
  json j;
  j["type"] = "field";
  j["p"] = f.p;
  j["axes"] = json::array();
  for (const auto& a : f.axes) {
    if (a.kind == AxisKind::sign) j["axes"].push_back("sign");
    else j["axes"].push_back({{"kind", "pareto_sym"}, {"alpha", a.alpha}, {"scale", a.scale}});
  }
  return j;
}

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["id"] = sc.id;
  j["theorem"] = to_string(sc.theorem);
  if (sc.model) j["model"] = model_to_json(*sc.model);
  if (sc.field) j["model"] = field_to_json(*sc.field);
  j["params"] = {{"p", sc.params.p},       {"q", sc.params.q},   {"r", sc.params.r},
                 {"D", sc.params.D},       {"d", sc.params.d},   {"axis", sc.params.axis},
                 {"s", sc.params.s},       {"constants_mode", to_string(sc.params.cmode)}};
  j["x_grid"] = sc.x_grid;
  j["n_grid"] = json::array();
  for (const auto& n : sc.n_grid) {
    if (n.size() == 1) j["n_grid"].push_back(n[0]);
    else j["n_grid"].push_back(n);
  }
  j["mc"] = {{"trials", sc.mc.trials}, {"seed", sc.mc.seed}, {"confidence", sc.mc.confidence}};
  j["slack"] = sc.slack;
  j["lhs"] = sc.lhs_mode == LhsMode::auto_oracle ? "auto"
             : sc.lhs_mode == LhsMode::mc_only   ? "mc"
                                                 : "oracle";
  if (theorem_is_lemma(sc.theorem)) {
    j["lemma"] = {{"g", sc.lemma.g},           {"b", sc.lemma.b},
                  {"y", sc.lemma.y},           {"y_param", sc.lemma.y_param},
                  {"y_scale", sc.lemma.y_scale}, {"coupling", sc.lemma.coupling},
                  {"k_max", sc.lemma.k_max},   {"beta", sc.lemma.beta},
                  {"delta", sc.lemma.delta}};
  }
  return j;
}

struct RunConfig {
  std::vector<Scenario> scenarios;
};

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
    throw std::invalid_argument("config: nonempty 'scenarios' array required");
  std::vector<std::string> ids;
  for (const auto& js : j["scenarios"]) cfg.scenarios.push_back(scenario_from_json(js));
  for (const auto& sc : cfg.scenarios) {
    if (std::count_if(cfg.scenarios.begin(), cfg.scenarios.end(),
                      [&](const Scenario& o) { return o.id == sc.id; }) > 1)
      throw std::invalid_argument("config: duplicate scenario id '" + sc.id + "'");
  }
  return cfg;
}

}  // namespace mdev
