#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mdev/verify.hpp"

namespace mdev {

// doubles serialized with 17 significant digits so reruns round-trip exactly
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string n_label(const std::vector<std::int64_t>& n) {
  std::string s;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(n[i]);
  }
  return s;
}

inline std::string report_csv(const BoundReport& rep) {
  std::ostringstream os;
  os << "scenario_id,theorem,n,x,lhs_point,lhs_ci_lo,lhs_ci_hi,rhs,rhs_err,ratio,status\n";
  for (const auto& c : rep.cells) {
    os << rep.scenario_id << ',' << to_string(rep.theorem) << ',' << n_label(c.n) << ','
       << fmt17(c.x) << ',' << fmt17(c.lhs_scale * c.lhs.point) << ','
       << fmt17(c.lhs_scale * c.lhs.ci_low) << ',' << fmt17(c.lhs_scale * c.lhs.ci_high) << ','
       << fmt17(c.rhs) << ',' << fmt17(c.rhs_err) << ',' << fmt17(c.ratio) << ','
       << to_string(c.status) << '\n';
  }
  return os.str();
}

inline nlohmann::json report_json(const BoundReport& rep) {
  nlohmann::json j;
  j["scenario_id"] = rep.scenario_id;
  j["theorem"] = to_string(rep.theorem);
  j["all_pass"] = rep.all_pass;
  j["hard_failures"] = rep.hard_failures;
  j["worst_ratio"] = rep.worst_ratio;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    nlohmann::json cj;
    cj["n"] = c.n;
    cj["x"] = c.x;
    cj["lhs_point"] = c.lhs_scale * c.lhs.point;
    cj["lhs_ci"] = {c.lhs_scale * c.lhs.ci_low, c.lhs_scale * c.lhs.ci_high};
    cj["lhs_exact"] = c.lhs.exact;
    cj["rhs"] = c.rhs;
    cj["rhs_err"] = c.rhs_err;
    cj["ratio"] = c.ratio;
    cj["status"] = to_string(c.status);
    if (!c.note.empty()) cj["note"] = c.note;
    j["cells"].push_back(cj);
  }
  if (rep.decay) {
    nlohmann::json dj;
    dj["log_slope_top_half"] = rep.decay->log_slope_top_half;
    dj["envelope_monotone"] = rep.decay->envelope_monotone;
    dj["all_below_resolution"] = rep.decay->all_below_resolution;
    dj["rows"] = nlohmann::json::array();
    for (const auto& r : rep.decay->rows) {
      dj["rows"].push_back({{"k", r.k},
                            {"count", r.count},
                            {"a", r.a},
                            {"a_ci_lo", r.scale * r.prob.ci_low},
                            {"a_ci_hi", r.a_hi},
                            {"below_resolution", r.below_resolution}});
    }
    j["decay"] = dj;
  }
  return j;
}

// decay tables ready for plotting: one row per dyadic exponent
inline std::string decay_csv(const DecayReport& rep) {
  std::ostringstream os;
  os << "n,a_n,ci_lo,ci_hi\n";
  for (const auto& r : rep.rows)
    os << r.k << ',' << fmt17(r.a) << ',' << fmt17(r.scale * r.prob.ci_low) << ','
       << fmt17(r.a_hi) << '\n';
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

}  // namespace mdev
