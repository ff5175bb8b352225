// mdev: config-driven verification of martingale deviation bounds.
//
// Subcommands: verify (scenario batteries from JSON configs), bound (one RHS
// evaluation), simulate (paths / fields to CSV), decay (dyadic decay tables
// for the large-deviation scaling checks). Exit codes: 0 all pass, 1 hard
// failure, 2 input/resource error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mdev/report_io.hpp"
#include "mdev/scenario.hpp"
#include "mdev/verify.hpp"

namespace fs = std::filesystem;
using namespace mdev;

namespace {

TailFunction parse_tail(const std::string& spec) {
  std::istringstream in(spec);
  std::string kind;
  std::getline(in, kind, ':');
  std::vector<double> args;
  std::string tok;
  while (std::getline(in, tok, ':')) args.push_back(std::stod(tok));
  if (kind == "sign") return TailFunction::step(1.0);
  if (kind == "zero") return TailFunction::zero();
  if (kind == "one") return TailFunction::one();
  if (kind == "step") return TailFunction::step(args.at(0));
  if (kind == "pareto") return TailFunction::pareto(args.at(0), args.size() > 1 ? args[1] : 1.0);
  if (kind == "exp") return TailFunction::exponential(args.at(0));
  throw std::invalid_argument("unknown tail '" + spec + "' (sign|zero|one|step:a|pareto:alpha[:scale]|exp:rate)");
}

MartingaleModel parse_model(const std::string& spec, double p) {
  std::istringstream in(spec);
  std::string kind;
  std::getline(in, kind, ':');
  std::string rest;
  std::getline(in, rest);
  if (kind == "sign") return MartingaleModel::sign(p);
  if (kind == "pareto") {
    std::istringstream args(rest);
    std::string a, s;
    std::getline(args, a, ',');
    const double alpha = std::stod(a);
    const double scale = std::getline(args, s, ',') ? std::stod(s) : 1.0;
    return MartingaleModel::pareto_sym(alpha, scale, p);
  }
  if (kind == "sphere") return MartingaleModel::uniform_sphere(std::stoi(rest), p);
  if (kind == "volswitch") {
    std::istringstream args(rest);
    std::string lo, hi;
    std::getline(args, lo, ',');
    std::getline(args, hi, ',');
    return MartingaleModel::vol_switch(std::stod(lo), std::stod(hi), p);
  }
  throw std::invalid_argument("unknown model '" + spec + "' (sign|pareto:a[,scale]|sphere:dim|volswitch:lo,hi)");
}

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

struct VerifyOpts {
  std::string config, out_dir = ".", format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
};

int cmd_verify(const VerifyOpts& opt) {
  std::ifstream in(opt.config);
  if (!in) {
    std::cerr << "error: cannot open config '" << opt.config << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  RunConfig cfg;
  try {
    const auto j = nlohmann::json::parse(text);
    cfg = run_config_from_json(j);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << opt.config << ":" << line_of_offset(text, e.byte)
              << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << opt.config << ": " << e.what() << "\n";
    return 2;
  }

  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (!fs::is_directory(opt.out_dir)) {
    std::cerr << "error: output directory '" << opt.out_dir << "' is not writable\n";
    return 2;
  }

  int workers = opt.workers > 0 ? opt.workers : default_workers();
  int hard = 0;
  for (auto sc : cfg.scenarios) {
    if (opt.seed_set) sc.mc.seed = opt.seed;
    BoundReport rep;
    try {
      rep = run_scenario(sc, workers);
    } catch (const ResourceError& e) {
      std::cerr << "error: scenario '" << sc.id << "': " << e.what() << "\n";
      return 2;
    }
    hard += rep.hard_failures;
    if (opt.format == "csv" || opt.format == "both")
      write_file((fs::path(opt.out_dir) / (sc.id + ".csv")).string(), report_csv(rep));
    if (opt.format == "json" || opt.format == "both")
      write_file((fs::path(opt.out_dir) / (sc.id + ".json")).string(), report_json(rep).dump(2) + "\n");
    std::printf("%-24s %-10s cells=%zu worst_ratio=%.3g %s\n", sc.id.c_str(),
                to_string(rep.theorem), rep.cells.size(), rep.worst_ratio,
                rep.hard_failures ? "FAIL" : (rep.all_pass ? "pass" : "pass(mc_noise)"));
  }
  return hard ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"martingale deviation bounds: simulate, evaluate, verify"};
  app.require_subcommand(1);

  // ---- verify ----
  VerifyOpts vopt;
  auto* verify = app.add_subcommand(
      "verify", "run scenario batteries from a JSON config and write CSV/JSON reports");
  verify->add_option("--config", vopt.config, "scenario config path")->required();
  verify->add_option("--out", vopt.out_dir, "output directory");
  verify->add_option("--format", vopt.format, "csv|json|both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  verify->add_option("--seed", vopt.seed, "override every scenario seed")
      ->each([&](const std::string&) { vopt.seed_set = true; });
  verify->add_option("--workers", vopt.workers, "worker threads (default MDL_WORKERS or hardware)");

  // ---- bound ----
  auto* bound = app.add_subcommand(
      "bound", "evaluate one deviation-bound RHS (T1|T2|T2_condvar|T3|T3_condvar|T5|T6_item1|COR|T7)");
  std::string b_theorem = "T2", b_tail = "sign", b_cond_tail;
  double b_p = 2.0, b_q = 0.0, b_x = 1.0, b_D = 1.0, b_s = 0.0;
  std::vector<std::int64_t> b_n;
  int b_d = 1, b_axis = 1;
  std::string b_cmode = "auto";
  bound->add_option("--theorem", b_theorem, "bound to evaluate")->required();
  bound->add_option("--tail", b_tail, "increment tail, e.g. pareto:1.8 or step:1");
  bound->add_option("--cond-tail", b_cond_tail, "conditional-moment tail (condvar bounds)");
  bound->add_option("--p", b_p, "moment order p");
  bound->add_option("--q", b_q, "weight exponent q");
  bound->add_option("--x", b_x, "deviation level x");
  bound->add_option("--n", b_n, "n (scalar, d-vector, or dyadic exponent for T5)");
  bound->add_option("--d", b_d, "field dimension");
  bound->add_option("--axis", b_axis, "conditioning axis j for T3_condvar");
  bound->add_option("--D", b_D, "smoothness constant D");
  bound->add_option("--s", b_s, "weak-norm exponent s (T6/COR/T7)");
  bound->add_option("--constants", b_cmode, "closed_form|solved_delta|auto");

  // ---- simulate ----
  auto* simulate = app.add_subcommand(
      "simulate", "sample increment paths (or a product field) and print CSV");
  std::string s_model = "sign", s_field;
  std::int64_t s_n = 16;
  int s_paths = 1;
  std::uint64_t s_seed = 1;
  double s_p = 2.0;
  simulate->add_option("--model", s_model, "sign|pareto:a[,scale]|sphere:dim|volswitch:lo,hi");
  simulate->add_option("--n", s_n, "path length");
  simulate->add_option("--paths", s_paths, "number of independent paths");
  simulate->add_option("--seed", s_seed, "stream seed");
  simulate->add_option("--p", s_p, "declared moment order");
  simulate->add_option("--field", s_field, "product sign field box, e.g. 8x8 (overrides --model)");

  // ---- decay ----
  auto* decay = app.add_subcommand(
      "decay", "dyadic decay table for the normalized maxima (T5 or T6_item2 scaling)");
  std::string d_theorem = "T5", d_model = "pareto:1.8", d_out;
  double d_p = 1.5, d_s = 3.0, d_x = 1.0;
  int d_from = 4, d_to = 12, d_workers = 0;
  std::uint64_t d_trials = 1000000, d_seed = 1;
  decay->add_option("--theorem", d_theorem, "T5 (scale 2^{n(p-1)}) or T6_item2 (scale 2^{ns/2})");
  decay->add_option("--model", d_model, "increment model");
  decay->add_option("--p", d_p, "moment order for the T5 scaling");
  decay->add_option("--s", d_s, "weak-norm exponent for the T6 scaling");
  decay->add_option("--x", d_x, "deviation level");
  decay->add_option("--n-from", d_from, "first dyadic exponent");
  decay->add_option("--n-to", d_to, "last dyadic exponent");
  decay->add_option("--trials", d_trials, "Monte Carlo trials");
  decay->add_option("--seed", d_seed, "stream seed");
  decay->add_option("--workers", d_workers, "worker threads");
  decay->add_option("--out", d_out, "write the table to this CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return cmd_verify(vopt);

    if (*bound) {
      const TheoremKind t = theorem_from_string(b_theorem);
      const TailFunction tail = parse_tail(b_tail);
      const TailFunction cond = b_cond_tail.empty() ? TailFunction::step(1.0) : parse_tail(b_cond_tail);
      BoundParams pr;
      pr.p = b_p;
      pr.q = b_q;
      pr.x = b_x;
      pr.n = b_n.empty() ? std::vector<std::int64_t>{1} : b_n;
      pr.D = b_D;
      pr.d = b_d;
      pr.axis = b_axis;
      pr.s = b_s;
      pr.cmode = b_cmode == "auto"
                     ? (b_p == 2.0 ? ConstantsMode::closed_form : ConstantsMode::solved_delta)
                     : constants_mode_from_string(b_cmode);
      BoundValue v;
      switch (t) {
        case TheoremKind::T1:
          v = theorem1_rhs(tail, cond, pr);
          break;
        case TheoremKind::T2:
          v = theorem2_rhs(tail, pr);
          break;
        case TheoremKind::T2_condvar:
          v = theorem2_rhs_condvar(tail, cond, pr);
          break;
        case TheoremKind::T3:
          v = theorem3_rhs(tail, pr);
          break;
        case TheoremKind::T3_condvar:
          v = theorem3_rhs_condvar(tail, cond, pr);
          break;
        case TheoremKind::T5: {
          const auto b5 = largedev_thm5(tail, pr.p, pr.q, pr.x, static_cast<int>(pr.n.at(0)));
          std::printf("value=%s err=%s trunc_moment=%s implied_K=%s\n", fmt17(b5.value).c_str(),
                      fmt17(b5.err).c_str(), fmt17(b5.trunc_moment).c_str(),
                      fmt17(b5.implied_K).c_str());
          return 0;
        }
        case TheoremKind::T6_item1:
          v = largedev_thm6_weak(tail, cond, pr.s, pr.x, pr.D);
          break;
        case TheoremKind::COR:
          v = largedev_cor_weak(tail, pr.s, pr.x, pr.D);
          break;
        case TheoremKind::T7:
          v = largedev_thm7_series(tail, cond, pr.s, pr.x, pr.D);
          break;
        default:
          std::cerr << "error: --theorem " << b_theorem << " has no direct bound form\n";
          return 2;
      }
      std::printf("value=%s err=%s\n", fmt17(v.value).c_str(), fmt17(v.err).c_str());
      return 0;
    }

    if (*simulate) {
      if (!s_field.empty()) {
        std::vector<std::int64_t> dims;
        std::istringstream in(s_field);
        std::string tok;
        while (std::getline(in, tok, 'x')) dims.push_back(std::stoll(tok));
        const auto field = FieldModel::product_sign(static_cast<int>(dims.size()), s_p);
        std::vector<double> buf;
        for (int path = 0; path < s_paths; ++path) {
          RngStream rng(s_seed, static_cast<std::uint64_t>(path));
          sample_field(field, dims, rng, buf);
          for (std::size_t i = 0; i < buf.size(); ++i)
            std::printf("%s%s", fmt17(buf[i]).c_str(), i + 1 < buf.size() ? "," : "\n");
        }
        return 0;
      }
      const auto model = parse_model(s_model, s_p);
      std::vector<double> path;
      for (int p = 0; p < s_paths; ++p) {
        RngStream rng(s_seed, static_cast<std::uint64_t>(p));
        sample_path(model, s_n, rng, path);
        for (std::size_t i = 0; i < path.size(); ++i)
          std::printf("%s%s", fmt17(path[i]).c_str(), i + 1 < path.size() ? "," : "\n");
      }
      return 0;
    }

    if (*decay) {
      DecaySpec ds;
      ds.model = parse_model(d_model, d_theorem == "T5" ? std::min(d_p, 2.0) : 2.0);
      ds.theorem = theorem_from_string(d_theorem);
      if (ds.theorem != TheoremKind::T5 && ds.theorem != TheoremKind::T6_item2) {
        std::cerr << "error: decay expects --theorem T5 or T6_item2\n";
        return 2;
      }
      ds.p = d_p;
      ds.s = d_s;
      ds.x = d_x;
      ds.k_from = d_from;
      ds.k_to = d_to;
      ds.mc.trials = d_trials;
      ds.mc.seed = d_seed;
      const auto rep = check_decay(ds, d_workers);
      const std::string csv = decay_csv(rep);
      if (d_out.empty()) std::fputs(csv.c_str(), stdout);
      else write_file(d_out, csv);
      std::fprintf(stderr, "log_slope_top_half=%s envelope_monotone=%d below_resolution=%d\n",
                   fmt17(rep.log_slope_top_half).c_str(), rep.envelope_monotone ? 1 : 0,
                   rep.all_below_resolution ? 1 : 0);
      return rep.pass() ? 0 : 1;
    }
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
