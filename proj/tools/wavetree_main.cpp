// wavetree: command-line front end for the thresholding toolkit.
// Subcommands cover denoising, simulation, signal construction, functional
// scans and the Monte Carlo risk experiments. All file outputs are written
// atomically and are byte-reproducible for a fixed seed.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavetree/wavetree.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavetree;

namespace {

std::string g_config_unused;  // --config is consumed before CLI11 runs

// Declared on every subcommand so it appears in help; the value itself is
// handled by expand_config_args below.
void declare_config_option(CLI::App* cmd) {
  cmd->add_option("--config", g_config_unused,
                  "flat key=value config file (# comments); explicit flags "
                  "take precedence");
}

std::string strip_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Pulls --config out of the raw arguments and splices the file's key=value
// pairs in as ordinary long options. A key already given on the command line
// is skipped, so explicit flags override the file; the output-directory
// environment override sits between the two.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + config_path);
  }
  const auto given = [&args](const std::string& key) {
    const std::string full = "--" + key;
    for (const auto& a : args) {
      if (a == full || a.rfind(full + "=", 0) == 0) return true;
    }
    return false;
  };
  std::string line;
  while (std::getline(in, line)) {
    line = strip_ws(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line is not key=value: " + line);
    }
    const std::string key = strip_ws(line.substr(0, eq));
    const std::string value = strip_ws(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line has an empty key: " + line);
    }
    if (given(key)) continue;
    if (key == "out" && std::getenv("WAVETREE_OUT") != nullptr) continue;
    args.push_back("--" + key + "=" + value);  // single token: works for flags
  }
  return args;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir(out);
  if (!dir.empty()) fs::create_directories(dir);
  return dir;
}

std::vector<double> read_samples_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open samples file: " + path.string());
  }
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof()) {
    throw std::runtime_error("samples file has non-numeric content: " +
                             path.string());
  }
  if (out.empty()) {
    throw std::runtime_error("samples file is empty: " + path.string());
  }
  return out;
}

void write_json_file(const fs::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

json fit_to_json(const RiskCurve& curve) {
  try {
    const RateFit fit = rate_fit(curve);
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"points_used", fit.points_used},
                {"points_excluded", fit.points_excluded}};
  } catch (const std::invalid_argument&) {
    return json();  // too few usable points: fit is null
  }
}

// threshold configuration shared by denoise and simulate
struct ThresholdOpts {
  double epsilon = 0.0;
  double m = 0.0;
  double lambda = 0.0;
  double eta = 1.0;
  bool has_epsilon = false;
  bool has_m = false;
  bool has_lambda = false;

  void attach(CLI::App* cmd, bool allow_lambda) {
    cmd->add_option("--epsilon", epsilon, "noise level in (0, 1/2)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--m", m,
                    "threshold constant (default: tree-rule calibration "
                    "4*sqrt(3*eta))")
        ->check(CLI::PositiveNumber);
    if (allow_lambda) {
      cmd->add_option("--lambda", lambda,
                      "threshold value, bypassing epsilon and m")
          ->check(CLI::PositiveNumber);
    }
    cmd->add_option("--eta", eta, "scope depth exponent, >= 1 (default 1)");
  }

  void finalize(const CLI::App* cmd) {
    has_epsilon = cmd->count("--epsilon") > 0;
    has_m = cmd->count("--m") > 0;
    has_lambda = cmd->get_option_no_throw("--lambda") != nullptr &&
                 cmd->count("--lambda") > 0;
  }

  NoiseConfig resolve() const {
    if (has_lambda) {
      if (has_epsilon || has_m) {
        throw std::runtime_error(
            "give either --lambda or --epsilon/--m, not both");
      }
      return NoiseConfig::from_lambda(lambda, eta);
    }
    if (!has_epsilon) {
      throw std::runtime_error("need --epsilon (or --lambda) to set the "
                               "threshold");
    }
    const double mm = has_m ? m : default_m_tree(eta);
    return NoiseConfig::from_epsilon(epsilon, mm, eta);
  }
};

std::string risk_curve_csv(const RiskCurve& curve) {
  std::string out = "epsilon,lambda,risk,stderr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.epsilon);
    out += ',';
    out += format_double(p.lambda);
    out += ',';
    out += format_double(p.risk);
    out += ',';
    out += format_double(p.standard_error);
    out += '\n';
  }
  return out;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out =
      "epsilon,lambda_tree,lambda_hard,risk_tree,stderr_tree,risk_hard,"
      "stderr_hard,ratio\n";
  for (const auto& r : rows) {
    out += format_double(r.epsilon);
    out += ',';
    out += format_double(r.lambda_tree);
    out += ',';
    out += format_double(r.lambda_hard);
    out += ',';
    out += format_double(r.risk_tree);
    out += ',';
    out += format_double(r.se_tree);
    out += ',';
    out += format_double(r.risk_hard);
    out += ',';
    out += format_double(r.se_hard);
    out += ',';
    out += format_double(r.ratio);
    out += '\n';
  }
  return out;
}

std::string embeddings_csv(const std::vector<EmbeddingRow>& rows) {
  std::string out =
      "level,stat_divergent,stat_bounded,growth_divergent,growth_bounded\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(r.max_level);
    out += ',';
    out += format_double(r.stat_a);
    out += ',';
    out += format_double(r.stat_b);
    out += ',';
    if (i > 0) out += format_double(r.growth_a);
    out += ',';
    if (i > 0) out += format_double(r.growth_b);
    out += '\n';
  }
  return out;
}

std::vector<double> default_epsilons() {
  std::vector<double> eps;
  for (int i = 4; i <= 9; ++i) eps.push_back(std::exp2(-i));
  return eps;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wavetree: wavelet thresholding with tree-structured coefficient "
      "selection"};
  app.name("wavetree");
  app.require_subcommand(1);

  // ---- denoise -----------------------------------------------------------
  auto* denoise = app.add_subcommand(
      "denoise", "threshold a coefficient field or a raw sample file");
  declare_config_option(denoise);
  std::string dn_in, dn_samples, dn_basis = "haar", dn_rule = "tree",
              dn_out = ".";
  ThresholdOpts dn_thr;
  denoise->add_option("--in", dn_in, "coefficient CSV input");
  denoise->add_option("--samples", dn_samples,
                      "raw sample file (power-of-two count, whitespace "
                      "separated); transformed with --basis");
  denoise->add_option("--basis", dn_basis,
                      "wavelet basis for --samples: haar or dbN (default "
                      "haar)");
  denoise->add_option("--rule", dn_rule, "hard or tree (default tree)");
  dn_thr.attach(denoise, /*allow_lambda=*/true);
  denoise->add_option("--out", dn_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  denoise->callback([&]() {
    dn_thr.finalize(denoise);
    if (dn_in.empty() == dn_samples.empty()) {
      throw std::runtime_error("denoise: give exactly one of --in/--samples");
    }
    const Rule rule = rule_from_name(dn_rule);
    NoiseConfig cfg = dn_thr.resolve();
    if (!dn_thr.has_m && dn_thr.has_epsilon && rule == Rule::hard) {
      cfg = NoiseConfig::from_epsilon(dn_thr.epsilon,
                                      default_m_hard(dn_thr.eta), dn_thr.eta);
    }
    CoefficientField y =
        dn_in.empty() ? analyze(read_samples_file(dn_samples),
                                WaveletBasis::from_name(dn_basis))
                      : read_field_csv(dn_in);
    if (cfg.degenerate()) {
      std::cerr << "warning: threshold " << format_double(cfg.threshold())
                << " >= 1, keeping only the scaling coefficient\n";
    }
    if (y.max_level() < cfg.cutoff_level()) {
      // zero-extension: absent fine levels are treated as zero, which
      // changes neither the kept set nor the estimate on present levels
      y = y.padded(cfg.cutoff_level());
    }
    const EstimateResult r = run_rule(rule, y, cfg);
    const fs::path dir = ensure_out_dir(dn_out);
    write_field_csv(dir / "estimate.csv", r.estimate);
    write_mask_csv(dir / "mask.csv", r.mask);
  });

  // ---- simulate ----------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "draw one noisy observation of a truth field");
  declare_config_option(simulate);
  std::string sim_truth, sim_out = ".";
  ThresholdOpts sim_thr;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--truth", sim_truth, "truth coefficient CSV")
      ->required();
  sim_thr.attach(simulate, /*allow_lambda=*/false);
  simulate->add_option("--seed", sim_seed, "replicate seed (default 0)");
  simulate->add_option("--out", sim_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  simulate->callback([&]() {
    sim_thr.finalize(simulate);
    if (!sim_thr.has_epsilon) {
      throw std::runtime_error("simulate: --epsilon is required");
    }
    const NoiseConfig cfg = sim_thr.resolve();
    const CoefficientField truth = read_field_csv(sim_truth);
    auto rng = replicate_rng(sim_seed, 0);
    const CoefficientField y = observe(truth, cfg, rng);
    const fs::path dir = ensure_out_dir(sim_out);
    write_field_csv(dir / "observation.csv", y);
  });

  // ---- spaces ------------------------------------------------------------
  auto* spaces = app.add_subcommand(
      "spaces", "scan a functional-space statistic of a coefficient field");
  declare_config_option(spaces);
  std::string sp_in, sp_stat = "besov", sp_out = ".";
  double sp_s = 0.5, sp_r = 1.0, sp_u = 0.5, sp_eta = 1.0;
  std::vector<double> sp_grid;
  spaces->add_option("--in", sp_in, "coefficient CSV input")->required();
  spaces->add_option("--stat", sp_stat,
                     "besov | weak | treeweak | hybrid | count");
  spaces->add_option("--s", sp_s, "smoothness exponent (besov, default 0.5)");
  spaces->add_option("--r", sp_r, "sparsity exponent in (0,2) (weak/treeweak, "
                     "default 1)");
  spaces->add_option("--u", sp_u, "tempered exponent (hybrid, default 0.5)");
  spaces->add_option("--eta", sp_eta, "scope depth exponent (default 1)");
  spaces
      ->add_option("--lambda-grid", sp_grid,
                   "explicit ascending threshold grid (default: geometric "
                   "60-point grid from 0.5 down)")
      ->delimiter(',');
  spaces->add_option("--out", sp_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  spaces->callback([&]() {
    const CoefficientField f = read_field_csv(sp_in);
    const std::vector<double> grid =
        sp_grid.empty() ? geometric_lambda_grid() : sp_grid;
    std::string csv;
    if (sp_stat == "besov") {
      const SpaceStatistic st = besov_stat(f, sp_s);
      csv = series_to_csv("J", "value", st.grid, st.values);
    } else if (sp_stat == "weak") {
      const SpaceStatistic st = weak_besov_stat(f, sp_r, grid);
      csv = series_to_csv("lambda", "value", st.grid, st.values);
    } else if (sp_stat == "treeweak") {
      const SpaceStatistic st = tree_weak_besov_stat(f, sp_r, sp_eta, grid);
      csv = series_to_csv("lambda", "value", st.grid, st.values);
    } else if (sp_stat == "hybrid") {
      const SpaceStatistic st = hybrid_besov_stat(f, sp_u);
      csv = series_to_csv("J", "value", st.grid, st.values);
    } else if (sp_stat == "count") {
      csv = "lambda,count\n";
      for (double lam : grid) {
        csv += format_double(lam);
        csv += ',';
        csv += std::to_string(sparsity_count(f, lam, sp_eta));
        csv += '\n';
      }
    } else {
      throw std::runtime_error("spaces: unknown --stat '" + sp_stat + "'");
    }
    const fs::path dir = ensure_out_dir(sp_out);
    write_file_atomic(dir / "spaces.csv", csv);
  });

  // ---- hfun --------------------------------------------------------------
  auto* hfun = app.add_subcommand(
      "hfun", "construct a structured sparse coefficient field");
  declare_config_option(hfun);
  HFunctionParams hp;
  hp.m = 1;
  hp.alpha = 0.25;
  hp.alpha1 = 1.0;
  hp.alpha2 = 0.25;
  hp.max_level = 10;
  std::string hf_out = ".";
  hfun->add_option("--m", hp.m, "population growth factor (default 1)");
  hfun->add_option("--alpha", hp.alpha,
                   "population growth exponent in (0,1] (default 0.25)");
  hfun->add_option("--alpha1", hp.alpha1,
                   "even-level magnitude exponent (default 1)");
  hfun->add_option("--alpha2", hp.alpha2,
                   "odd-level magnitude exponent (default 0.25)");
  hfun->add_option("--levels", hp.max_level, "number of detail levels "
                   "(default 10)");
  hfun->add_option("--out", hf_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  hfun->callback([&]() {
    const CoefficientField f = make_h_function(hp);
    const fs::path dir = ensure_out_dir(hf_out);
    write_field_csv(dir / "hfun.csv", f);
  });

  // ---- risk-curve --------------------------------------------------------
  auto* riskc = app.add_subcommand(
      "risk-curve", "Monte Carlo risk across a noise-level grid");
  declare_config_option(riskc);
  std::string rc_truth, rc_rule = "tree", rc_out = ".";
  std::vector<double> rc_eps;
  double rc_m = 0.0, rc_eta = 1.0;
  bool rc_has_m = false;
  int rc_reps = 200;
  std::uint64_t rc_seed = 0;
  riskc->add_option("--truth", rc_truth, "truth coefficient CSV")->required();
  riskc->add_option("--rule", rc_rule, "hard or tree (default tree)");
  riskc
      ->add_option("--epsilons", rc_eps,
                   "noise level grid (default 2^-4 .. 2^-9)")
      ->delimiter(',');
  riskc->add_option("--m", rc_m,
                    "threshold constant (default: the rule's calibration)");
  riskc->add_option("--eta", rc_eta, "scope depth exponent (default 1)");
  riskc->add_option("--replicates", rc_reps, "replicates per grid point "
                    "(default 200)");
  riskc->add_option("--seed", rc_seed, "base seed (default 0)");
  riskc->add_option("--out", rc_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  riskc->callback([&]() {
    rc_has_m = riskc->count("--m") > 0;
    const Rule rule = rule_from_name(rc_rule);
    const double m = rc_has_m ? rc_m
                     : rule == Rule::tree ? default_m_tree(rc_eta)
                                          : default_m_hard(rc_eta);
    const CoefficientField truth = read_field_csv(rc_truth);
    const std::vector<double> eps =
        rc_eps.empty() ? default_epsilons() : rc_eps;
    const RiskCurve curve =
        risk_curve(truth, rule, eps, m, rc_eta, rc_reps, rc_seed);
    json summary{{"rule", rc_rule},
                 {"m", m},
                 {"eta", rc_eta},
                 {"replicates", rc_reps},
                 {"seed", rc_seed},
                 {"fit", fit_to_json(curve)}};
    const fs::path dir = ensure_out_dir(rc_out);
    write_file_atomic(dir / "risk_curve.csv", risk_curve_csv(curve));
    write_json_file(dir / "risk_summary.json", summary);
  });

  // ---- compare -----------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "paired Monte Carlo comparison of the two rules");
  declare_config_option(compare);
  std::string cp_truth, cp_out = ".";
  std::vector<double> cp_eps;
  double cp_m = 0.0, cp_m_tree = 0.0, cp_m_hard = 0.0, cp_eta = 1.0;
  bool cp_matched = false;
  int cp_reps = 200;
  std::uint64_t cp_seed = 0;
  compare->add_option("--truth", cp_truth, "truth coefficient CSV")
      ->required();
  compare
      ->add_option("--epsilons", cp_eps,
                   "noise level grid (default 2^-4 .. 2^-9)")
      ->delimiter(',');
  compare->add_option("--m", cp_m,
                      "threshold constant for both rules (matched)");
  compare->add_option("--m-tree", cp_m_tree,
                      "tree-rule constant (default 4*sqrt(3*eta))");
  auto* m_hard_opt =
      compare->add_option("--m-hard", cp_m_hard,
                          "hard-rule constant (default 4*sqrt(2*eta))");
  compare
      ->add_flag("--matched-m", cp_matched,
                 "give both rules the tree calibration 4*sqrt(3*eta)")
      ->excludes(m_hard_opt);
  compare->add_option("--eta", cp_eta, "scope depth exponent (default 1)");
  compare->add_option("--replicates", cp_reps, "replicates per grid point "
                      "(default 200)");
  compare->add_option("--seed", cp_seed, "base seed (default 0)");
  compare->add_option("--out", cp_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  compare->callback([&]() {
    const bool has_m = compare->count("--m") > 0;
    const double m_tree = compare->count("--m-tree") > 0 ? cp_m_tree
                          : has_m ? cp_m
                                  : default_m_tree(cp_eta);
    const double m_hard = compare->count("--m-hard") > 0 ? cp_m_hard
                          : has_m      ? cp_m
                          : cp_matched ? default_m_tree(cp_eta)
                                       : default_m_hard(cp_eta);
    const CoefficientField truth = read_field_csv(cp_truth);
    const std::vector<double> eps =
        cp_eps.empty() ? default_epsilons() : cp_eps;
    const auto rows =
        compare_rules(truth, eps, m_tree, m_hard, cp_eta, cp_reps, cp_seed);

    RiskCurve tree_curve, hard_curve;
    double max_ratio = 0.0;
    std::int64_t violations = 0;
    for (const auto& r : rows) {
      tree_curve.points.push_back(
          {r.epsilon, r.lambda_tree, r.j_lambda_tree, r.risk_tree, r.se_tree,
           0.0, 0.0});
      hard_curve.points.push_back(
          {r.epsilon, r.lambda_hard, r.j_lambda_hard, r.risk_hard, r.se_hard,
           0.0, 0.0});
      max_ratio = std::max(max_ratio, r.ratio);
      violations += r.inclusion_violations;
    }
    json summary{{"m_tree", m_tree},
                 {"m_hard", m_hard},
                 {"matched", m_tree == m_hard},
                 {"eta", cp_eta},
                 {"replicates", cp_reps},
                 {"seed", cp_seed},
                 {"max_ratio", max_ratio},
                 {"inclusion_violations", violations},
                 {"fit_tree", fit_to_json(tree_curve)},
                 {"fit_hard", fit_to_json(hard_curve)}};
    const fs::path dir = ensure_out_dir(cp_out);
    write_file_atomic(dir / "compare.csv", compare_csv(rows));
    write_json_file(dir / "compare_summary.json", summary);
  });

  // ---- embeddings --------------------------------------------------------
  auto* embed = app.add_subcommand(
      "embeddings", "separation report for the structured witness signals");
  declare_config_option(embed);
  std::string em_kind = "weak-tree", em_out = ".";
  double em_s = 0.5, em_eta = 2.0, em_eta1 = 1.0, em_eta2 = 2.0;
  std::vector<int> em_levels;
  embed->add_option("--kind", em_kind,
                    "weak-tree or besov-scales (default weak-tree)");
  embed->add_option("--s", em_s, "smoothness parameter in (0,1) (default "
                    "0.5)");
  embed->add_option("--eta", em_eta,
                    "scope exponent for weak-tree, > 1 (default 2)");
  embed->add_option("--eta1", em_eta1,
                    "smaller scope exponent for besov-scales (default 1)");
  embed->add_option("--eta2", em_eta2,
                    "larger scope exponent for besov-scales (default 2)");
  embed
      ->add_option("--levels", em_levels,
                   "ascending truncation depths (default 8..16)")
      ->delimiter(',');
  embed->add_option("--out", em_out, "output directory (default .)")
      ->envname("WAVETREE_OUT");
  embed->callback([&]() {
    std::vector<int> levels = em_levels;
    if (levels.empty()) {
      for (int L = 8; L <= 16; ++L) levels.push_back(L);
    }
    std::vector<EmbeddingRow> rows;
    json params;
    if (em_kind == "weak-tree") {
      rows = weak_tree_separation(em_s, em_eta, levels,
                                  geometric_lambda_grid());
      params = json{{"s", em_s}, {"eta", em_eta}};
    } else if (em_kind == "besov-scales") {
      rows = besov_scale_separation(em_s, em_eta1, em_eta2, levels);
      params = json{{"s", em_s}, {"eta1", em_eta1}, {"eta2", em_eta2}};
    } else {
      throw std::runtime_error("embeddings: unknown --kind '" + em_kind +
                               "'");
    }
    bool divergent_grows = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      divergent_grows = divergent_grows && rows[i].stat_a > rows[i - 1].stat_a;
    }
    const double final_growth_bounded =
        rows.size() > 1 ? rows.back().growth_b : 1.0;
    json summary{{"kind", em_kind},
                 {"params", params},
                 {"levels", levels},
                 {"divergent_grows_every_step", divergent_grows},
                 {"final_growth_divergent",
                  rows.size() > 1 ? rows.back().growth_a : 1.0},
                 {"final_growth_bounded", final_growth_bounded},
                 {"bounded_within_tolerance", final_growth_bounded < 1.1}};
    const fs::path dir = ensure_out_dir(em_out);
    write_file_atomic(dir / "embeddings.csv", embeddings_csv(rows));
    write_json_file(dir / "embeddings_summary.json", summary);
  });

  try {
    std::vector<std::string> args = expand_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // parse consumes back-to-front
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
