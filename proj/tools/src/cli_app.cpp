// Copyright 2026 The labelshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli_app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "config_file.hpp"
#include "csv_input.hpp"
#include "json_include.hpp"
#include "labelshift/bernoulli_chain.hpp"
#include "labelshift/detector.hpp"
#include "labelshift/errors.hpp"
#include "labelshift/experiments.hpp"
#include "labelshift/fredholm.hpp"
#include "labelshift/mixture.hpp"
#include "labelshift/ratio.hpp"
#include "model_io.hpp"

namespace labelshift::cli {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kLatticePreset = "bernoulli-lattice";

struct Settings {
  std::string config;
  std::string input, output, trace;
  std::string model, train, classifier = "lda", save_model;
  std::string rule = "cusum", weight = "uniform";
  double threshold = kUnset, pi_inf = kUnset, pi0 = kUnset;
  double pi0_min = 0.6, pi0_max = 0.8, init_x = kUnset;
  int window = 200, n_quad = 21;
  double ridge = 0.0, bandwidth = 0.0;

  std::string preset, procedure = "classifier", table, regime = "pre", score = "none";
  double arl_target = 500.0, tol = 0.02, cut = 0.5, mu = 1.0;
  std::uint64_t seed = 1, reps = 2000, cap = 0, length = 1000, changepoint = 0, budget = 2000;
  std::uint64_t train_size = 0;
  int nodes = 64;
  unsigned threads = 0;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes `text` to `path`, or to `out` when path is empty.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write output file '" + path + "'");
  file << text;
}

LabelShiftPriors required_priors(const Settings& s) {
  if (std::isnan(s.pi_inf)) throw InputError("--pi-inf is required");
  if (std::isnan(s.pi0)) throw InputError("--pi0 is required");
  LabelShiftPriors priors{s.pi_inf, s.pi0};
  priors.validate();
  return priors;
}

MixtureWeight parse_weight(const std::string& text) {
  if (text == "uniform") return MixtureWeight::uniform();
  if (text.rfind("point:", 0) == 0) {
    try {
      return MixtureWeight::point_mass(std::stod(text.substr(6)));
    } catch (const std::logic_error&) {
    }
  }
  throw InputError("--weight must be 'uniform' or 'point:<pi0>', got '" + text + "'");
}

MixtureConfig mixture_config(const Settings& s) {
  MixtureConfig cfg;
  cfg.pi0_min = s.pi0_min;
  cfg.pi0_max = s.pi0_max;
  cfg.weight = parse_weight(s.weight);
  cfg.n_quad = s.n_quad;
  cfg.window = s.window;
  if (!std::isnan(s.pi_inf)) cfg.pi_inf = s.pi_inf;
  if (!std::isnan(s.threshold)) cfg.threshold = s.threshold;
  return cfg;
}

// ---------------------------------------------------------------------------
// detect

std::optional<Classifier> detection_model(const Settings& s) {
  if (!s.model.empty() && !s.train.empty()) {
    throw InputError("--model and --train are mutually exclusive");
  }
  if (!s.model.empty()) return load_model(s.model);
  if (s.train.empty()) return std::nullopt;
  const TrainingData data = read_training_csv(s.train);
  std::vector<LabeledSample> train;
  train.reserve(data.x.size());
  for (std::size_t i = 0; i < data.x.size(); ++i) train.push_back({data.x[i], data.y[i]});
  const double prior = std::isnan(s.pi_inf) ? label_frequency(train) : s.pi_inf;
  FitOptions fit;
  fit.ridge = s.ridge;
  Classifier model = [&]() -> Classifier {
    if (s.classifier == "lda") return fit_lda(train, prior, fit);
    if (s.classifier == "qda") return fit_qda(train, prior, fit);
    const BandwidthRule rule =
        s.bandwidth > 0.0 ? BandwidthRule::fixed(s.bandwidth) : BandwidthRule::silverman();
    return fit_kde_classifier(train, prior, rule);
  }();
  if (!s.save_model.empty()) save_model(model, s.save_model);
  return model;
}

int run_detect(const Settings& s, std::ostream& out) {
  if (std::isnan(s.threshold)) throw InputError("--threshold is required");
  const std::optional<Classifier> model = detection_model(s);

  std::ifstream in(s.input, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + s.input + "'");
  CsvReader reader(in);

  std::optional<std::ofstream> trace;
  if (!s.trace.empty()) {
    trace.emplace(s.trace, std::ios::binary);
    if (!*trace) throw InputError("cannot write trace file '" + s.trace + "'");
    *trace << "row,log_statistic\n";
  }

  const bool mixture = s.rule == "mixture";
  DetectorConfig config;
  LabelShiftPriors priors;
  MixtureConfig mix_cfg;
  if (mixture) {
    if (std::isnan(s.pi_inf)) throw InputError("--pi-inf is required");
    mix_cfg = mixture_config(s);
    mix_cfg.validate();
  } else {
    priors = required_priors(s);
    config = s.rule == "sr" ? DetectorConfig::shiryaev_roberts(
                                  s.threshold, std::isnan(s.init_x) ? 0.0 : s.init_x)
                            : DetectorConfig::cusum(s.threshold);
    if (s.rule == "cusum" && !std::isnan(s.init_x)) config.init_x = s.init_x;
    config.validate();
  }
  DetectorState state = DetectorState::initial(config);
  std::optional<MixtureState> mix_state;
  if (mixture) mix_state = MixtureState::initial(mix_cfg);

  const double log_a = std::log(s.threshold);
  double log_stat = mixture ? -INFINITY : state.log_stat;
  std::uint64_t rows = 0;
  bool alarm = false;
  CsvRow row;
  while ((s.cap == 0 || rows < s.cap) && reader.next(row)) {
    double score = 0.0;
    if (model) {
      if (reader.feature_dim() == 0) {
        throw InputError("row " + std::to_string(row.number) + ": model needs feature columns");
      }
      score = classifier_score(*model, row.x);
    } else if (row.score) {
      score = *row.score;
    } else {
      throw InputError("input has feature columns but no --model or --train was given");
    }
    if (mixture) {
      log_stat = push_mixture(*mix_state, mix_cfg, score);
    } else {
      state = update_detector(state, config, label_shift_ratio(score, priors));
      log_stat = state.log_stat;
    }
    ++rows;
    if (trace) *trace << row.number << ',' << format_double(log_stat) << '\n';
    if (crossed(log_stat, log_a)) {
      alarm = true;
      break;
    }
  }

  if (alarm) {
    out << "alarm at row " << rows << '\n';
  } else {
    out << "no alarm after " << rows << " rows\n";
  }
  out << "final statistic " << format_double(std::exp(log_stat)) << " (log "
      << format_double(log_stat) << ")\n";
  if (!s.output.empty()) {
    nlohmann::ordered_json j;
    j["alarm"] = alarm;
    j["stopping_time"] = rows;
    j["censored"] = !alarm;
    j["rule"] = s.rule;
    j["threshold"] = s.threshold;
    j["final_log_statistic"] =
        std::isfinite(log_stat) ? nlohmann::json(log_stat) : nlohmann::json(nullptr);
    emit(j.dump(2) + "\n", s.output, out);
  }
  return alarm ? kExitAlarm : kExitNoAlarm;
}

// ---------------------------------------------------------------------------
// calibrate

struct NamedProcedure {
  Procedure procedure;
  std::optional<double> lattice_step;
};

Classifier preset_model(const ScenarioPreset& preset, const Settings& s) {
  if (preset.fixed_score_prior) return preset_score_model(preset);
  const std::size_t m = s.train_size > 0 ? s.train_size : preset.training_size;
  return train_classifier(preset.pre, ClassifierKind::Lda, m, derive_seed(s.seed, 7));
}

NamedProcedure calibration_procedure(const Settings& s) {
  if (s.preset == kLatticePreset) {
    const LabelShiftPriors priors{std::isnan(s.pi_inf) ? 0.4 : s.pi_inf,
                                  std::isnan(s.pi0) ? 0.7 : s.pi0};
    const Lattice lattice = lattice_from_priors(priors);
    const double up = lattice.up_steps * lattice.step_size;
    const double down = -lattice.down_steps * lattice.step_size;
    return {make_recursive_procedure(
                UpdateRule::Cusum, 1.0, make_label_sampler(priors.pi_inf, priors.pi_0),
                [up, down](const Observation& o) { return o.y == 1 ? up : down; }),
            lattice.step_size};
  }
  const ScenarioPreset& preset = find_preset(s.preset);
  if (s.procedure == "optimal") return {optimal_procedure(preset), std::nullopt};
  if (s.procedure == "labels") return {label_procedure(preset), std::nullopt};
  if (s.procedure == "binarized") {
    return {binarized_procedure(preset, preset_model(preset, s), s.cut), std::nullopt};
  }
  if (s.procedure == "mixture") {
    return {mixture_procedure(preset, preset_model(preset, s), mixture_config(s)), std::nullopt};
  }
  if (preset.fixed_score_prior) {
    return {score_procedure(preset, preset_score_model(preset)), std::nullopt};
  }
  const std::size_t m = s.train_size > 0 ? s.train_size : preset.training_size;
  return {trained_procedure(preset, ClassifierKind::Lda, m), std::nullopt};
}

int run_calibrate(const Settings& s, std::ostream& out) {
  if (!(s.arl_target >= 1.0)) {
    throw InputError("--arl-target must be at least 1, got " + format_double(s.arl_target));
  }
  const NamedProcedure named = calibration_procedure(s);
  CalibrationOptions options;
  options.tol_rel = s.tol;
  options.n_reps = s.reps;
  options.cap = s.cap;
  options.seed = s.seed;
  options.threads = s.threads;
  const CalibrationResult result = calibrate_threshold(named.procedure, s.arl_target, options);

  nlohmann::ordered_json j;
  j["A"] = result.threshold;
  j["arl_est"] = result.arl.mean;
  j["arl_se"] = result.arl.se;
  j["log_A"] = result.log_threshold;
  j["within_tolerance"] = result.within_tolerance;
  j["target_arl"] = s.arl_target;
  j["preset"] = s.preset;
  j["procedure"] = s.preset == kLatticePreset ? "labels" : s.procedure;
  j["reps"] = s.reps;
  j["censored"] = result.arl.n_censored;
  j["seed"] = s.seed;
  if (named.lattice_step) j["lattice_step"] = *named.lattice_step;
  emit(j.dump(2) + "\n", s.output, out);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int run_simulate(const Settings& s, std::ostream& out) {
  const ScenarioPreset& preset = find_preset(s.preset);
  StreamSpec spec;
  spec.pre = preset.pre;
  spec.post = preset.post;
  spec.path = preset.path;
  spec.length = s.length;
  spec.changepoint_nu = s.changepoint;
  spec.seed = s.seed;
  const auto points = sample_stream(spec);

  std::optional<Classifier> scorer;
  std::optional<GaussianMixture> posterior;
  if (s.score == "posterior") {
    posterior.emplace(preset.pre);
  } else if (s.score == "fixed") {
    scorer = preset_score_model(preset);
  }

  std::ostringstream csv;
  const Eigen::Index d = preset.pre.dim();
  for (Eigen::Index j = 1; j <= d; ++j) csv << 'x' << j << ',';
  csv << "y,regime";
  if (s.score != "none") csv << ",score";
  csv << '\n';
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < d; ++j) csv << format_double(p.x[j]) << ',';
    csv << p.y << ',' << (p.regime == Regime::Pre ? "pre" : "post");
    if (posterior) csv << ',' << format_double(posterior->posterior(p.x));
    if (scorer) csv << ',' << format_double(classifier_score(*scorer, p.x));
    csv << '\n';
  }
  emit(csv.str(), s.output, out);
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce

int run_reproduce(const Settings& s, std::ostream& out) {
  CellOptions options;
  options.target_arl = s.arl_target;
  options.tol_rel = s.tol;
  options.seed = s.seed;
  options.threads = s.threads;
  const auto reports = reproduce_table(s.table, s.budget, options);
  std::string lines;
  for (const auto& report : reports) {
    out << report.to_text() << '\n';
    ComparisonReport named = report;
    for (auto& row : named.rows) row.name = report.title + " | " + row.name;
    lines += named.to_json_lines();
  }
  if (!s.output.empty()) emit(lines, s.output, out);
  return 0;
}

// ---------------------------------------------------------------------------
// fredholm

int run_fredholm(const Settings& s, std::ostream& out) {
  if (std::isnan(s.threshold)) throw InputError("--threshold is required");
  if (!(s.mu != 0.0) || !std::isfinite(s.mu)) throw InputError("--mu must be finite and nonzero");
  FredholmProblem problem;
  const double mu = s.mu;
  if (s.regime == "pre") {
    problem.lr_density = [mu](double x) { return gaussian_shift_lr_density_pre(x, mu); };
  } else {
    problem.lr_density = [mu](double x) { return gaussian_shift_lr_density_post(x, mu); };
  }
  problem.rule = s.rule == "sr" ? UpdateRule::ShiryaevRoberts : UpdateRule::Cusum;
  problem.threshold = s.threshold;
  problem.n_nodes = s.nodes;
  const double init_x = std::isnan(s.init_x) ? (s.rule == "sr" ? 0.0 : 1.0) : s.init_x;
  const double value = fredholm_expected_stopping(problem, init_x);

  nlohmann::ordered_json j;
  j["expected_stopping"] = value;
  j["regime"] = s.regime;
  j["rule"] = s.rule;
  j["threshold"] = s.threshold;
  j["mu"] = s.mu;
  j["init_x"] = init_x;
  j["nodes"] = s.nodes;
  emit(j.dump(2) + "\n", s.output, out);
  return 0;
}

// ---------------------------------------------------------------------------
// argument plumbing

template <class T>
CLI::Option* add(CLI::App* app, const std::string& name, T& target, const std::string& help) {
  return app->add_option(name, target, help);
}

void add_common(CLI::App* app, Settings& s) {
  add(app, "--config", s.config, "flat key=value file; command-line flags take precedence");
  add(app, "--seed", s.seed, "base random seed")->capture_default_str();
  add(app, "--threads", s.threads, "worker threads (0 = all cores)")->capture_default_str();
  add(app, "--output", s.output, "write the JSON/CSV result here instead of stdout");
}

void add_mixture_options(CLI::App* app, Settings& s) {
  add(app, "--pi0-min", s.pi0_min, "lower end of the post-change prevalence interval")
      ->capture_default_str();
  add(app, "--pi0-max", s.pi0_max, "upper end of the post-change prevalence interval")
      ->capture_default_str();
  add(app, "--window", s.window, "mixture window length")->capture_default_str();
  add(app, "--n-quad", s.n_quad, "mixture quadrature nodes")->capture_default_str();
  add(app, "--weight", s.weight, "mixing weight: uniform or point:<pi0>")->capture_default_str();
}

std::vector<CLI::App*> build(CLI::App& app, Settings& s) {
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* detect = app.add_subcommand("detect", "run a detector over a CSV stream");
  auto* calibrate = app.add_subcommand("calibrate", "calibrate a threshold to a target ARL");
  auto* simulate = app.add_subcommand("simulate", "write a simulated scenario stream as CSV");
  auto* reproduce = app.add_subcommand("reproduce", "run the comparison tables at desk scale");
  auto* fredholm = app.add_subcommand("fredholm", "solve the integral equation for E[T]");
  const std::vector<CLI::App*> subs{detect, calibrate, simulate, reproduce, fredholm};
  for (auto* sub : subs) {
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(sub, s);
  }

  add(detect, "--input", s.input, "CSV with a score column or features x1..xd")
      ->required()
      ->check(CLI::ExistingFile);
  add(detect, "--trace", s.trace, "write row,log_statistic for every processed row");
  add(detect, "--rule", s.rule, "cusum, sr or mixture")
      ->check(CLI::IsMember({"cusum", "sr", "mixture"}))
      ->capture_default_str();
  add(detect, "--threshold", s.threshold, "alarm threshold A");
  add(detect, "--pi-inf", s.pi_inf, "pre-change class-1 prevalence");
  add(detect, "--pi0", s.pi0, "post-change class-1 prevalence");
  add(detect, "--init-x", s.init_x, "initial statistic R_0");
  add(detect, "--cap", s.cap, "stop after this many rows (0 = no limit)");
  add(detect, "--model", s.model, "classifier JSON file")->check(CLI::ExistingFile);
  add(detect, "--train", s.train, "training CSV (x1..xd,y) to fit a classifier")
      ->check(CLI::ExistingFile);
  add(detect, "--classifier", s.classifier, "lda, qda or kde (with --train)")
      ->check(CLI::IsMember({"lda", "qda", "kde"}))
      ->capture_default_str();
  add(detect, "--ridge", s.ridge, "ridge added to fitted covariances");
  add(detect, "--bandwidth", s.bandwidth, "fixed KDE bandwidth (default: Silverman)");
  add(detect, "--save-model", s.save_model, "write the fitted classifier as JSON");
  add_mixture_options(detect, s);

  add(calibrate, "--preset", s.preset, "scenario preset or bernoulli-lattice")->required();
  add(calibrate, "--procedure", s.procedure,
      "classifier, optimal, labels, binarized or mixture")
      ->check(CLI::IsMember({"classifier", "optimal", "labels", "binarized", "mixture"}))
      ->capture_default_str();
  add(calibrate, "--arl-target", s.arl_target, "target ARL")->capture_default_str();
  add(calibrate, "--tol", s.tol, "relative ARL tolerance")->capture_default_str();
  add(calibrate, "--reps", s.reps, "Monte Carlo replications")->capture_default_str();
  add(calibrate, "--cap", s.cap, "run-length cap (0 = 20 x target)");
  add(calibrate, "--pi-inf", s.pi_inf, "pre-change prevalence (bernoulli-lattice)");
  add(calibrate, "--pi0", s.pi0, "post-change prevalence (bernoulli-lattice)");
  add(calibrate, "--cut", s.cut, "score cut for the binarized procedure")->capture_default_str();
  add(calibrate, "--train-size", s.train_size, "training set size (0 = preset default)");
  add_mixture_options(calibrate, s);

  add(simulate, "--preset", s.preset, "scenario preset")->required();
  add(simulate, "--length", s.length, "number of observations")->capture_default_str();
  add(simulate, "--changepoint", s.changepoint, "last pre-change index nu")
      ->capture_default_str();
  add(simulate, "--score", s.score, "extra score column: none, posterior or fixed")
      ->check(CLI::IsMember({"none", "posterior", "fixed"}))
      ->capture_default_str();

  add(reproduce, "--table", s.table, "scenario1, scenario2 or dengue-analogue")->required();
  add(reproduce, "--budget,--reps", s.budget, "replications per cell")->capture_default_str();
  add(reproduce, "--arl-target", s.arl_target, "target ARL")->capture_default_str();
  add(reproduce, "--tol", s.tol, "relative ARL tolerance")->capture_default_str();

  add(fredholm, "--mu", s.mu, "post-change mean of the Gaussian shift")->capture_default_str();
  add(fredholm, "--rule", s.rule, "cusum or sr")
      ->check(CLI::IsMember({"cusum", "sr"}))
      ->capture_default_str();
  add(fredholm, "--threshold", s.threshold, "threshold A");
  add(fredholm, "--nodes", s.nodes, "quadrature nodes")->capture_default_str();
  add(fredholm, "--regime", s.regime, "pre or post")
      ->check(CLI::IsMember({"pre", "post"}))
      ->capture_default_str();
  add(fredholm, "--init-x", s.init_x, "initial statistic");
  return subs;
}

std::string find_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

// Config entries become `--key=value` tokens placed right after the
// subcommand name, so later command-line flags override them.
std::vector<std::string> inject_config(const std::vector<std::string>& args,
                                       const std::vector<CLI::App*>& subs) {
  const std::string path = find_config(args);
  if (path.empty()) return args;
  std::size_t sub_pos = 0;
  CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && !sub; ++i) {
    for (auto* candidate : subs) {
      if (args[i] == candidate->get_name()) {
        sub = candidate;
        sub_pos = i;
      }
    }
  }
  if (!sub) return args;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(path)) {
    const std::string flag = config_key_to_flag(key);
    if (flag == "--config") throw InputError("config file cannot include another config file");
    if (sub->get_option_no_throw(flag)) {
      injected.push_back(flag + "=" + value);
      continue;
    }
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](CLI::App* a) { return a->get_option_no_throw(flag); });
    if (!known) throw InputError("config file: unknown key '" + key + "'");
  }
  std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(sub_pos) + 1);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + static_cast<long>(sub_pos) + 1, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings settings;
  CLI::App app{"Label-shift changepoint detection with classifier scores", "labelshift"};
  const auto subs = build(app, settings);
  try {
    std::vector<std::string> tokens = inject_config(args, subs);
    std::reverse(tokens.begin(), tokens.end());
    tokens.pop_back();  // program name
    try {
      app.parse(tokens);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : kExitError;
    }
    const CLI::App* chosen = app.get_subcommands().front();
    const std::string& name = chosen->get_name();
    if (name == "detect") return run_detect(settings, out);
    if (name == "calibrate") return run_calibrate(settings, out);
    if (name == "simulate") return run_simulate(settings, out);
    if (name == "reproduce") return run_reproduce(settings, out);
    return run_fredholm(settings, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace labelshift::cli
