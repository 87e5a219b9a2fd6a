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

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "labelshift/bernoulli_chain.hpp"
#include "labelshift/classifiers.hpp"
#include "labelshift/detector.hpp"
#include "labelshift/experiments.hpp"
#include "labelshift/fredholm.hpp"
#include "labelshift/mixture.hpp"
#include "labelshift/oc.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/simgen.hpp"

namespace {

using namespace labelshift;

std::vector<double> uniform_scores(std::size_t n) {
  Rng rng(1);
  std::vector<double> out(n);
  for (double& s : out) s = rng.uniform();
  return out;
}

void BM_CusumUpdate(benchmark::State& state) {
  const auto scores = uniform_scores(4096);
  const LabelShiftPriors priors{0.4, 0.7};
  const DetectorConfig cfg = DetectorConfig::cusum(1e300);
  DetectorState s = DetectorState::initial(cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    s = update_detector(s, cfg, label_shift_ratio(scores[i++ & 4095], priors));
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_CusumUpdate);

void BM_MixturePush(benchmark::State& state) {
  MixtureConfig cfg;
  cfg.window = static_cast<int>(state.range(0));
  cfg.n_quad = 21;
  cfg.pi_inf = 0.3;
  const auto scores = uniform_scores(4096);
  MixtureState s = MixtureState::initial(cfg);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(push_mixture(s, cfg, scores[i++ & 4095]));
}
BENCHMARK(BM_MixturePush)->Arg(50)->Arg(200);

void BM_ClassifierScore(benchmark::State& state) {
  const auto& preset = find_preset("example3-d10");
  const auto train = sample_training_set(preset.pre, 1000, 2);
  const Classifier model = state.range(0) == 0 ? Classifier(fit_lda(train, 0.4))
                                               : Classifier(fit_qda(train, 0.4));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(10, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(classifier_score(model, x));
}
BENCHMARK(BM_ClassifierScore)->Arg(0)->Arg(1);

void BM_FredholmSolve(benchmark::State& state) {
  FredholmProblem p;
  p.lr_density = [](double s) { return gaussian_shift_lr_density_pre(s, 1.0); };
  p.threshold = std::exp(5.0);
  p.n_nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_expected_stopping(p, 1.0));
}
BENCHMARK(BM_FredholmSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BernoulliChain(benchmark::State& state) {
  const Lattice lattice = lattice_from_priors(LabelShiftPriors{0.4, 0.7});
  const BinaryChainSpec spec{lattice.up_steps, lattice.down_steps, lattice.step_size, 0.4,
                             std::exp((state.range(0) - 0.5) * lattice.step_size)};
  for (auto _ : state) benchmark::DoNotOptimize(bernoulli_exact_ect(spec));
}
BENCHMARK(BM_BernoulliChain)->Arg(60)->Arg(600)->Unit(benchmark::kMicrosecond);

void BM_RunLengthEstimate(benchmark::State& state) {
  const ScenarioPreset& preset = find_preset("scenario1-s1a-m1000");
  const Procedure proc = optimal_procedure(preset);
  MonteCarloOptions o;
  o.n_reps = 200;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_run_length(proc, std::log(50.0), Regime::Pre, o));
  }
}
BENCHMARK(BM_RunLengthEstimate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
