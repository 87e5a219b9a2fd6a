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

#include "labelshift/oc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "labelshift/errors.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {

namespace {

unsigned resolve_threads(unsigned requested, std::uint64_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(work, 1)));
}

// Runs body(r) for r in [0, n). Each index writes only its own output slot,
// so results do not depend on scheduling.
template <class Body>
void parallel_for(std::uint64_t n, unsigned threads, Body&& body) {
  const unsigned workers = resolve_threads(threads, n);
  if (workers <= 1) {
    for (std::uint64_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t r = next.fetch_add(1);
      if (r >= n) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

RunLengthSummary summarize(std::span<const std::uint64_t> times, std::uint64_t n_censored,
                           std::uint64_t cap) {
  RunLengthSummary s;
  s.n = times.size();
  s.n_censored = n_censored;
  s.cap = cap;
  CompensatedSum sum;
  for (auto t : times) sum.add(static_cast<double>(t));
  s.mean = sum.value() / static_cast<double>(s.n);
  CompensatedSum dev;
  for (auto t : times) {
    const double d = static_cast<double>(t) - s.mean;
    dev.add(d * d);
  }
  s.sd = s.n > 1 ? std::sqrt(dev.value() / static_cast<double>(s.n - 1)) : 0.0;
  s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

void check_options(std::uint64_t n_reps, std::uint64_t cap) {
  if (n_reps < 2) {
    throw InputError("at least 2 replications are needed, got " + std::to_string(n_reps));
  }
  if (cap < 1) throw InputError("run cap must be at least 1");
}

class RecursiveReplication final : public Replication {
 public:
  RecursiveReplication(UpdateRule rule, double init_x, std::unique_ptr<ObservationStream> stream,
                       const LogRatioFn& log_lr)
      : rule_(rule), log_stat_(std::log(init_x)), stream_(std::move(stream)), log_lr_(log_lr) {}

  double next_log_stat() override {
    log_stat_ = log_update_rule(rule_, log_stat_) + log_lr_(stream_->next());
    return log_stat_;
  }

 private:
  UpdateRule rule_;
  double log_stat_;
  std::unique_ptr<ObservationStream> stream_;
  const LogRatioFn& log_lr_;
};

class MixtureReplication final : public Replication {
 public:
  MixtureReplication(const MixtureConfig& config, std::unique_ptr<ObservationStream> stream,
                     const ScoreFn& score)
      : config_(config),
        state_(MixtureState::initial(config)),
        stream_(std::move(stream)),
        score_(score) {}

  double next_log_stat() override { return push_mixture(state_, config_, score_(stream_->next())); }

 private:
  const MixtureConfig& config_;
  MixtureState state_;
  std::unique_ptr<ObservationStream> stream_;
  const ScoreFn& score_;
};

}  // namespace

RunLengthSummary RunLengthSummary::pool(std::span<const RunLengthSummary> parts) {
  RunLengthSummary out;
  CompensatedSum total;
  for (const auto& p : parts) {
    out.n += p.n;
    out.n_censored += p.n_censored;
    out.cap = std::max(out.cap, p.cap);
    total.add(p.mean * static_cast<double>(p.n));
  }
  if (out.n == 0) return out;
  out.mean = total.value() / static_cast<double>(out.n);
  CompensatedSum ss;
  for (const auto& p : parts) {
    if (p.n == 0) continue;
    const double d = p.mean - out.mean;
    ss.add(static_cast<double>(p.n - 1) * p.sd * p.sd + static_cast<double>(p.n) * d * d);
  }
  out.sd = out.n > 1 ? std::sqrt(ss.value() / static_cast<double>(out.n - 1)) : 0.0;
  out.se = out.sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

Procedure make_recursive_procedure(UpdateRule rule, double init_x, StreamSampler sampler,
                                   LogRatioFn log_lr) {
  if (!(init_x >= 0.0) || !std::isfinite(init_x)) {
    throw InputError("initial statistic must be finite and nonnegative");
  }
  auto fn = std::make_shared<const LogRatioFn>(std::move(log_lr));
  return [rule, init_x, sampler = std::move(sampler), fn](std::uint64_t seed, Regime regime) {
    struct Owning final : Replication {
      std::shared_ptr<const LogRatioFn> keep;
      RecursiveReplication inner;
      Owning(std::shared_ptr<const LogRatioFn> k, UpdateRule rule, double x,
             std::unique_ptr<ObservationStream> s)
          : keep(std::move(k)), inner(rule, x, std::move(s), *keep) {}
      double next_log_stat() override { return inner.next_log_stat(); }
    };
    return std::unique_ptr<Replication>(
        std::make_unique<Owning>(fn, rule, init_x, sampler(seed, regime)));
  };
}

Procedure make_mixture_procedure(MixtureConfig config, StreamSampler sampler, ScoreFn score) {
  config.validate();
  auto cfg = std::make_shared<const MixtureConfig>(std::move(config));
  auto fn = std::make_shared<const ScoreFn>(std::move(score));
  return [cfg, sampler = std::move(sampler), fn](std::uint64_t seed, Regime regime) {
    struct Owning final : Replication {
      std::shared_ptr<const MixtureConfig> keep_cfg;
      std::shared_ptr<const ScoreFn> keep_fn;
      MixtureReplication inner;
      Owning(std::shared_ptr<const MixtureConfig> c, std::shared_ptr<const ScoreFn> f,
             std::unique_ptr<ObservationStream> s)
          : keep_cfg(std::move(c)), keep_fn(std::move(f)), inner(*keep_cfg, std::move(s), *keep_fn) {}
      double next_log_stat() override { return inner.next_log_stat(); }
    };
    return std::unique_ptr<Replication>(std::make_unique<Owning>(cfg, fn, sampler(seed, regime)));
  };
}

RunLengthSummary estimate_run_length(const Procedure& procedure, double log_threshold,
                                     Regime regime, const MonteCarloOptions& options) {
  check_options(options.n_reps, options.cap);
  if (std::isnan(log_threshold)) throw InputError("threshold is NaN");
  std::vector<std::uint64_t> times(options.n_reps);
  std::vector<unsigned char> censored(options.n_reps, 0);
  parallel_for(options.n_reps, options.threads, [&](std::uint64_t r) {
    auto rep = procedure(options.seed + r, regime);
    std::uint64_t t = 0;
    bool hit = false;
    while (t < options.cap) {
      ++t;
      if (crossed(rep->next_log_stat(), log_threshold)) {
        hit = true;
        break;
      }
    }
    times[r] = t;
    censored[r] = hit ? 0 : 1;
  });
  const auto n_censored =
      static_cast<std::uint64_t>(std::count(censored.begin(), censored.end(), 1));
  if (n_censored == options.n_reps) {
    throw NumericalError("all " + std::to_string(options.n_reps) +
                         " replications were censored at cap " + std::to_string(options.cap) +
                         "; increase the cap");
  }
  return summarize(times, n_censored, options.cap);
}

OperatingCharacteristics estimate_oc(const Procedure& procedure, double threshold,
                                     const MonteCarloOptions& arl_options,
                                     const MonteCarloOptions& add_options) {
  if (!(threshold > 0.0)) throw InputError("threshold must be positive");
  OperatingCharacteristics oc;
  oc.threshold = threshold;
  const double log_a = std::log(threshold);
  oc.arl = estimate_run_length(procedure, log_a, Regime::Pre, arl_options);
  oc.add = estimate_run_length(procedure, log_a, Regime::Post, add_options);
  return oc;
}

RecordsCurve::RecordsCurve(const Procedure& procedure, double log_ceiling,
                           const MonteCarloOptions& options)
    : log_ceiling_(log_ceiling), cap_(options.cap), records_(options.n_reps) {
  check_options(options.n_reps, options.cap);
  if (!std::isfinite(log_ceiling)) throw InputError("records ceiling must be finite");
  parallel_for(options.n_reps, options.threads, [&](std::uint64_t r) {
    auto rep = procedure(options.seed + r, Regime::Pre);
    auto& rec = records_[r];
    double best = -INFINITY;
    for (std::uint64_t t = 1; t <= cap_; ++t) {
      const double s = rep->next_log_stat();
      if (s > best) {
        best = s;
        rec.push_back({t, s});
        if (s >= log_ceiling_) break;
      }
    }
  });
}

RunLengthSummary RecordsCurve::arl(double log_threshold) const {
  if (!(log_threshold <= log_ceiling_)) {
    throw InputError("threshold lies above the simulated records ceiling");
  }
  std::vector<std::uint64_t> times(records_.size());
  std::uint64_t n_censored = 0;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    auto it = std::lower_bound(rec.begin(), rec.end(), log_threshold,
                               [](const Record& a, double v) { return a.log_max < v; });
    if (it == rec.end()) {
      times[r] = cap_;
      ++n_censored;
    } else {
      times[r] = it->t;
    }
  }
  return summarize(times, n_censored, cap_);
}

CalibrationResult calibrate_threshold(const Procedure& procedure, double target_arl,
                                      const CalibrationOptions& options) {
  if (!(target_arl >= 1.0) || !std::isfinite(target_arl)) {
    throw InputError("target ARL must be finite and at least 1");
  }
  if (!(options.tol_rel > 0.0)) throw InputError("relative tolerance must be positive");
  const std::uint64_t cap =
      options.cap > 0 ? options.cap : static_cast<std::uint64_t>(std::ceil(20.0 * target_arl));
  const MonteCarloOptions mc{options.n_reps, cap, options.seed, options.threads};
  const double log_lo = std::log1p(1e-6);
  const double log_limit = std::log(1e9);
  const double band = options.tol_rel * target_arl;

  double ceiling = std::clamp(std::log(target_arl), log_lo + 1.0, log_limit);
  std::unique_ptr<RecordsCurve> curve;
  for (;;) {
    curve = std::make_unique<RecordsCurve>(procedure, ceiling, mc);
    if (curve->arl(ceiling).mean >= target_arl) break;
    if (ceiling >= log_limit) {
      throw NumericalError("could not bracket target ARL " + std::to_string(target_arl) +
                           " below threshold 1e9 (cap " + std::to_string(cap) + ")");
    }
    ceiling = std::min(ceiling + std::max(1.0, 0.5 * ceiling), log_limit);
  }

  CalibrationResult best;
  double best_gap = INFINITY;
  auto consider = [&](double log_a, const RunLengthSummary& s) {
    const double gap = std::abs(s.mean - target_arl);
    if (gap < best_gap) {
      best_gap = gap;
      best.log_threshold = log_a;
      best.arl = s;
    }
    return gap <= band;
  };

  double lo = log_lo;
  double hi = ceiling;
  const RunLengthSummary at_lo = curve->arl(lo);
  if (consider(lo, at_lo) || at_lo.mean > target_arl) {
    if (best_gap > band) {
      throw NumericalError("ARL at the smallest threshold already exceeds the target");
    }
  } else if (!consider(hi, curve->arl(hi))) {
    for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++iter) {
      const double mid = 0.5 * (lo + hi);
      const RunLengthSummary s = curve->arl(mid);
      if (consider(mid, s)) break;
      (s.mean < target_arl ? lo : hi) = mid;
    }
  }
  best.threshold = std::exp(best.log_threshold);
  best.within_tolerance = best_gap <= band;
  return best;
}

}  // namespace labelshift
