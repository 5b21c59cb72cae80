#include "rachbound/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/beta.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "rachbound/contention.hpp"

namespace rachbound {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleRng make_sample_rng(std::uint64_t base_seed, std::uint64_t sample_index) {
  return SampleRng(splitmix64(splitmix64(base_seed) ^ sample_index));
}

SlotOutcome run_slot(int backlog, double access_probability, int preambles, SampleRng& rng) {
  if (backlog < 0) throw std::invalid_argument("backlog must be >= 0");
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  if (!(access_probability > 0.0 && access_probability <= 1.0)) {
    throw std::invalid_argument("access probability must lie in (0, 1]");
  }
  SlotOutcome out;
  out.observation.idle = preambles;
  if (backlog == 0) return out;

  if (access_probability >= 1.0) {
    out.admitted = backlog;
  } else {
    boost::random::binomial_distribution<int, double> admit(backlog, access_probability);
    out.admitted = admit(rng);
  }

  thread_local std::vector<int> picks;
  picks.assign(static_cast<std::size_t>(preambles), 0);
  boost::random::uniform_int_distribution<int> pick(0, preambles - 1);
  for (int i = 0; i < out.admitted; ++i) ++picks[static_cast<std::size_t>(pick(rng))];

  SlotObservation& obs = out.observation;
  obs.idle = 0;
  for (int c : picks) {
    if (c == 0) {
      ++obs.idle;
    } else if (c == 1) {
      ++obs.singleton;
    } else {
      ++obs.collision;
      out.collided_devices += c;
    }
  }
  out.successes = obs.singleton;
  return out;
}

double collided_preamble_occupancy(double load) {
  if (!(load >= 0.0)) throw std::invalid_argument("load must be >= 0");
  if (load < 1e-4) return 2.0 + load / 3.0;
  // nu (1 - e^-nu) / (1 - (1 + nu) e^-nu), with the denominator via expm1.
  const double em1 = -std::expm1(-load);                     // 1 - e^-nu
  const double denom = em1 - load * std::exp(-load);         // 1 - (1 + nu) e^-nu
  return load * em1 / denom;
}

EstimatorState estimator_update(const EstimatorState& state, const SlotObservation& observation,
                                double access_probability, int preambles, double arrivals) {
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  if (observation.idle < 0 || observation.singleton < 0 || observation.collision < 0 ||
      observation.idle + observation.singleton + observation.collision != preambles) {
    throw std::invalid_argument("observation counts must be non-negative and sum to M");
  }
  if (!(access_probability > 0.0 && access_probability <= 1.0)) {
    throw std::invalid_argument("access probability must lie in (0, 1]");
  }
  const double prior = std::max(0.0, state.backlog_estimate);
  double load = access_probability * prior / preambles;
  if (observation.idle == 0) load = std::max(load, std::log(2.0 * preambles));
  const double barred = (1.0 - access_probability) * prior;
  const double stuck = observation.collision * collided_preamble_occupancy(load);
  return {std::max(0.0, barred + stuck + arrivals)};
}

void SimConfig::validate() const {
  scenario.require_delta();
  if (samples < 1) throw std::invalid_argument("sample count must be >= 1");
  if (max_slots < 1) throw std::invalid_argument("simulation horizon must be >= 1 slot");
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
}

std::string SimConfig::policy_label() const {
  if (!policy.is_static() && knowledge == BacklogKnowledge::estimated) return "dynamic-est";
  return policy.describe();
}

int SimTrajectory::resolution_time(int backlog_target) const {
  for (std::size_t i = 0; i < backlog.size(); ++i) {
    if (backlog[i] <= backlog_target) return static_cast<int>(i);
  }
  return -1;
}

namespace {

// Drives one burst. `visit(slot, backlog_after, outcome, p, estimate)` is
// called after every slot and returns false to stop early.
template <class Visit>
void run_burst(const SimConfig& config, SampleRng& rng, Visit&& visit) {
  const int m = config.scenario.preambles;
  const bool estimated =
      !config.policy.is_static() && config.knowledge == BacklogKnowledge::estimated;
  EstimatorState estimator{config.initial_estimate < 0.0 ? static_cast<double>(m)
                                                         : config.initial_estimate};
  int backlog = config.scenario.devices;
  for (int slot = 1; slot <= config.max_slots && backlog > 0; ++slot) {
    double p;
    if (config.policy.is_static()) {
      p = config.policy.static_probability();
    } else if (estimated) {
      p = optimal_barring(std::round(estimator.backlog_estimate), m);
    } else {
      p = optimal_barring(backlog, m);
    }
    const double estimate_used = estimator.backlog_estimate;
    const SlotOutcome outcome = run_slot(backlog, p, m, rng);
    backlog -= outcome.successes;
    if (estimated) estimator = estimator_update(estimator, outcome.observation, p, m);
    if (!visit(slot, backlog, outcome, p, estimate_used)) return;
  }
}

}  // namespace

SimTrajectory simulate_burst(const SimConfig& config, SampleRng& rng) {
  config.validate();
  SimTrajectory traj;
  const int n = config.scenario.devices;
  traj.backlog.push_back(n);
  traj.departures.push_back(0);
  run_burst(config, rng,
            [&](int, int backlog, const SlotOutcome& outcome, double p, double estimate) {
              traj.backlog.push_back(backlog);
              traj.departures.push_back(n - backlog);
              traj.observations.push_back(outcome.observation);
              traj.access_probabilities.push_back(p);
              if (config.knowledge == BacklogKnowledge::estimated && !config.policy.is_static()) {
                traj.estimates.push_back(estimate);
              }
              return true;
            });
  return traj;
}

std::int64_t ResolutionHistogram::exceeding(int slots) const {
  std::int64_t acc = censored;
  for (std::size_t i = static_cast<std::size_t>(std::max(slots, -1) + 1); i < counts.size(); ++i) {
    acc += counts[i];
  }
  return acc;
}

std::vector<ResolutionHistogram> resolution_histograms(const SimConfig& config,
                                                       std::span<const int> backlog_targets) {
  config.validate();
  std::vector<int> targets(backlog_targets.begin(), backlog_targets.end());
  for (int b : targets) {
    if (b < 0) throw std::invalid_argument("target backlog must be >= 0");
  }
  const int n = config.scenario.devices;
  const int lowest = targets.empty() ? n : *std::min_element(targets.begin(), targets.end());
  const auto bins = static_cast<std::size_t>(config.max_slots) + 1;

  auto empty = [&] {
    std::vector<ResolutionHistogram> hs;
    for (int b : targets) hs.push_back({b, 0, std::vector<std::int64_t>(bins, 0), 0});
    return hs;
  };

  auto run_range = [&](std::int64_t first, std::int64_t last, std::vector<ResolutionHistogram>& hs) {
    std::vector<int> hit(targets.size());
    for (std::int64_t s = first; s < last; ++s) {
      SampleRng rng = make_sample_rng(config.base_seed, static_cast<std::uint64_t>(s));
      std::fill(hit.begin(), hit.end(), -1);
      for (std::size_t j = 0; j < targets.size(); ++j) {
        if (n <= targets[j]) hit[j] = 0;
      }
      if (n > lowest) {
        run_burst(config, rng, [&](int slot, int backlog, const SlotOutcome&, double, double) {
          for (std::size_t j = 0; j < targets.size(); ++j) {
            if (hit[j] < 0 && backlog <= targets[j]) hit[j] = slot;
          }
          return backlog > lowest;
        });
      }
      for (std::size_t j = 0; j < targets.size(); ++j) {
        ++hs[j].samples;
        if (hit[j] < 0) {
          ++hs[j].censored;
        } else {
          ++hs[j].counts[static_cast<std::size_t>(hit[j])];
        }
      }
    }
  };

  const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(config.workers, config.samples));
  std::vector<std::vector<ResolutionHistogram>> partial(static_cast<std::size_t>(workers));
  for (auto& p : partial) p = empty();
  if (workers == 1) {
    run_range(0, config.samples, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::int64_t w = 0; w < workers; ++w) {
      const std::int64_t first = config.samples * w / workers;
      const std::int64_t last = config.samples * (w + 1) / workers;
      pool.emplace_back([&, w, first, last] { run_range(first, last, partial[static_cast<std::size_t>(w)]); });
    }
    for (auto& t : pool) t.join();
  }

  auto merged = empty();
  for (const auto& hs : partial) {
    for (std::size_t j = 0; j < hs.size(); ++j) {
      merged[j].samples += hs[j].samples;
      merged[j].censored += hs[j].censored;
      for (std::size_t i = 0; i < bins; ++i) merged[j].counts[i] += hs[j].counts[i];
    }
  }
  return merged;
}

ConfidenceInterval clopper_pearson(std::int64_t hits, std::int64_t trials, double confidence) {
  if (trials < 1 || hits < 0 || hits > trials) {
    throw std::invalid_argument("Clopper-Pearson needs 0 <= hits <= trials, trials >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(hits);
  const auto n = static_cast<double>(trials);
  ConfidenceInterval ci;
  if (hits > 0) {
    ci.low = boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1.0), alpha / 2.0);
  }
  if (hits < trials) {
    ci.high = boost::math::quantile(boost::math::beta_distribution<double>(k + 1.0, n - k),
                                    1.0 - alpha / 2.0);
  }
  return ci;
}

std::vector<CcdfPoint> ccdf_from_histogram(const ResolutionHistogram& histogram,
                                           std::span<const int> slot_grid, double confidence) {
  std::vector<CcdfPoint> out;
  out.reserve(slot_grid.size());
  const auto horizon = static_cast<int>(histogram.counts.size()) - 1;
  for (int t : slot_grid) {
    if (t < 0 || t > horizon) throw std::invalid_argument("slot grid must lie within the simulation horizon");
    CcdfPoint pt;
    pt.slots = t;
    pt.hits = histogram.exceeding(t);
    pt.eps = static_cast<double>(pt.hits) / static_cast<double>(histogram.samples);
    pt.ci = clopper_pearson(pt.hits, histogram.samples, confidence);
    out.push_back(pt);
  }
  return out;
}

std::vector<CcdfPoint> monte_carlo_ccdf(const SimConfig& config, int backlog_target,
                                        std::span<const int> slot_grid) {
  if (config.samples < 100) throw std::invalid_argument("Monte-Carlo CCDF needs at least 100 samples");
  const int targets[] = {backlog_target};
  const auto hs = resolution_histograms(config, targets);
  return ccdf_from_histogram(hs.front(), slot_grid);
}

}  // namespace rachbound
