#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

#include "rachbound/transient.hpp"

namespace rachbound {

/// Per-sample generator. Streams are derived only from (base_seed,
/// sample_index), so results do not depend on scheduling or worker count.
using SampleRng = boost::random::mt19937_64;

/// Recorded in output metadata so campaigns can be reproduced elsewhere.
inline constexpr const char* kRngAlgorithm = "mt19937_64 seeded by splitmix64(base_seed, sample)";

SampleRng make_sample_rng(std::uint64_t base_seed, std::uint64_t sample_index);

enum class BacklogKnowledge { exact, estimated };

struct SlotObservation {
  int idle = 0;
  int singleton = 0;
  int collision = 0;

  bool operator==(const SlotObservation&) const = default;
};

struct SlotOutcome {
  int successes = 0;
  int admitted = 0;
  int collided_devices = 0;
  SlotObservation observation;
};

/// One PRACH slot: every backlogged device passes the barring check with
/// probability p, admitted devices pick a preamble uniformly, singleton
/// preambles are served.
SlotOutcome run_slot(int backlog, double access_probability, int preambles, SampleRng& rng);

struct EstimatorState {
  double backlog_estimate = 0.0;
};

/// Pseudo-Bayesian backlog update from one slot's idle/singleton/collision
/// counts.
///
/// Devices that were barred stay in the estimate ((1 - p) B). Admitted
/// devices are modelled as Poisson with per-preamble load nu; a collided
/// preamble is credited with E[x | x >= 2] = nu (1 - e^-nu) / (1 - (1 + nu) e^-nu)
/// devices, which all remain backlogged. nu comes from the prior (p B / M),
/// raised to the idle-count estimate -ln(1/(2M)) when no preamble was idle.
/// Singletons leave. `arrivals` adds known new devices.
EstimatorState estimator_update(const EstimatorState& state, const SlotObservation& observation,
                                double access_probability, int preambles, double arrivals = 0.0);

/// E[x | x >= 2] for x ~ Poisson(load).
double collided_preamble_occupancy(double load);

struct SimConfig {
  ScenarioParams scenario;
  BarringPolicy policy = BarringPolicy::dynamic_optimal();
  BacklogKnowledge knowledge = BacklogKnowledge::exact;
  std::int64_t samples = 100000;
  std::uint64_t base_seed = 1;
  int max_slots = 1000;
  int workers = 1;
  /// Starting estimate for estimated knowledge; negative means M (the base
  /// station starts with no information and admits everyone).
  double initial_estimate = -1.0;

  void validate() const;
  /// "static:<p>", "dynamic" or "dynamic-est".
  std::string policy_label() const;
};

struct SimTrajectory {
  std::vector<int> backlog;       // B(0..T)
  std::vector<int> departures;    // D(0, i), i = 0..T
  std::vector<SlotObservation> observations;
  std::vector<double> access_probabilities;
  std::vector<double> estimates;  // estimate used before each slot (estimated knowledge only)

  /// First slot i with B(i) <= target, or -1 if never within the horizon.
  int resolution_time(int backlog_target) const;
};

/// Runs one burst for up to config.max_slots slots or until the backlog is 0.
SimTrajectory simulate_burst(const SimConfig& config, SampleRng& rng);

/// Counts of per-sample resolution times for one target backlog:
/// counts[i] samples first reached B <= target at slot i; `censored` never did
/// within the horizon.
struct ResolutionHistogram {
  int backlog_target = 0;
  std::int64_t samples = 0;
  std::vector<std::int64_t> counts;
  std::int64_t censored = 0;

  /// Samples with B(t) > target.
  std::int64_t exceeding(int slots) const;
};

std::vector<ResolutionHistogram> resolution_histograms(const SimConfig& config,
                                                       std::span<const int> backlog_targets);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Two-sided Clopper-Pearson interval for `hits` successes out of `trials`.
ConfidenceInterval clopper_pearson(std::int64_t hits, std::int64_t trials,
                                   double confidence = 0.99);

struct CcdfPoint {
  int slots = 0;
  double eps = 0.0;
  std::int64_t hits = 0;
  ConfidenceInterval ci;
};

std::vector<CcdfPoint> ccdf_from_histogram(const ResolutionHistogram& histogram,
                                           std::span<const int> slot_grid,
                                           double confidence = 0.99);

/// Empirical P[B(t) > b_eps] on `slot_grid` with 99% Clopper-Pearson bounds.
std::vector<CcdfPoint> monte_carlo_ccdf(const SimConfig& config, int backlog_target,
                                        std::span<const int> slot_grid);

}  // namespace rachbound
