#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "rachbound/contention.hpp"
#include "rachbound/pmf.hpp"

namespace rachbound {

/// Device activation pattern of a burst. Only `delta` (all devices active at
/// slot 0) is analyzed; the others are accepted as descriptions but rejected
/// by every engine.
enum class ArrivalModel { delta, uniform, beta };

class UnsupportedArrivalModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioParams {
  int devices = 1;
  int preambles = 1;
  ArrivalModel arrivals = ArrivalModel::delta;
  int activation_span = 0;  // T_A in PRACH slots

  void validate() const;
  /// validate() plus a rejection of anything but delta arrivals.
  void require_delta() const;
};

/// Access class barring policy: a fixed access probability, or the
/// throughput-optimal probability recomputed from the backlog every slot.
class BarringPolicy {
 public:
  enum class Kind { fixed, dynamic_optimal };

  static BarringPolicy fixed(double access_probability);
  static BarringPolicy dynamic_optimal();

  Kind kind() const { return kind_; }
  bool is_static() const { return kind_ == Kind::fixed; }
  double static_probability() const;

  /// Access probability used when `backlog` devices are waiting.
  double probability(int backlog, int preambles) const;

  /// "static:<p>" or "dynamic".
  std::string describe() const;

  bool operator==(const BarringPolicy&) const = default;

 private:
  BarringPolicy(Kind kind, double p) : kind_(kind), p_(p) {}

  Kind kind_;
  double p_;
};

struct BacklogDistribution {
  int slot = 0;
  Pmf pmf;
};

/// Lazily computed per-backlog success laws P[s = k | B = n] for one
/// (preamble count, policy) pair. Safe for concurrent use; returned
/// references stay valid for the lifetime of the cache.
class TransitionKernels {
 public:
  TransitionKernels(int preambles, BarringPolicy policy);

  int preambles() const { return table_.preambles(); }
  const BarringPolicy& policy() const { return policy_; }

  const Pmf& at(int backlog) const;

 private:
  OccupancyTable table_;
  BarringPolicy policy_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<Pmf>> kernels_;
};

BacklogDistribution evolve(const BacklogDistribution& dist, const TransitionKernels& kernels);
BacklogDistribution evolve(const BacklogDistribution& dist, const BarringPolicy& policy,
                           int preambles, ArrivalModel arrivals = ArrivalModel::delta);

BacklogDistribution backlog_distribution(const ScenarioParams& params, const BarringPolicy& policy,
                                         int slots);

/// Distributions of B(0), ..., B(slots) from one evolution pass.
std::vector<BacklogDistribution> backlog_trajectory(const ScenarioParams& params,
                                                    const BarringPolicy& policy, int slots);

/// P[B(t) > b].
double exact_violation(const ScenarioParams& params, const BarringPolicy& policy, int slots,
                       int backlog_target);

/// P[B(t) > b] for t = 0..max_slots.
std::vector<double> violation_curve(const ScenarioParams& params, const BarringPolicy& policy,
                                    int max_slots, int backlog_target);

/// Law of the first slot at which the backlog, started at `start_backlog`,
/// is at most `target_backlog`. Mass beyond `max_slots` is reported as the
/// residual of the returned Pmf (support starts at 0).
Pmf first_passage_dist(int start_backlog, int target_backlog, const BarringPolicy& policy,
                       int preambles, int max_slots);

/// As above with the horizon chosen automatically: the first slot where the
/// unresolved mass drops below 1e-12, capped at 10 * ceil(e * n0 / M) slots.
Pmf first_passage_dist(int start_backlog, int target_backlog, const BarringPolicy& policy,
                       int preambles);

int first_passage_horizon_cap(int start_backlog, int preambles);

/// Law of the cumulative service S(0, t) under a static policy. With all
/// devices active at slot 0, S(0, t) = N - B(t).
Pmf cumulative_service_dist(const ScenarioParams& params, double access_probability, int slots);

}  // namespace rachbound
