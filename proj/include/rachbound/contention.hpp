#pragma once

#include <deque>
#include <mutex>
#include <vector>

#include "rachbound/pmf.hpp"

namespace rachbound {

/// Contention setting of a single PRACH slot.
struct ContentionParams {
  int preambles = 1;
  double access_probability = 1.0;

  /// Throws std::invalid_argument unless 1 <= preambles and 0 < p <= 1.
  void validate() const;
};

/// Law of the number of singleton preambles when `admitted` devices each pick
/// one of `preambles` preambles uniformly at random (collision channel
/// without capture: a preamble serves a device only when nobody else picked
/// it).
Pmf occupancy_success_dist(int admitted, int preambles);

/// Binomial(backlog, p) law of the number of devices passing the barring check.
Pmf admission_dist(int backlog, double access_probability);

/// P[k successes | backlog n] for one slot, mixing admissions and occupancy.
Pmf success_dist_given_backlog(int backlog, const ContentionParams& params);

/// Throughput approximation E[b'](1 - 1/M)^(E[b'] - 1) as a function of the
/// mean number of admitted devices.
double expected_success(double mean_admitted, int preambles);

/// Throughput-maximizing access probability min(1, M/B); 1 for an empty
/// backlog.
double optimal_barring(double backlog_estimate, int preambles);

/// Memoized occupancy distributions for one preamble count.
///
/// One DP sweep over devices placed yields the distributions for every
/// admitted count up to the sweep length, so rows are produced in order and
/// kept. The DP state is (singleton preambles, collided preambles); idle
/// preambles are implied. Thread-safe.
class OccupancyTable {
 public:
  explicit OccupancyTable(int preambles);

  int preambles() const { return preambles_; }

  /// Success masses for `admitted` devices, indexed by k in [0, min(x, M)].
  /// The returned reference stays valid for the lifetime of the table.
  const std::vector<double>& row(int admitted) const;

 private:
  void extend_to(int admitted) const;

  int preambles_;
  mutable std::mutex mutex_;
  // state_[s * (M + 1) + c] after rows_.size() - 1 devices placed.
  mutable std::vector<double> state_;
  mutable std::deque<std::vector<double>> rows_;
};

/// Single-slot success law mixed over an arbitrary admission law.
Pmf mix_success(const Pmf& admissions, const OccupancyTable& table);

}  // namespace rachbound
