#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rachbound/pmf.hpp"
#include "rachbound/theta_search.hpp"
#include "rachbound/transient.hpp"

namespace rachbound {

/// QoS target (b_eps, t, eps): at most b_eps devices still unconnected after
/// t slots, violated with probability at most eps.
struct QosRequirement {
  int backlog_target = 0;
  int slots = 1;
  double eps = 1e-2;

  void validate() const;
};

/// Region split for the full-resolution bound: above ceil(c * M) the
/// network-calculus bound is used, below it the exact first-passage law.
struct SplitConfig {
  double c = 3.0;

  void validate() const;
  int boundary(int preambles) const;
};

struct BoundResult {
  /// eps-type results lie in [0, 1]; backlog-type results in [0, N].
  double value = 1.0;
  double theta_star = 0.0;
  bool clamped = false;
  /// False when the theta minimizer sits on theta_max and the value was not
  /// clamped: the search window was too small.
  bool converged = true;
  /// Value fixed in closed form (e.g. b >= N, t = 0); no theta search ran.
  bool trivial = false;
  bool local_min_certified = true;
  std::vector<ThetaSample> diagnostics;
  std::vector<std::string> notes;
};

/// log M_A(theta, 0, t) = theta * N for a burst of N simultaneous devices.
double arrival_log_mgf(double theta, int devices);

/// log E[exp(-theta * S(0, t))] under a static policy.
double static_service_log_mgf(double theta, const ScenarioParams& params,
                              double access_probability, int slots);

/// Static-barring bounds sharing one exact computation of the cumulative
/// service laws S(0, j), j = 0..max_slots.
///
/// The envelope sum over tau is
///   exp(theta N) * E[exp(-theta S(0, t))] + sum_{tau=1}^{t-1} E[exp(-theta S(0, t - tau))]
/// where the tau >= 1 terms (no arrivals after slot 0) take the service over a
/// window of length t - tau from the start of the burst. The tau = t term is
/// the deterministic zero-backlog case and carries no violation mass.
class StaticBoundModel {
 public:
  StaticBoundModel(const ScenarioParams& params, double access_probability, int max_slots);

  int devices() const { return params_.devices; }
  int max_slots() const { return static_cast<int>(service_.size()) - 1; }

  double service_log_mgf(double theta, int slots) const;
  double log_envelope(double theta, int slots) const;

  BoundResult violation(int slots, int backlog_target, const ThetaSearch& search = {}) const;
  BoundResult backlog(int slots, double eps, const ThetaSearch& search = {}) const;

 private:
  ScenarioParams params_;
  std::vector<Pmf> service_;
  std::vector<std::vector<double>> log_service_;
};

BoundResult static_backlog_bound(const ScenarioParams& params, double access_probability,
                                 int slots, double eps, const ThetaSearch& search = {});
BoundResult static_violation_bound(const ScenarioParams& params, double access_probability,
                                   int slots, int backlog_target,
                                   const ThetaSearch& search = {});

/// Single-slot service law when the admitted count is Poisson(M), the
/// backlog-independent stand-in for the optimal dynamic policy. Admission
/// mass beyond the truncation point is booked as zero service.
class PoissonSlotService {
 public:
  explicit PoissonSlotService(int preambles, double truncation_mass = 1e-12);

  int preambles() const { return preambles_; }
  const Pmf& law() const { return law_; }

  /// log E[exp(-theta s)].
  double log_mgf(double theta) const;
  /// log(1 - E[exp(-theta s)]), accurate for small theta.
  double log_one_minus_mgf(double theta) const;

 private:
  int preambles_;
  Pmf law_;
};

double dynamic_slot_log_mgf(double theta, int preambles, double truncation_mass = 1e-12);

/// Partial-resolution bound under dynamic barring for target backlogs b >= M.
class PartialBoundModel {
 public:
  PartialBoundModel(int devices, int preambles);

  int devices() const { return devices_; }
  int preambles() const { return service_.preambles(); }

  /// log of exp(-b theta) (exp(theta N) Mbar^t + Mbar (1 - Mbar^(t-1)) / (1 - Mbar)).
  double log_objective(double theta, int backlog_target, int slots) const;

  BoundResult violation(int backlog_target, int slots, const ThetaSearch& search = {}) const;

 private:
  int devices_;
  PoissonSlotService service_;
};

BoundResult partial_violation_bound(int devices, int preambles, int backlog_target, int slots,
                                    const ThetaSearch& search = {});

/// Full-resolution (b = 0) bound: the partial bound down to ceil(c M),
/// convolved with the exact first-passage law from ceil(c M) to zero.
/// Precomputes everything needed for t = 0..max_slots.
class FullBoundModel {
 public:
  FullBoundModel(int devices, int preambles, SplitConfig split, int max_slots,
                 const ThetaSearch& search = {});

  int boundary() const { return boundary_; }
  bool degenerate() const { return degenerate_; }
  int max_slots() const { return max_slots_; }

  BoundResult violation(int slots) const;

 private:
  int devices_;
  int preambles_;
  int boundary_;
  int max_slots_;
  bool degenerate_;
  Pmf region2_;                         // first passage boundary -> 0, or N -> 0 if degenerate
  std::vector<BoundResult> region1_;    // partial bound at the boundary, per slot count
};

BoundResult full_violation_bound(int devices, int preambles, SplitConfig split, int slots,
                                 const ThetaSearch& search = {});

struct DimensioningResult {
  int max_devices = 0;
  /// Bound values at the bracketing probes were non-decreasing in N.
  bool monotone = true;
  std::vector<std::pair<int, double>> probes;
};

/// Largest N whose bound meets `qos` (full resolution for b_eps = 0, partial
/// for b_eps >= M), by exponential bracketing and bisection.
DimensioningResult max_supported_devices(int preambles, const QosRequirement& qos,
                                         SplitConfig split = {}, const ThetaSearch& search = {},
                                         int device_cap = 1 << 22);

}  // namespace rachbound
