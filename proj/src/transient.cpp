#include "rachbound/transient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rachbound {

namespace {

// Strips exact zeros at both ends of a mass vector on [offset, ...).
Pmf compact(std::int64_t offset, std::vector<double> masses, double residual = 0.0) {
  std::size_t lo = 0;
  std::size_t hi = masses.size();
  while (lo + 1 < hi && masses[lo] == 0.0) ++lo;
  while (hi - 1 > lo && masses[hi - 1] == 0.0) --hi;
  if (lo == 0 && hi == masses.size()) return Pmf(offset, std::move(masses), residual);
  std::vector<double> kept(masses.begin() + static_cast<std::ptrdiff_t>(lo),
                           masses.begin() + static_cast<std::ptrdiff_t>(hi));
  return Pmf(offset + static_cast<std::int64_t>(lo), std::move(kept), residual);
}

void require_delta(ArrivalModel arrivals) {
  if (arrivals != ArrivalModel::delta) {
    throw UnsupportedArrivalModel(
        "only delta (simultaneous) activation is supported; uniform and beta activation "
        "are not implemented");
  }
}

}  // namespace

void ScenarioParams::validate() const {
  if (devices < 1) throw std::invalid_argument("device count N must be >= 1");
  if (preambles < 1) throw std::invalid_argument("preamble count M must be >= 1");
  if (arrivals == ArrivalModel::delta && activation_span != 0) {
    throw std::invalid_argument("delta activation requires an activation span of 0 slots");
  }
  if (arrivals != ArrivalModel::delta && activation_span < 1) {
    throw std::invalid_argument("spread activation requires an activation span >= 1 slot");
  }
}

void ScenarioParams::require_delta() const {
  validate();
  rachbound::require_delta(arrivals);
}

BarringPolicy BarringPolicy::fixed(double access_probability) {
  if (!(access_probability > 0.0 && access_probability <= 1.0)) {
    throw std::invalid_argument("static access probability must lie in (0, 1]");
  }
  return BarringPolicy(Kind::fixed, access_probability);
}

BarringPolicy BarringPolicy::dynamic_optimal() { return BarringPolicy(Kind::dynamic_optimal, 1.0); }

double BarringPolicy::static_probability() const {
  if (!is_static()) throw std::logic_error("dynamic policy has no single access probability");
  return p_;
}

double BarringPolicy::probability(int backlog, int preambles) const {
  if (is_static()) return p_;
  return optimal_barring(backlog, preambles);
}

std::string BarringPolicy::describe() const {
  if (!is_static()) return "dynamic";
  std::ostringstream os;
  os << "static:" << p_;
  return os.str();
}

TransitionKernels::TransitionKernels(int preambles, BarringPolicy policy)
    : table_(preambles), policy_(policy) {}

const Pmf& TransitionKernels::at(int backlog) const {
  if (backlog < 0) throw std::invalid_argument("backlog must be >= 0");
  {
    std::lock_guard lock(mutex_);
    const auto idx = static_cast<std::size_t>(backlog);
    if (idx < kernels_.size() && kernels_[idx]) return *kernels_[idx];
  }
  // Computed outside the lock; a concurrent duplicate is discarded below.
  const double p = policy_.probability(backlog, table_.preambles());
  auto kernel = std::make_unique<Pmf>(mix_success(admission_dist(backlog, p), table_));
  std::lock_guard lock(mutex_);
  const auto idx = static_cast<std::size_t>(backlog);
  if (kernels_.size() <= idx) kernels_.resize(idx + 1);
  if (!kernels_[idx]) kernels_[idx] = std::move(kernel);
  return *kernels_[idx];
}

BacklogDistribution evolve(const BacklogDistribution& dist, const TransitionKernels& kernels) {
  const Pmf& cur = dist.pmf;
  if (cur.min_support() < 0) throw std::invalid_argument("backlog support must be non-negative");
  const std::int64_t lo = std::max<std::int64_t>(0, cur.min_support() - kernels.preambles());
  const std::int64_t hi = cur.max_support();
  std::vector<double> next(static_cast<std::size_t>(hi - lo + 1), 0.0);
  const auto masses = cur.masses();
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const double w = masses[i];
    if (w == 0.0) continue;
    const std::int64_t n = cur.offset() + static_cast<std::int64_t>(i);
    const Pmf& kernel = kernels.at(static_cast<int>(n));
    const auto ks = kernel.masses();
    for (std::size_t k = 0; k < ks.size(); ++k) {
      next[static_cast<std::size_t>(n - static_cast<std::int64_t>(k) - lo)] += w * ks[k];
    }
  }
  return {dist.slot + 1, compact(lo, std::move(next), cur.residual())};
}

BacklogDistribution evolve(const BacklogDistribution& dist, const BarringPolicy& policy,
                           int preambles, ArrivalModel arrivals) {
  require_delta(arrivals);
  TransitionKernels kernels(preambles, policy);
  return evolve(dist, kernels);
}

std::vector<BacklogDistribution> backlog_trajectory(const ScenarioParams& params,
                                                    const BarringPolicy& policy, int slots) {
  params.require_delta();
  if (slots < 0) throw std::invalid_argument("slot count must be >= 0");
  TransitionKernels kernels(params.preambles, policy);
  std::vector<BacklogDistribution> out;
  out.reserve(static_cast<std::size_t>(slots) + 1);
  out.push_back({0, Pmf::point(params.devices)});
  for (int t = 0; t < slots; ++t) out.push_back(evolve(out.back(), kernels));
  return out;
}

BacklogDistribution backlog_distribution(const ScenarioParams& params, const BarringPolicy& policy,
                                         int slots) {
  params.require_delta();
  if (slots < 0) throw std::invalid_argument("slot count must be >= 0");
  TransitionKernels kernels(params.preambles, policy);
  BacklogDistribution dist{0, Pmf::point(params.devices)};
  for (int t = 0; t < slots; ++t) dist = evolve(dist, kernels);
  return dist;
}

double exact_violation(const ScenarioParams& params, const BarringPolicy& policy, int slots,
                       int backlog_target) {
  if (backlog_target < 0 || backlog_target > params.devices) {
    throw std::invalid_argument("target backlog must lie in [0, N]");
  }
  return backlog_distribution(params, policy, slots).pmf.tail_above(backlog_target);
}

std::vector<double> violation_curve(const ScenarioParams& params, const BarringPolicy& policy,
                                    int max_slots, int backlog_target) {
  if (backlog_target < 0 || backlog_target > params.devices) {
    throw std::invalid_argument("target backlog must lie in [0, N]");
  }
  params.require_delta();
  if (max_slots < 0) throw std::invalid_argument("slot count must be >= 0");
  TransitionKernels kernels(params.preambles, policy);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(max_slots) + 1);
  BacklogDistribution dist{0, Pmf::point(params.devices)};
  out.push_back(dist.pmf.tail_above(backlog_target));
  for (int t = 0; t < max_slots; ++t) {
    dist = evolve(dist, kernels);
    out.push_back(dist.pmf.tail_above(backlog_target));
  }
  return out;
}

namespace {

Pmf first_passage_impl(int start_backlog, int target_backlog, const BarringPolicy& policy,
                       int preambles, int max_slots, double stop_below) {
  if (target_backlog < 0 || target_backlog >= start_backlog) {
    throw std::invalid_argument("first passage requires 0 <= target < start backlog");
  }
  if (max_slots < 1) throw std::invalid_argument("first passage horizon must be >= 1 slot");
  TransitionKernels kernels(preambles, policy);

  // Transient states target+1 .. start; everything at or below the target is
  // merged into one absorbing state and read off as the hitting-time mass.
  const int base = target_backlog + 1;
  std::vector<double> alive(static_cast<std::size_t>(start_backlog - base + 1), 0.0);
  alive.back() = 1.0;
  std::vector<double> next(alive.size());
  std::vector<double> hit{0.0};
  double unresolved = 1.0;
  for (int t = 1; t <= max_slots; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    double absorbed = 0.0;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      const double w = alive[i];
      if (w == 0.0) continue;
      const int n = base + static_cast<int>(i);
      const auto ks = kernels.at(n).masses();
      for (std::size_t k = 0; k < ks.size(); ++k) {
        const int m = n - static_cast<int>(k);
        if (m <= target_backlog) {
          absorbed += w * ks[k];
        } else {
          next[static_cast<std::size_t>(m - base)] += w * ks[k];
        }
      }
    }
    alive.swap(next);
    hit.push_back(absorbed);
    unresolved = compensated_sum(alive);
    if (unresolved < stop_below) break;
  }
  return Pmf(0, std::move(hit), std::max(0.0, unresolved));
}

}  // namespace

Pmf first_passage_dist(int start_backlog, int target_backlog, const BarringPolicy& policy,
                       int preambles, int max_slots) {
  return first_passage_impl(start_backlog, target_backlog, policy, preambles, max_slots, 0.0);
}

int first_passage_horizon_cap(int start_backlog, int preambles) {
  const double scale = std::ceil(std::numbers::e * start_backlog / preambles);
  return std::max(1, static_cast<int>(10.0 * scale));
}

Pmf first_passage_dist(int start_backlog, int target_backlog, const BarringPolicy& policy,
                       int preambles) {
  return first_passage_impl(start_backlog, target_backlog, policy, preambles,
                            first_passage_horizon_cap(start_backlog, preambles), 1e-12);
}

Pmf cumulative_service_dist(const ScenarioParams& params, double access_probability, int slots) {
  const auto policy = BarringPolicy::fixed(access_probability);
  const Pmf backlog = backlog_distribution(params, policy, slots).pmf;
  const auto masses = backlog.masses();
  std::vector<double> served(masses.rbegin(), masses.rend());
  return Pmf(params.devices - backlog.max_support(), std::move(served), backlog.residual());
}

}  // namespace rachbound
