#include "rachbound/snc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include <boost/math/distributions/poisson.hpp>

namespace rachbound {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> logs) {
  double peak = kNegInf;
  for (double l : logs) peak = std::max(peak, l);
  if (peak == kNegInf) return kNegInf;
  if (peak == std::numeric_limits<double>::infinity()) return peak;
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - peak);
  return peak + std::log(acc);
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

BoundResult trivial_result(double value, const ThetaSearch& search) {
  BoundResult r;
  r.value = value;
  r.theta_star = search.theta_min;
  r.trivial = true;
  return r;
}

// Shared post-processing of an eps-type search on log(eps).
BoundResult eps_result(const ThetaMinimum& m) {
  BoundResult r;
  r.theta_star = m.theta;
  r.local_min_certified = m.local_min_certified;
  r.diagnostics = m.grid;
  const double raw = std::exp(m.objective);
  r.clamped = !(raw < 1.0);
  r.value = r.clamped ? 1.0 : raw;
  r.converged = !m.at_upper_edge || r.clamped;
  return r;
}

}  // namespace

void QosRequirement::validate() const {
  if (backlog_target < 0) throw std::invalid_argument("target backlog b_eps must be >= 0");
  if (slots < 1) throw std::invalid_argument("resolution deadline t must be >= 1 slot");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

void SplitConfig::validate() const {
  if (!(c > 1.0) || !std::isfinite(c)) throw std::invalid_argument("split parameter c must be > 1");
}

int SplitConfig::boundary(int preambles) const {
  validate();
  return static_cast<int>(std::ceil(c * preambles));
}

double arrival_log_mgf(double theta, int devices) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  return theta * devices;
}

// --- static barring -------------------------------------------------------

StaticBoundModel::StaticBoundModel(const ScenarioParams& params, double access_probability,
                                   int max_slots)
    : params_(params) {
  params.require_delta();
  if (max_slots < 0) throw std::invalid_argument("slot count must be >= 0");
  const auto trajectory =
      backlog_trajectory(params, BarringPolicy::fixed(access_probability), max_slots);
  service_.reserve(trajectory.size());
  log_service_.reserve(trajectory.size());
  for (const auto& step : trajectory) {
    const auto masses = step.pmf.masses();
    std::vector<double> served(masses.rbegin(), masses.rend());
    std::vector<double> logs(served.size());
    std::transform(served.begin(), served.end(), logs.begin(),
                   [](double m) { return m > 0.0 ? std::log(m) : kNegInf; });
    service_.emplace_back(params.devices - step.pmf.max_support(), std::move(served));
    log_service_.push_back(std::move(logs));
  }
}

double StaticBoundModel::service_log_mgf(double theta, int slots) const {
  if (slots < 0 || slots > max_slots()) throw std::out_of_range("slot count outside model horizon");
  const Pmf& law = service_[static_cast<std::size_t>(slots)];
  const auto& logs = log_service_[static_cast<std::size_t>(slots)];
  std::vector<double> terms(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    terms[i] = logs[i] - theta * static_cast<double>(law.offset() + static_cast<std::int64_t>(i));
  }
  return std::min(0.0, log_sum_exp(terms));
}

double StaticBoundModel::log_envelope(double theta, int slots) const {
  double acc = arrival_log_mgf(theta, params_.devices) + service_log_mgf(theta, slots);
  for (int window = 1; window < slots; ++window) acc = log_add(acc, service_log_mgf(theta, window));
  return acc;
}

BoundResult StaticBoundModel::violation(int slots, int backlog_target,
                                        const ThetaSearch& search) const {
  if (backlog_target < 0) throw std::invalid_argument("target backlog must be >= 0");
  if (slots < 0 || slots > max_slots()) throw std::out_of_range("slot count outside model horizon");
  if (backlog_target >= params_.devices) return trivial_result(0.0, search);
  const double b = backlog_target;
  const auto m = minimize_over_theta(
      [&](double theta) { return -b * theta + log_envelope(theta, slots); }, search);
  return eps_result(m);
}

BoundResult StaticBoundModel::backlog(int slots, double eps, const ThetaSearch& search) const {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (slots < 0 || slots > max_slots()) throw std::out_of_range("slot count outside model horizon");
  const double log_eps = std::log(eps);
  const auto m = minimize_over_theta(
      [&](double theta) { return (log_envelope(theta, slots) - log_eps) / theta; }, search);
  BoundResult r;
  r.theta_star = m.theta;
  r.local_min_certified = m.local_min_certified;
  r.diagnostics = m.grid;
  const double n = params_.devices;
  r.value = std::clamp(m.objective, 0.0, n);
  r.clamped = r.value != m.objective;
  r.converged = !m.at_upper_edge || r.clamped;
  return r;
}

double static_service_log_mgf(double theta, const ScenarioParams& params,
                              double access_probability, int slots) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  return StaticBoundModel(params, access_probability, slots).service_log_mgf(theta, slots);
}

BoundResult static_backlog_bound(const ScenarioParams& params, double access_probability,
                                 int slots, double eps, const ThetaSearch& search) {
  return StaticBoundModel(params, access_probability, slots).backlog(slots, eps, search);
}

BoundResult static_violation_bound(const ScenarioParams& params, double access_probability,
                                   int slots, int backlog_target, const ThetaSearch& search) {
  return StaticBoundModel(params, access_probability, slots)
      .violation(slots, backlog_target, search);
}

// --- dynamic barring ------------------------------------------------------

namespace {

Pmf poisson_mixed_service(int preambles, double truncation_mass) {
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  if (!(truncation_mass > 0.0 && truncation_mass <= 1e-12)) {
    throw std::invalid_argument("Poisson truncation mass must lie in (0, 1e-12]");
  }
  const boost::math::poisson_distribution<double> admitted(preambles);
  std::vector<double> weights;
  double tail = 1.0;
  for (int x = 0; tail >= truncation_mass; ++x) {
    weights.push_back(boost::math::pdf(admitted, x));
    tail = boost::math::cdf(boost::math::complement(admitted, static_cast<double>(x)));
  }
  OccupancyTable table(preambles);
  Pmf mixed = mix_success(Pmf(0, std::move(weights)), table);
  std::vector<double> masses(mixed.masses().begin(), mixed.masses().end());
  masses[0] += tail;
  return Pmf(0, std::move(masses));
}

}  // namespace

PoissonSlotService::PoissonSlotService(int preambles, double truncation_mass)
    : preambles_(preambles), law_(poisson_mixed_service(preambles, truncation_mass)) {}

double PoissonSlotService::log_mgf(double theta) const {
  const auto q = law_.masses();
  std::vector<double> terms(q.size());
  for (std::size_t k = 0; k < q.size(); ++k) {
    terms[k] = q[k] > 0.0 ? std::log(q[k]) - theta * static_cast<double>(k) : kNegInf;
  }
  return std::min(0.0, log_sum_exp(terms));
}

double PoissonSlotService::log_one_minus_mgf(double theta) const {
  const auto q = law_.masses();
  double acc = 0.0;
  for (std::size_t k = 1; k < q.size(); ++k) acc -= q[k] * std::expm1(-theta * static_cast<double>(k));
  return std::log(acc);
}

double dynamic_slot_log_mgf(double theta, int preambles, double truncation_mass) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
  return PoissonSlotService(preambles, truncation_mass).log_mgf(theta);
}

PartialBoundModel::PartialBoundModel(int devices, int preambles)
    : devices_(devices), service_(preambles) {
  if (devices < 1) throw std::invalid_argument("device count N must be >= 1");
}

double PartialBoundModel::log_objective(double theta, int backlog_target, int slots) const {
  const double log_m = service_.log_mgf(theta);
  const double arrivals = arrival_log_mgf(theta, devices_) + slots * log_m;
  double geometric = kNegInf;
  if (slots >= 2) {
    // Mbar (1 - Mbar^(t-1)) / (1 - Mbar), all in logs.
    geometric = log_m + std::log(-std::expm1((slots - 1) * log_m)) -
                service_.log_one_minus_mgf(theta);
  }
  return -theta * backlog_target + log_add(arrivals, geometric);
}

BoundResult PartialBoundModel::violation(int backlog_target, int slots,
                                         const ThetaSearch& search) const {
  const int m = preambles();
  if (backlog_target < m) {
    throw std::invalid_argument("partial-resolution bound needs b_eps >= M (b_eps = " +
                                std::to_string(backlog_target) + ", M = " + std::to_string(m) +
                                "); use the full-resolution bound for b_eps = 0");
  }
  if (slots < 0) throw std::invalid_argument("slot count must be >= 0");
  if (backlog_target >= devices_) return trivial_result(0.0, search);
  if (slots == 0) return trivial_result(1.0, search);
  auto r = eps_result(minimize_over_theta(
      [&](double theta) { return log_objective(theta, backlog_target, slots); }, search));
  if (backlog_target < SplitConfig{}.boundary(m)) {
    r.notes.push_back("b_eps below 3M: the Poisson admission approximation is very conservative");
  }
  return r;
}

BoundResult partial_violation_bound(int devices, int preambles, int backlog_target, int slots,
                                    const ThetaSearch& search) {
  return PartialBoundModel(devices, preambles).violation(backlog_target, slots, search);
}

FullBoundModel::FullBoundModel(int devices, int preambles, SplitConfig split, int max_slots,
                               const ThetaSearch& search)
    : devices_(devices),
      preambles_(preambles),
      boundary_(split.boundary(preambles)),
      max_slots_(max_slots),
      degenerate_(boundary_ >= devices) {
  if (devices < 1) throw std::invalid_argument("device count N must be >= 1");
  if (max_slots < 0) throw std::invalid_argument("slot count must be >= 0");
  search.validate();
  const auto policy = BarringPolicy::dynamic_optimal();
  const int horizon = std::max(1, max_slots);
  region2_ = first_passage_dist(degenerate_ ? devices : boundary_, 0, policy, preambles, horizon);
  if (!degenerate_) {
    const PartialBoundModel partial(devices, preambles);
    region1_.reserve(static_cast<std::size_t>(max_slots) + 1);
    for (int s = 0; s <= max_slots; ++s) region1_.push_back(partial.violation(boundary_, s, search));
  }
}

BoundResult FullBoundModel::violation(int slots) const {
  if (slots < 0 || slots > max_slots_) throw std::out_of_range("slot count outside model horizon");
  const auto hits = region2_.masses();
  // P[T2 > t]: unresolved mass plus hits after t.
  double late = region2_.residual();
  for (std::size_t x = static_cast<std::size_t>(slots) + 1; x < hits.size(); ++x) late += hits[x];

  BoundResult r;
  if (degenerate_) {
    r.value = std::min(1.0, late);
    r.trivial = true;
    r.notes.push_back("ceil(c M) >= N: exact first-passage tail");
    return r;
  }
  double acc = late;
  double heaviest = -1.0;
  r.theta_star = region1_.front().theta_star;
  for (int x = 0; x <= slots && static_cast<std::size_t>(x) < hits.size(); ++x) {
    const BoundResult& tail = region1_[static_cast<std::size_t>(slots - x)];
    const double term = hits[static_cast<std::size_t>(x)] * tail.value;
    acc += term;
    if (term > heaviest && !tail.trivial) {
      heaviest = term;
      r.theta_star = tail.theta_star;
    }
    r.converged = r.converged && tail.converged;
  }
  r.clamped = !(acc < 1.0);
  r.value = r.clamped ? 1.0 : acc;
  return r;
}

BoundResult full_violation_bound(int devices, int preambles, SplitConfig split, int slots,
                                 const ThetaSearch& search) {
  if (slots < 1) throw std::invalid_argument("resolution deadline t must be >= 1 slot");
  return FullBoundModel(devices, preambles, split, slots, search).violation(slots);
}

DimensioningResult max_supported_devices(int preambles, const QosRequirement& qos,
                                         SplitConfig split, const ThetaSearch& search,
                                         int device_cap) {
  qos.validate();
  split.validate();
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  if (qos.backlog_target > 0 && qos.backlog_target < preambles) {
    throw std::invalid_argument(
        "dimensioning needs b_eps = 0 (full resolution) or b_eps >= M (partial resolution)");
  }

  DimensioningResult out;
  auto bound = [&](int n) {
    const double v = qos.backlog_target == 0
                         ? full_violation_bound(n, preambles, split, qos.slots, search).value
                         : partial_violation_bound(n, preambles, qos.backlog_target, qos.slots,
                                                   search)
                               .value;
    out.probes.emplace_back(n, v);
    return v;
  };

  double last = bound(1);
  if (last > qos.eps) return out;

  int good = 1;
  int bad = 0;
  for (long long probe = 2; probe <= device_cap; probe *= 2) {
    const double v = bound(static_cast<int>(probe));
    if (v < last) out.monotone = false;
    last = v;
    if (v > qos.eps) {
      bad = static_cast<int>(probe);
      break;
    }
    good = static_cast<int>(probe);
  }
  if (bad == 0) {
    out.max_devices = good;
    return out;
  }
  while (bad - good > 1) {
    const int mid = good + (bad - good) / 2;
    if (bound(mid) <= qos.eps) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  out.max_devices = good;
  return out;
}

}  // namespace rachbound
