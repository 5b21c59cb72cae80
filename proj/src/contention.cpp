#include "rachbound/contention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rachbound {

void ContentionParams::validate() const {
  if (preambles < 1) {
    throw std::invalid_argument("preamble count must be >= 1, got " + std::to_string(preambles));
  }
  if (!(access_probability > 0.0 && access_probability <= 1.0)) {
    throw std::invalid_argument("access probability must lie in (0, 1], got " +
                                std::to_string(access_probability));
  }
}

OccupancyTable::OccupancyTable(int preambles) : preambles_(preambles) {
  if (preambles < 1) {
    throw std::invalid_argument("preamble count must be >= 1");
  }
  const auto side = static_cast<std::size_t>(preambles + 1);
  state_.assign(side * side, 0.0);
  state_[0] = 1.0;
  rows_.push_back({1.0});
}

const std::vector<double>& OccupancyTable::row(int admitted) const {
  if (admitted < 0) {
    throw std::invalid_argument("admitted device count must be >= 0");
  }
  std::lock_guard lock(mutex_);
  extend_to(admitted);
  return rows_[static_cast<std::size_t>(admitted)];
}

void OccupancyTable::extend_to(int admitted) const {
  const int m = preambles_;
  const auto side = static_cast<std::size_t>(m + 1);
  const double inv_m = 1.0 / m;
  std::vector<double> next(state_.size());
  while (static_cast<int>(rows_.size()) <= admitted) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s <= m; ++s) {
      for (int c = 0; s + c <= m; ++c) {
        const double mass = state_[static_cast<std::size_t>(s) * side + static_cast<std::size_t>(c)];
        if (mass == 0.0) continue;
        const int idle = m - s - c;
        if (idle > 0) {
          next[static_cast<std::size_t>(s + 1) * side + static_cast<std::size_t>(c)] += mass * idle * inv_m;
        }
        if (s > 0) {
          next[static_cast<std::size_t>(s - 1) * side + static_cast<std::size_t>(c + 1)] += mass * s * inv_m;
        }
        if (c > 0) {
          next[static_cast<std::size_t>(s) * side + static_cast<std::size_t>(c)] += mass * c * inv_m;
        }
      }
    }
    state_.swap(next);

    const int placed = static_cast<int>(rows_.size());
    const int kmax = std::min(placed, m);
    std::vector<double> row(static_cast<std::size_t>(kmax + 1), 0.0);
    for (int s = 0; s <= kmax; ++s) {
      double acc = 0.0;
      for (int c = 0; s + c <= m; ++c) {
        acc += state_[static_cast<std::size_t>(s) * side + static_cast<std::size_t>(c)];
      }
      row[static_cast<std::size_t>(s)] = acc;
    }
    rows_.push_back(std::move(row));
  }
}

Pmf occupancy_success_dist(int admitted, int preambles) {
  if (admitted < 0) throw std::invalid_argument("admitted device count must be >= 0");
  OccupancyTable table(preambles);
  return Pmf(0, table.row(admitted));
}

Pmf admission_dist(int backlog, double access_probability) {
  if (backlog < 0) throw std::invalid_argument("backlog must be >= 0");
  if (!(access_probability > 0.0 && access_probability <= 1.0)) {
    throw std::invalid_argument("access probability must lie in (0, 1]");
  }
  if (backlog == 0) return Pmf::point(0);
  if (access_probability == 1.0) return Pmf::point(backlog);

  // Log-domain evaluation, then normalization. Ratios between masses are
  // accurate to a few ulps of lgamma, so rescaling removes the common error.
  const double n = backlog;
  const double log_p = std::log(access_probability);
  const double log_q = std::log1p(-access_probability);
  const double log_n_fact = std::lgamma(n + 1.0);
  std::vector<double> logs(static_cast<std::size_t>(backlog + 1));
  double peak = -INFINITY;
  for (int x = 0; x <= backlog; ++x) {
    const double l = log_n_fact - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * log_p +
                     (n - x) * log_q;
    logs[static_cast<std::size_t>(x)] = l;
    peak = std::max(peak, l);
  }
  std::vector<double> masses(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) masses[i] = std::exp(logs[i] - peak);
  const double total = compensated_sum(masses);
  for (double& m : masses) m /= total;
  return Pmf(0, std::move(masses));
}

Pmf mix_success(const Pmf& admissions, const OccupancyTable& table) {
  const int m = table.preambles();
  const auto hi = static_cast<int>(std::min<std::int64_t>(admissions.max_support(), m));
  std::vector<double> out(static_cast<std::size_t>(hi + 1), 0.0);
  const auto weights = admissions.masses();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto x = static_cast<int>(admissions.offset() + static_cast<std::int64_t>(i));
    const auto& row = table.row(x);
    for (std::size_t k = 0; k < row.size(); ++k) out[k] += w * row[k];
  }
  return Pmf(0, std::move(out), admissions.residual());
}

Pmf success_dist_given_backlog(int backlog, const ContentionParams& params) {
  params.validate();
  if (backlog < 0) throw std::invalid_argument("backlog must be >= 0");
  OccupancyTable table(params.preambles);
  return mix_success(admission_dist(backlog, params.access_probability), table);
}

double expected_success(double mean_admitted, int preambles) {
  if (!(mean_admitted >= 0.0)) throw std::invalid_argument("mean admitted count must be >= 0");
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  const double base = 1.0 - 1.0 / preambles;
  if (base == 0.0) {
    // Single preamble: the expression is 0^(E - 1), which diverges below one
    // admitted device on average; cap at the admitted mean there.
    if (mean_admitted == 1.0) return 1.0;
    return mean_admitted < 1.0 ? mean_admitted : 0.0;
  }
  return mean_admitted * std::pow(base, mean_admitted - 1.0);
}

double optimal_barring(double backlog_estimate, int preambles) {
  if (!(backlog_estimate >= 0.0)) throw std::invalid_argument("backlog estimate must be >= 0");
  if (preambles < 1) throw std::invalid_argument("preamble count must be >= 1");
  if (backlog_estimate == 0.0) return 1.0;
  return std::min(1.0, preambles / backlog_estimate);
}

}  // namespace rachbound
