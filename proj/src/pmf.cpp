#include "rachbound/pmf.hpp"

#include <cmath>
#include <stdexcept>

namespace rachbound {

Pmf::Pmf() : offset_(0), masses_{1.0} {}

Pmf::Pmf(std::int64_t offset, std::vector<double> masses, double residual)
    : offset_(offset), masses_(std::move(masses)), residual_(residual) {
  if (masses_.empty()) {
    throw std::invalid_argument("Pmf: empty support");
  }
  for (double m : masses_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("Pmf: masses must be finite and non-negative");
    }
  }
  if (!(residual_ >= 0.0)) {
    throw std::invalid_argument("Pmf: residual must be non-negative");
  }
}

Pmf Pmf::point(std::int64_t value) { return Pmf(value, {1.0}); }

double Pmf::operator[](std::int64_t k) const {
  if (k < offset_ || k > max_support()) return 0.0;
  return masses_[static_cast<std::size_t>(k - offset_)];
}

double Pmf::total() const { return compensated_sum(masses_); }

double Pmf::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    acc += static_cast<double>(offset_ + static_cast<std::int64_t>(i)) * masses_[i];
  }
  return acc;
}

double Pmf::tail_above(std::int64_t k) const {
  if (k < offset_) return total();
  if (k >= max_support()) return 0.0;
  const auto first = static_cast<std::size_t>(k - offset_ + 1);
  return compensated_sum(std::span<const double>(masses_).subspan(first));
}

Pmf Pmf::trimmed(double drop_below, double renormalize_below) const {
  std::size_t lo = 0;
  std::size_t hi = masses_.size();
  while (lo + 1 < hi && masses_[lo] < drop_below) ++lo;
  while (hi - 1 > lo && masses_[hi - 1] < drop_below) --hi;
  if (lo == 0 && hi == masses_.size()) return *this;

  double dropped = 0.0;
  for (std::size_t i = 0; i < lo; ++i) dropped += masses_[i];
  for (std::size_t i = hi; i < masses_.size(); ++i) dropped += masses_[i];

  std::vector<double> kept(masses_.begin() + static_cast<std::ptrdiff_t>(lo),
                           masses_.begin() + static_cast<std::ptrdiff_t>(hi));
  double residual = residual_;
  if (dropped < renormalize_below) {
    const double kept_total = compensated_sum(kept);
    if (kept_total > 0.0) {
      const double scale = (kept_total + dropped) / kept_total;
      for (double& m : kept) m *= scale;
    }
  } else {
    residual += dropped;
  }
  return Pmf(offset_ + static_cast<std::int64_t>(lo), std::move(kept), residual);
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace rachbound
