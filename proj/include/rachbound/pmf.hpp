#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rachbound {

/// Finite probability mass function on a contiguous integer support
/// [offset, offset + masses.size()).
///
/// A Pmf either sums to one (normalized form) or carries the mass it does not
/// represent in `residual()`, e.g. a first-passage law truncated at a horizon.
/// Masses are never silently renormalized when the missing mass is material.
class Pmf {
 public:
  /// Point mass at zero.
  Pmf();
  Pmf(std::int64_t offset, std::vector<double> masses, double residual = 0.0);

  static Pmf point(std::int64_t value);

  std::int64_t offset() const { return offset_; }
  std::span<const double> masses() const { return masses_; }
  std::int64_t min_support() const { return offset_; }
  std::int64_t max_support() const {
    return offset_ + static_cast<std::int64_t>(masses_.size()) - 1;
  }

  /// P[X = k]; zero outside the stored support.
  double operator[](std::int64_t k) const;

  /// Sum of the stored masses (excludes the residual).
  double total() const;
  double residual() const { return residual_; }
  bool partial() const { return residual_ > 0.0; }

  double mean() const;
  /// P[X > k] over the stored masses; residual mass is not included.
  double tail_above(std::int64_t k) const;

  /// Drops leading and trailing masses below `drop_below`. When the dropped
  /// total is under `renormalize_below` the rest is rescaled to the previous
  /// total, otherwise the dropped mass moves into the residual.
  Pmf trimmed(double drop_below = 1e-15, double renormalize_below = 1e-12) const;

 private:
  std::int64_t offset_ = 0;
  std::vector<double> masses_;
  double residual_ = 0.0;
};

/// Sums with Neumaier compensation; the DP and kernel mixtures accumulate
/// thousands of terms of very different magnitude.
double compensated_sum(std::span<const double> values);

}  // namespace rachbound
