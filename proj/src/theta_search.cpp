#include "rachbound/theta_search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rachbound {

void ThetaSearch::validate() const {
  if (!(theta_min > 0.0 && theta_min < theta_max && std::isfinite(theta_max))) {
    throw std::invalid_argument("theta search requires 0 < theta_min < theta_max < inf");
  }
  if (grid_points < 16) throw std::invalid_argument("theta search grid needs at least 16 points");
  if (!(tolerance > 0.0 && tolerance < 1.0)) {
    throw std::invalid_argument("theta search tolerance must lie in (0, 1)");
  }
}

ThetaMinimum minimize_over_theta(const std::function<double(double)>& objective,
                                 const ThetaSearch& search) {
  search.validate();
  auto eval = [&](double log_theta) {
    const double v = objective(std::exp(log_theta));
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  const double lo = std::log(search.theta_min);
  const double hi = std::log(search.theta_max);
  const int n = search.grid_points;
  ThetaMinimum out;
  out.grid.reserve(static_cast<std::size_t>(n));
  std::size_t best = 0;
  for (int i = 0; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + (hi - lo) * i / (n - 1);
    const double theta = (i == n - 1) ? search.theta_max : std::exp(x);
    out.grid.push_back({theta, eval(x)});
    if (out.grid.back().objective < out.grid[best].objective) best = out.grid.size() - 1;
  }

  // Golden section in log(theta) over the bracket around the best grid point.
  double a = std::log(out.grid[best == 0 ? 0 : best - 1].theta);
  double b = std::log(out.grid[best + 1 == out.grid.size() ? best : best + 1].theta);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  const double stop = std::log1p(search.tolerance);
  while (b - a > stop) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }

  double x_star = fc <= fd ? c : d;
  double f_star = std::min(fc, fd);
  if (out.grid[best].objective <= f_star) {
    x_star = std::log(out.grid[best].theta);
    f_star = out.grid[best].objective;
  }
  out.theta = std::exp(x_star);
  out.objective = f_star;
  out.at_upper_edge = best + 1 == out.grid.size() && out.theta >= search.theta_max / (1.0 + 1e-4);

  const bool left_ok = best == 0 || f_star <= out.grid[best - 1].objective;
  const bool right_ok = best + 1 == out.grid.size() || f_star <= out.grid[best + 1].objective;
  out.local_min_certified = left_ok && right_ok;
  return out;
}

}  // namespace rachbound
