#pragma once

#include <functional>
#include <vector>

namespace rachbound {

/// Search window and resolution for the free Chernoff parameter theta.
struct ThetaSearch {
  double theta_min = 1e-4;
  double theta_max = 50.0;
  int grid_points = 64;
  double tolerance = 1e-6;  // relative width of the final golden-section bracket

  void validate() const;
};

struct ThetaSample {
  double theta;
  double objective;
};

struct ThetaMinimum {
  double theta = 0.0;
  double objective = 0.0;
  /// The minimizer sits on theta_max: the objective may still be decreasing
  /// beyond the search window.
  bool at_upper_edge = false;
  /// objective(theta) <= objective at both grid neighbours of the best grid
  /// point (one neighbour on an edge).
  bool local_min_certified = false;
  std::vector<ThetaSample> grid;
};

/// Minimizes `objective` over [theta_min, theta_max]: a log-spaced grid
/// locates the basin, then golden-section search in log(theta) refines
/// between the best grid point's neighbours. NaN objective values count as
/// +infinity.
ThetaMinimum minimize_over_theta(const std::function<double(double)>& objective,
                                 const ThetaSearch& search);

}  // namespace rachbound
