#pragma once

#include <span>
#include <vector>

namespace lfo {

/// Natural cubic spline through (x[i], y[i]) with strictly increasing x.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double at) const;

  /// Evaluates at 0, 1, ..., count - 1.
  std::vector<double> sample_integers(std::size_t count) const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> second_;  // second derivatives at the knots
};

}  // namespace lfo
