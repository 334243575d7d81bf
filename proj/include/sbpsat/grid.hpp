#pragma once

#include <Eigen/Dense>

#include "sbpsat/errors.hpp"

namespace sbpsat {

// Equidistant 1D grid: x_i = x0 + i*h, i = 0..n-1.
struct GridLine1D {
  int n;
  double h;
  double x0;

  GridLine1D(int n_, double h_, double x0_ = 0.0) : n(n_), h(h_), x0(x0_) {
    if (n < 2) throw GridTooSmall(n, 2);
    if (h <= 0) throw NonpositiveInput("h");
  }

  double point(int i) const { return x0 + i * h; }

  Eigen::VectorXd points() const {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = point(i);
    return x;
  }

  static GridLine1D over(double a, double b, int n) {
    return GridLine1D(n, (b - a) / (n - 1), a);
  }
};

}  // namespace sbpsat
