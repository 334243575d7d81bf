#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>

#include "sbpsat/errors.hpp"
#include "sbpsat/grid.hpp"

namespace sbpsat {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// 1D diagonal-norm operator bundle for one grid line.
//   D1 = H^{-1} Q,   Q + Q^T = B = diag(-1,0,...,0,1)
//   D2 = H^{-1} (-M + B S),  M symmetric, M - h*alpha*(BS)^T(BS) >= 0
struct SbpOperatorSet {
  int order = 0;
  int n = 0;
  double h = 0;
  VectorXd H;    // diagonal entries, scale h
  MatrixXd D1;
  MatrixXd Q;
  MatrixXd D2;
  MatrixXd M;
  MatrixXd S;    // boundary-derivative rows at 0 and n-1, identity elsewhere
  double alpha = 0;
  int closure_rows = 0;

  MatrixXd B() const {
    MatrixXd b = MatrixXd::Zero(n, n);
    b(0, 0) = -1;
    b(n - 1, n - 1) = 1;
    return b;
  }
};

namespace detail {

inline SbpOperatorSet build_order2(const GridLine1D& g) {
  const int n = g.n;
  const double h = g.h;
  SbpOperatorSet s;
  s.order = 2; s.n = n; s.h = h; s.alpha = 0.4; s.closure_rows = 1;
  s.H = VectorXd::Constant(n, h);
  s.H(0) = s.H(n - 1) = 0.5 * h;
  s.D1 = MatrixXd::Zero(n, n);
  for (int i = 1; i < n - 1; ++i) { s.D1(i, i - 1) = -0.5; s.D1(i, i + 1) = 0.5; }
  s.D1(0, 0) = -1; s.D1(0, 1) = 1;
  s.D1(n - 1, n - 2) = -1; s.D1(n - 1, n - 1) = 1;
  s.D1 /= h;
  s.D2 = MatrixXd::Zero(n, n);
  for (int i = 1; i < n - 1; ++i) { s.D2(i, i - 1) = 1; s.D2(i, i) = -2; s.D2(i, i + 1) = 1; }
  s.D2(0, 0) = 1; s.D2(0, 1) = -2; s.D2(0, 2) = 1;
  s.D2(n - 1, n - 3) = 1; s.D2(n - 1, n - 2) = -2; s.D2(n - 1, n - 1) = 1;
  s.D2 /= h * h;
  s.S = MatrixXd::Identity(n, n);
  s.S(0, 0) = -1.5 / h; s.S(0, 1) = 2.0 / h; s.S(0, 2) = -0.5 / h;
  s.S(n - 1, n - 3) = 0.5 / h; s.S(n - 1, n - 2) = -2.0 / h; s.S(n - 1, n - 1) = 1.5 / h;
  return s;
}

inline SbpOperatorSet build_order4(const GridLine1D& g) {
  const int n = g.n;
  const double h = g.h;
  SbpOperatorSet s;
  s.order = 4; s.n = n; s.h = h; s.alpha = 0.2508560249; s.closure_rows = 4;
  s.H = VectorXd::Constant(n, h);
  const double hw[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
  for (int i = 0; i < 4; ++i) { s.H(i) = hw[i] * h; s.H(n - 1 - i) = hw[i] * h; }
  s.D1 = MatrixXd::Zero(n, n);
  const double c1[5] = {1.0 / 12, -2.0 / 3, 0, 2.0 / 3, -1.0 / 12};
  for (int i = 4; i < n - 4; ++i)
    for (int k = 0; k < 5; ++k) s.D1(i, i - 2 + k) = c1[k];
  const double b1[4][6] = {
      {-24.0 / 17, 59.0 / 34, -4.0 / 17, -3.0 / 34, 0, 0},
      {-1.0 / 2, 0, 1.0 / 2, 0, 0, 0},
      {4.0 / 43, -59.0 / 86, 0, 59.0 / 86, -4.0 / 43, 0},
      {3.0 / 98, 0, -59.0 / 98, 0, 32.0 / 49, -4.0 / 49}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) {
      s.D1(i, j) = b1[i][j];
      s.D1(n - 1 - i, n - 1 - j) = -b1[i][j];
    }
  s.D1 /= h;
  s.D2 = MatrixXd::Zero(n, n);
  const double c2[5] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
  for (int i = 4; i < n - 4; ++i)
    for (int k = 0; k < 5; ++k) s.D2(i, i - 2 + k) = c2[k];
  const double b2[4][6] = {
      {2, -5, 4, -1, 0, 0},
      {1, -2, 1, 0, 0, 0},
      {-4.0 / 43, 59.0 / 43, -110.0 / 43, 59.0 / 43, -4.0 / 43, 0},
      {-1.0 / 49, 0, 59.0 / 49, -118.0 / 49, 64.0 / 49, -4.0 / 49}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) {
      s.D2(i, j) = b2[i][j];
      s.D2(n - 1 - i, n - 1 - j) = b2[i][j];
    }
  s.D2 /= h * h;
  s.S = MatrixXd::Identity(n, n);
  const double bs[4] = {-11.0 / 6, 3, -3.0 / 2, 1.0 / 3};
  for (int j = 0; j < 4; ++j) {
    s.S(0, j) = bs[j] / h;
    s.S(n - 1, n - 1 - j) = -bs[j] / h;
  }
  return s;
}

inline void finish_derived(SbpOperatorSet& s) {
  s.Q = s.H.asDiagonal() * s.D1;
  s.M = -(s.H.asDiagonal() * s.D2) + s.B() * s.S;
}

}  // namespace detail

struct SbpVerifyReport {
  double qqt_b = 0;          // ||Q+Q^T-B||_max / h
  double m_symmetry = 0;
  std::map<std::string, double> monomial;  // e.g. "D1_interior_deg2"
  double max_residual() const {
    double m = std::max(qqt_b, m_symmetry);
    for (auto& [k, v] : monomial) m = std::max(m, v);
    return m;
  }
};

inline SbpVerifyReport verify_sbp_identities(const SbpOperatorSet& s) {
  SbpVerifyReport r;
  r.qqt_b = (s.Q + s.Q.transpose() - s.B()).cwiseAbs().maxCoeff() / s.h;
  r.m_symmetry = (s.M - s.M.transpose()).cwiseAbs().maxCoeff();
  const int p = s.order / 2;
  const int w = std::max(s.closure_rows, s.order / 2 + 1) + s.order;
  VectorXd x(s.n);
  for (int i = 0; i < s.n; ++i) x(i) = i * s.h;  // origin-free: exactness is shift-invariant
  auto mono = [&](int deg) {
    VectorXd f(s.n);
    for (int i = 0; i < s.n; ++i) f(i) = std::pow(x(i), deg);
    return f;
  };
  auto dmono = [&](int deg, int der) {
    VectorXd f = VectorXd::Zero(s.n);
    double c = 1;
    for (int k = 0; k < der; ++k) c *= deg - k;
    if (deg >= der)
      for (int i = 0; i < s.n; ++i) f(i) = c * std::pow(x(i), deg - der);
    return f;
  };
  for (int deg = 0; deg <= s.order; ++deg) {
    VectorXd e1 = s.D1 * mono(deg) - dmono(deg, 1);
    VectorXd e2 = s.D2 * mono(deg) - dmono(deg, 2);
    double scale = std::pow((s.n - 1) * s.h, std::max(0, deg - 1));
    if (deg <= s.order)
      r.monomial["D1_interior_deg" + std::to_string(deg)] =
          e1.segment(w, s.n - 2 * w).cwiseAbs().maxCoeff() / scale;
    r.monomial["D2_interior_deg" + std::to_string(deg)] =
        e2.segment(w, s.n - 2 * w).cwiseAbs().maxCoeff() / scale;
    if (deg <= p) {
      r.monomial["D1_boundary_deg" + std::to_string(deg)] = e1.cwiseAbs().maxCoeff() / scale;
      r.monomial["D2_boundary_deg" + std::to_string(deg)] = e2.cwiseAbs().maxCoeff() / scale;
    }
    if (deg <= p + 1) {
      VectorXd sf = s.S * mono(deg);
      VectorXd d1 = dmono(deg, 1);
      r.monomial["S_deg" + std::to_string(deg)] =
          std::max(std::abs(sf(0) - d1(0)), std::abs(sf(s.n - 1) - d1(s.n - 1))) / scale;
    }
  }
  return r;
}

// Smallest eigenvalue of the Lemma-1 remainder M - h*alpha*(BS)^T(BS).
inline double verify_borrowing(const SbpOperatorSet& s, double alpha_override = -1) {
  const double a = alpha_override > 0 ? alpha_override : s.alpha;
  MatrixXd BS = s.B() * s.S;
  MatrixXd R = s.M - s.h * a * BS.transpose() * BS;
  MatrixXd Rs = 0.5 * (R + R.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Rs, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double quadrature(const SbpOperatorSet& s, const VectorXd& samples) {
  if (samples.size() != s.n) throw LengthMismatch(samples.size(), s.n);
  return s.H.dot(samples);
}

// Orders 6-10 would come from coefficient data files; none are shipped, so
// those orders report UnsupportedOrder here.  See load_sbp_coefficients in
// coeff_io.hpp for the file-driven path.
inline SbpOperatorSet build_sbp(int order, const GridLine1D& grid) {
  if (order != 2 && order != 4) {
    if (order == 6 || order == 8 || order == 10)
      throw UnsupportedOrder(order);  // no embedded coefficients; use coefficient files
    throw UnsupportedOrder(order);
  }
  const int need = 2 * (order == 2 ? 3 : 6) + 1;
  if (grid.n < need) throw GridTooSmall(grid.n, need);
  SbpOperatorSet s = order == 2 ? detail::build_order2(grid) : detail::build_order4(grid);
  detail::finish_derived(s);
  return s;
}

}  // namespace sbpsat
