#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sbpsat/errors.hpp"
#include "sbpsat/sbp.hpp"

namespace sbpsat {

enum class PairKind { interpolation, projection_composed };

// Coarse<->fine trace transfer pair with the two side norms.
struct InterfaceOperatorPair {
  int order = 0;
  PairKind kind = PairKind::interpolation;
  MatrixXd I_c2f;   // n_f x n_c
  MatrixXd I_f2c;   // n_c x n_f
  VectorXd H_c;     // diagonal trace norms (scale h)
  VectorXd H_f;

  int nc() const { return static_cast<int>(I_c2f.cols()); }
  int nf() const { return static_cast<int>(I_c2f.rows()); }

  // ||H_f I_c2f - (H_c I_f2c)^T||_max, scaled by the fine trace weight.
  double compatibility_residual() const {
    MatrixXd d = H_f.asDiagonal() * I_c2f - (H_c.asDiagonal() * I_f2c).transpose();
    return d.cwiseAbs().maxCoeff() / H_f.maxCoeff();
  }

  double constant_residual() const {
    VectorXd one_c = VectorXd::Ones(nc()), one_f = VectorXd::Ones(nf());
    return std::max((I_c2f * one_c - one_f).cwiseAbs().maxCoeff(),
                    (I_f2c * one_f - one_c).cwiseAbs().maxCoeff());
  }
};

struct XiDiagnostics {
  double k_c = 0;  // min eig(Xi_L)/h_c
  double k_f = 0;  // min eig(Xi_R)/h_f
  VectorXd spectrum_c;
  VectorXd spectrum_f;
};

// Smallest eigenvalues of Xi_L = H_c(I - I_f2c I_c2f), Xi_R = H_f(I - I_c2f I_f2c),
// scaled by the respective trace spacings.
inline XiDiagnostics xi_diagnostics(const InterfaceOperatorPair& p, double h_c, double h_f) {
  XiDiagnostics d;
  MatrixXd XiL = p.H_c.asDiagonal() * (MatrixXd::Identity(p.nc(), p.nc()) - p.I_f2c * p.I_c2f);
  MatrixXd XiR = p.H_f.asDiagonal() * (MatrixXd::Identity(p.nf(), p.nf()) - p.I_c2f * p.I_f2c);
  const double tol = 1e-12;
  for (const MatrixXd* Xi : {&XiL, &XiR}) {
    double sym = (*Xi - Xi->transpose()).cwiseAbs().maxCoeff() / std::max(1.0, Xi->cwiseAbs().maxCoeff());
    if (sym > tol) throw SymmetryViolation(sym);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eL(0.5 * (XiL + XiL.transpose()));
  Eigen::SelfAdjointEigenSolver<MatrixXd> eR(0.5 * (XiR + XiR.transpose()));
  d.spectrum_c = eL.eigenvalues();
  d.spectrum_f = eR.eigenvalues();
  d.k_c = d.spectrum_c.minCoeff() / h_c;
  d.k_f = d.spectrum_f.minCoeff() / h_f;
  return d;
}

namespace detail {

// Diagonal norm weights (scale-free) of the 2p-order SBP norm on n points.
inline VectorXd norm_weights(int order, int n) {
  VectorXd w = VectorXd::Ones(n);
  if (order == 2) {
    w(0) = w(n - 1) = 0.5;
  } else if (order == 4) {
    const double hw[4] = {17.0 / 48, 59.0 / 48, 43.0 / 48, 49.0 / 48};
    for (int i = 0; i < 4; ++i) { w(i) = hw[i]; w(n - 1 - i) = hw[i]; }
  } else {
    throw UnsupportedOrder(order);
  }
  return w;
}

// Least-squares solve min||Sx - t|| subject to Ax = b, by nullspace elimination.
inline VectorXd constrained_lstsq(const MatrixXd& A, const VectorXd& b,
                                  const MatrixXd& S, const VectorXd& t) {
  Eigen::BDCSVD<MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  svd.setThreshold(1e-10);
  VectorXd x0 = svd.solve(b);
  if ((A * x0 - b).cwiseAbs().maxCoeff() > 1e-9)
    throw ConstraintSystemInfeasible("hard accuracy/compatibility equations inconsistent");
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > sv(0) * 1e-12) ++rank;
  MatrixXd N = svd.matrixV().rightCols(A.cols() - rank);
  if (N.cols() > 0) {
    Eigen::BDCSVD<MatrixXd> svd2(S * N, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd2.setThreshold(1e-10);  // drop noise-level directions of the soft system
    x0 += N * svd2.solve(t - S * x0);
  }
  return x0;
}

inline InterfaceOperatorPair interp_pair_order2(int nc, double hc) {
  const int nf = 2 * nc - 1;
  const double hf = hc / 2;
  InterfaceOperatorPair p;
  p.order = 2;
  p.kind = PairKind::interpolation;
  p.I_c2f = MatrixXd::Zero(nf, nc);
  for (int j = 0; j < nf; ++j) {
    if (j % 2 == 0) {
      p.I_c2f(j, j / 2) = 1.0;
    } else {
      p.I_c2f(j, (j - 1) / 2) = 0.5;
      p.I_c2f(j, (j + 1) / 2) = 0.5;
    }
  }
  p.H_c = norm_weights(2, nc) * hc;
  p.H_f = norm_weights(2, nf) * hf;
  p.I_f2c = p.H_c.cwiseInverse().asDiagonal() * p.I_c2f.transpose() * p.H_f.asDiagonal();
  return p;
}

// Fourth order: injection/cubic interior, edge closure rows 0..R-1 over
// columns 0..C-1 determined by exactness + compatibility constraints, with
// remaining freedom spent minimizing the leading (degree 2,3) error
// coefficients in a least-squares sense.  Right closure is the mirror image.
inline InterfaceOperatorPair interp_pair_order4(int nc, double hc) {
  const int R = 6, C = 6;
  const int nf = 2 * nc - 1;
  if (nc < 2 * R + 4) throw GridTooSmall(nc, 2 * R + 4);
  const double hf = hc / 2;
  // scale-free weights (fine side carries the fixed 1:2 ratio) keep the
  // closure solve independent of the grid size
  VectorXd wc = norm_weights(4, nc);
  VectorXd wf = 0.5 * norm_weights(4, nf);
  const double cub[4] = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};

  auto interior_row = [&](int j) {
    VectorXd r = VectorXd::Zero(nc);
    if (j % 2 == 0) {
      r(j / 2) = 1.0;
    } else {
      int i = (j - 1) / 2;
      for (int k = 0; k < 4; ++k) {
        int c = i - 1 + k;
        if (c >= 0 && c < nc) r(c) = cub[k];
      }
    }
    return r;
  };

  const int nv = R * C;
  std::vector<Eigen::RowVectorXd> eq_rows, ls_rows;
  std::vector<double> eq_rhs, ls_rhs;
  auto idx = [&](int j, int c) { return j * C + c; };

  // fine-row exactness (monomials centered at the target point): deg<=1 hard,
  // deg 2,3 minimized
  for (int j = 0; j < R; ++j) {
    for (int deg = 0; deg <= 3; ++deg) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      for (int c = 0; c < C; ++c) row(idx(j, c)) = std::pow(c - 0.5 * j, deg);
      double rhs = deg == 0 ? 1.0 : 0.0;
      if (deg <= 1) { eq_rows.push_back(row); eq_rhs.push_back(rhs); }
      else { ls_rows.push_back(row); ls_rhs.push_back(rhs); }
    }
  }
  // induced coarse rows I_f2c(i,.) = I_c2f(.,i) wf/wc(i): deg<=1 hard for
  // affected rows, full deg<=3 hard once outside the closure block
  for (int i = 0; i < C + 4; ++i) {
    for (int deg = 0; deg <= 3; ++deg) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      double b = wc(i) * (deg == 0 ? 1.0 : 0.0);
      for (int j = 0; j < nf; ++j) {
        double fj = std::pow(0.5 * j - i, deg);
        if (j < R && i < C) {
          row(idx(j, i)) = wf(j) * fj;
        } else {
          b -= interior_row(j)(i) * wf(j) * fj;
        }
      }
      bool hard = deg <= 1 || i >= C;
      if (hard) { eq_rows.push_back(row); eq_rhs.push_back(b); }
      else { ls_rows.push_back(row); ls_rhs.push_back(b); }
    }
  }
  MatrixXd A(eq_rows.size(), nv), Sm(ls_rows.size(), nv);
  VectorXd bv(eq_rhs.size()), tv(ls_rhs.size());
  for (size_t i = 0; i < eq_rows.size(); ++i) { A.row(i) = eq_rows[i]; bv(i) = eq_rhs[i]; }
  for (size_t i = 0; i < ls_rows.size(); ++i) { Sm.row(i) = ls_rows[i]; tv(i) = ls_rhs[i]; }
  VectorXd x = constrained_lstsq(A, bv, Sm, tv);

  InterfaceOperatorPair p;
  p.order = 4;
  p.kind = PairKind::interpolation;
  p.I_c2f = MatrixXd::Zero(nf, nc);
  for (int j = 0; j < nf; ++j) {
    if (j < R)
      for (int c = 0; c < C; ++c) p.I_c2f(j, c) = x(idx(j, c));
    else
      p.I_c2f.row(j) = interior_row(j).transpose();
  }
  for (int j = nf - R; j < nf; ++j)
    p.I_c2f.row(j) = p.I_c2f.row(nf - 1 - j).reverse();
  p.H_c = norm_weights(4, nc) * hc;
  p.H_f = norm_weights(4, nf) * hf;
  p.I_f2c = p.H_c.cwiseInverse().asDiagonal() * p.I_c2f.transpose() * p.H_f.asDiagonal();
  return p;
}

}  // namespace detail

inline InterfaceOperatorPair build_interpolation_pair(int order, int nc, double hc) {
  if (hc <= 0) throw NonpositiveInput("h_c");
  if (order == 2) {
    if (nc < 4) throw GridTooSmall(nc, 4);
    return detail::interp_pair_order2(nc, hc);
  }
  if (order == 4) return detail::interp_pair_order4(nc, hc);
  throw UnsupportedOrder(order);
}

}  // namespace sbpsat
