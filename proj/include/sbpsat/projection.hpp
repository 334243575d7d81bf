#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sbpsat/errors.hpp"
#include "sbpsat/interface.hpp"

namespace sbpsat {

// Piecewise-polynomial (per-cell orthonormal Legendre basis) projection
// machinery.  P_f2p maps n nodal values to coefficients of a piecewise
// degree-(2p-1) polynomial on the n-1 cells; the per-cell basis is
// phi_k = sqrt(2k+1) L_k(2(x-xc)/h), so every cell mass matrix is h*I.
// The construction enforces P_f2p^T M P_f2p = H exactly, which makes
// P_p2f = H^{-1} P_f2p^T M a left inverse and keeps every composed
// transfer operator norm-compatible and contraction-like (Xi >= 0).

namespace proj_detail {

struct GaussRule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
inline GaussRule gauss_legendre(int m) {
  GaussRule g;
  g.x.resize(m);
  g.w.resize(m);
  for (int i = 0; i < m; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = t;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (t * p1 - p0) / (t * t - 1);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1, p1 = t;
    for (int k = 2; k <= m; ++k) {
      double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = m * (t * p1 - p0) / (t * t - 1);
    g.x[m - 1 - i] = t;
    g.w[m - 1 - i] = 2.0 / ((1 - t * t) * dp * dp);
  }
  return g;
}

// phi_k(xi) = sqrt(2k+1) * L_k(xi)
inline double phi(int k, double xi) {
  double p0 = 1, p1 = xi;
  if (k == 0) return 1.0;
  for (int j = 2; j <= k; ++j) {
    double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * k + 1) * p1;
}

// Coefficients of ((x-xc)/h)^deg in the phi basis on a unit cell.
inline VectorXd monomial_coeffs(int deg, int q) {
  static const GaussRule g = gauss_legendre(12);
  VectorXd c = VectorXd::Zero(q);
  for (int k = 0; k < q; ++k) {
    double s = 0;
    for (size_t i = 0; i < g.x.size(); ++i)
      s += g.w[i] * std::pow(g.x[i] / 2, deg) * phi(k, g.x[i]);
    c(k) = 0.5 * s;
  }
  return c;
}

struct ProjConfig {
  int q;                      // modes per cell = order
  std::vector<int> taps;      // interior template column offsets
  int BC;                     // closure cells per side
  int BN;                     // closure column footprint per side
  MatrixXd T;                 // interior template, q x taps.size()
};

// Interior templates: exact on degree <= 2p-1 and exactly isometric
// (sum_m |A_m(theta)|^2 = 1 for all theta).  Solved offline from those
// conditions; the values below satisfy them to ~1e-16.
inline const ProjConfig& config(int order) {
  static const ProjConfig c2 = [] {
    ProjConfig c;
    c.q = 2;
    c.taps = {-1, 0, 1, 2};
    c.BC = 3;
    c.BN = 6;
    c.T.resize(2, 4);
    c.T << -2.86200247132232868e-02, 5.02526740806336525e-01,
           5.80806592526996623e-01, -5.47133086201099517e-02,
           8.61127238997926175e-02, -4.79084843371579472e-01,
           4.11156380448967962e-01, -1.81842609771810833e-02;
    return c;
  }();
  static const ProjConfig c4 = [] {
    ProjConfig c;
    c.q = 4;
    c.taps = {-2, -1, 0, 1, 2, 3};
    c.BC = 6;
    c.BN = 10;
    c.T.resize(4, 6);
    c.T << 7.62564798001862457e-03, -6.45171287889816508e-02,
           5.56812035355740309e-01, 5.57076853533148952e-01,
           -6.46495378776859447e-02, 7.65212979775948491e-03,
           -8.85467105997185186e-03, 4.90691873364435538e-02,
           -3.91593921097622033e-01, 3.91563080684296905e-01,
           -4.90229267164558127e-02, 8.83925085330927035e-03,
           -1.36756448427861541e-02, 5.97089041756763070e-02,
           -4.61774688373483982e-02, -4.56967704891522233e-02,
           5.94685550015782299e-02, -1.36275750079665383e-02,
           1.30220048160398297e-02, -6.80199074886816829e-02,
           1.38709877852584290e-01, -1.38230236786062249e-01,
           6.73004458888986218e-02, -1.27821842827788093e-02;
    return c;
  }();
  if (order == 2) return c2;
  if (order == 4) return c4;
  throw UnsupportedOrder(order);
}

// Full scale-free operator on n nodes from template + closure blocks.
inline MatrixXd assemble_full(int n, const ProjConfig& c, const MatrixXd& XL,
                              const MatrixXd& XR) {
  const int q = c.q, nc = n - 1;
  MatrixXd P = MatrixXd::Zero(nc * q, n);
  for (int cell = 0; cell < nc; ++cell) {
    if (cell < c.BC) {
      P.block(cell * q, 0, q, c.BN) = XL.block(cell * q, 0, q, c.BN);
    } else if (cell >= nc - c.BC) {
      int cr = (nc - 1) - cell;
      P.block(cell * q, n - c.BN, q, c.BN) = XR.block(cr * q, 0, q, c.BN);
    } else {
      for (int m = 0; m < q; ++m)
        for (size_t a = 0; a < c.taps.size(); ++a)
          P(cell * q + m, cell + c.taps[a]) = c.T(m, a);
    }
  }
  return P;
}

// One-sided interpolation guess for the left closure block.
inline MatrixXd closure_seed(const ProjConfig& c) {
  const int q = c.q;
  MatrixXd X = MatrixXd::Zero(c.BC * q, c.BN);
  for (int cell = 0; cell < c.BC; ++cell) {
    int base = std::max(0, cell - (q / 2 - 1));
    for (int ni = 0; ni < q; ++ni) {
      int k = base + ni;
      // Lagrange basis through nodes base..base+q-1, expanded in monomials
      // centered at the cell midpoint cell+0.5
      std::vector<double> poly{1.0};
      double denom = 1.0;
      for (int t = base; t < base + q; ++t) {
        if (t == k) continue;
        denom *= (k - t);
        double shift = t - (cell + 0.5);  // root position in centered coords
        std::vector<double> np(poly.size() + 1, 0.0);
        for (size_t d = 0; d < poly.size(); ++d) {
          np[d + 1] += poly[d];
          np[d] -= shift * poly[d];
        }
        poly = np;
      }
      for (size_t deg = 0; deg < poly.size(); ++deg) {
        VectorXd tc = monomial_coeffs(static_cast<int>(deg), q);
        for (int m = 0; m < q; ++m) X(cell * q + m, k) += poly[deg] / denom * tc(m);
      }
    }
  }
  return X;
}

// Row-exactness constraints A vec(X) = b for one closure block.
// side: 'L' or 'R'; on the right, row block c counts cells in from the edge
// and column j indexes the last BN nodes in natural order.
inline void closure_constraints(const ProjConfig& c, char side, int edge_degree,
                                MatrixXd& A, VectorXd& b) {
  const int q = c.q, BC = c.BC, BN = c.BN;
  const int nrow = BC * q * (edge_degree + 1);
  A = MatrixXd::Zero(nrow, BC * q * BN);
  b = VectorXd::Zero(nrow);
  int r = 0;
  for (int cell = 0; cell < BC; ++cell)
    for (int m = 0; m < q; ++m)
      for (int deg = 0; deg <= edge_degree; ++deg, ++r) {
        for (int j = 0; j < BN; ++j) {
          double xj = side == 'L' ? j - (cell + 0.5) : j - BN + 1.5 + cell;
          A(r, (cell * q + m) * BN + j) = std::pow(xj, deg);
        }
        b(r) = monomial_coeffs(deg, q)(m);
      }
}

// Solve one closure block: X^T X = G (the completion Gram) subject to the
// row-exactness constraints, by alternating projections between the Gram
// manifold and the affine constraint set.
inline MatrixXd solve_closure_side(const ProjConfig& c, const MatrixXd& G,
                                   const MatrixXd& A, const VectorXd& b,
                                   const MatrixXd& X0) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw ConstraintSystemInfeasible("closure completion Gram not PSD");
  MatrixXd Gh = es.eigenvectors() *
                es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                es.eigenvectors().transpose();
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> Adec(A);
  MatrixXd X = X0;
  const int rows = static_cast<int>(X.rows()), cols = static_cast<int>(X.cols());
  for (int it = 0; it < 1500; ++it) {
    Eigen::BDCSVD<MatrixXd> svd(X * Gh, Eigen::ComputeThinU | Eigen::ComputeThinV);
    X = svd.matrixU() * svd.matrixV().transpose() * Gh;
    Eigen::Map<VectorXd> xv(X.data(), X.size());
    // column-major map vs row-major constraint indexing: rebuild explicitly
    VectorXd xr(rows * cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) xr(i * cols + j) = X(i, j);
    VectorXd corr = Adec.solve(b - A * xr);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) X(i, j) += corr(i * cols + j);
  }
  if ((X.transpose() * X - G).cwiseAbs().maxCoeff() > 1e-11)
    throw ConstraintSystemInfeasible("closure alternating projections did not converge");
  return X;
}

struct ClosureBlocks {
  MatrixXd XL, XR;
};

inline const ClosureBlocks& closures(int order) {
  static const auto solve = [](int ord) {
    const ProjConfig& c = config(ord);
    const int q = c.q, n0 = 40;
    VectorXd w = detail::norm_weights(ord, n0);
    MatrixXd Pt = assemble_full(n0, c, MatrixXd::Zero(c.BC * q, c.BN),
                                MatrixXd::Zero(c.BC * q, c.BN));
    MatrixXd Gt = MatrixXd(w.asDiagonal()) - Pt.transpose() * Pt;
    MatrixXd X0L = closure_seed(c);
    MatrixXd X0R(X0L.rows(), X0L.cols());
    for (int cell = 0; cell < c.BC; ++cell)
      for (int m = 0; m < q; ++m)
        X0R.row(cell * q + m) =
            (m % 2 ? -1.0 : 1.0) * X0L.row(cell * q + m).reverse();
    const int edge_degree = ord / 2 - 1;
    MatrixXd AL, AR;
    VectorXd bL, bR;
    closure_constraints(c, 'L', edge_degree, AL, bL);
    closure_constraints(c, 'R', edge_degree, AR, bR);
    ClosureBlocks cb;
    cb.XL = solve_closure_side(c, Gt.topLeftCorner(c.BN, c.BN), AL, bL, X0L);
    cb.XR = solve_closure_side(c, Gt.bottomRightCorner(c.BN, c.BN), AR, bR, X0R);
    return cb;
  };
  static const ClosureBlocks c2 = solve(2);
  static const ClosureBlocks c4 = solve(4);
  if (order == 2) return c2;
  if (order == 4) return c4;
  throw UnsupportedOrder(order);
}

// Scale-free nodal -> piecewise-Legendre coefficients operator on n nodes.
inline MatrixXd build_P(int order, int n) {
  const ProjConfig& c = config(order);
  if (n < 2 * c.BN) throw GridTooSmall(n, 2 * c.BN);
  const ClosureBlocks& cb = closures(order);
  return assemble_full(n, c, cb.XL, cb.XR);
}

// Re-expansion of parent-cell coefficients onto the child interval [a,b]
// (parent in unit coordinates).  Exact for polynomials of the cell degree.
inline MatrixXd reexpand(int q, double a, double b) {
  static const GaussRule g = gauss_legendre(12);
  MatrixXd C = MatrixXd::Zero(q, q);
  for (int k = 0; k < q; ++k)
    for (int m = 0; m < q; ++m) {
      double s = 0;
      for (size_t i = 0; i < g.x.size(); ++i) {
        double xp = (a + b) / 2 + (b - a) / 2 * g.x[i];  // in parent coords
        s += g.w[i] * phi(k, g.x[i]) * phi(m, 2 * xp - 1);
      }
      C(k, m) = 0.5 * s;
    }
  return C;
}

}  // namespace proj_detail

// Sorted union of trace grids; coincident points merged.
inline std::vector<double> build_glue_grid(const std::vector<double>& y_c,
                                           const std::vector<double>& y_f,
                                           std::vector<int>* map_c = nullptr,
                                           std::vector<int>* map_f = nullptr) {
  if (y_c.empty() || y_f.empty()) throw EndpointMismatch();
  const double span = std::max(y_c.back() - y_c.front(), y_f.back() - y_f.front());
  const double tol = 1e-12 * std::max(1.0, span);
  if (std::abs(y_c.front() - y_f.front()) > tol || std::abs(y_c.back() - y_f.back()) > tol)
    throw EndpointMismatch();
  std::vector<double> all(y_c);
  all.insert(all.end(), y_f.begin(), y_f.end());
  std::sort(all.begin(), all.end());
  std::vector<double> yg;
  for (double v : all)
    if (yg.empty() || v - yg.back() > tol) yg.push_back(v);
  auto locate = [&](double v) {
    auto it = std::lower_bound(yg.begin(), yg.end(), v - tol);
    return static_cast<int>(it - yg.begin());
  };
  if (map_c) { map_c->clear(); for (double v : y_c) map_c->push_back(locate(v)); }
  if (map_f) { map_f->clear(); for (double v : y_f) map_f->push_back(locate(v)); }
  return yg;
}

// A trace side (possibly several stacked uniform segments) projected onto a
// common glue grid: G maps concatenated nodal values to glue-cell
// coefficients; H is the concatenated trace norm; back = H^{-1} G^T M_g.
struct SideGlueOps {
  MatrixXd G;
  VectorXd H;
  VectorXd Mg;
  MatrixXd back;
};

inline SideGlueOps side_to_glue(int order, const std::vector<std::vector<double>>& segments,
                                const std::vector<double>& yg) {
  const int q = order;
  const int ng = static_cast<int>(yg.size()) - 1;
  int n_side = 0;
  for (auto& s : segments) n_side += static_cast<int>(s.size());
  SideGlueOps out;
  out.G = MatrixXd::Zero(ng * q, n_side);
  out.H = VectorXd::Zero(n_side);
  out.Mg = VectorXd::Zero(ng * q);
  for (int g = 0; g < ng; ++g)
    out.Mg.segment(g * q, q).setConstant(yg[g + 1] - yg[g]);
  const double tol = 1e-10;
  int col = 0;
  for (auto& s : segments) {
    const int n = static_cast<int>(s.size());
    const double h = s[1] - s[0];
    for (int i = 1; i < n; ++i)
      if (std::abs(s[i] - s[i - 1] - h) > tol * std::max(1.0, std::abs(h)))
        throw ConstraintSystemInfeasible("trace segment not uniform");
    MatrixXd P = proj_detail::build_P(order, n);
    out.H.segment(col, n) = detail::norm_weights(order, n) * h;
    for (int c = 0; c < n - 1; ++c) {
      double lo = s[c], hi = s[c + 1];
      // glue cells inside this side cell
      for (int g = 0; g < ng; ++g) {
        if (yg[g] < lo - tol || yg[g + 1] > hi + tol) continue;
        MatrixXd C = proj_detail::reexpand(q, (yg[g] - lo) / h, (yg[g + 1] - lo) / h);
        out.G.block(g * q, col, q, n) += C * P.middleRows(c * q, q);
      }
    }
    col += n;
  }
  out.back = out.H.cwiseInverse().asDiagonal() * out.G.transpose() * out.Mg.asDiagonal();
  double iso = (out.G.transpose() * out.Mg.asDiagonal() * out.G -
                MatrixXd(out.H.asDiagonal())).cwiseAbs().maxCoeff();
  if (iso > 1e-9)
    throw ConstraintSystemInfeasible("glue projection lost the norm identity");
  return out;
}

// The eight projection operators for one coarse/fine interface.
struct GlueGridSet {
  int order = 0;
  std::vector<double> y_c, y_f, y_g;
  MatrixXd P_f2p_c, P_p2f_c, P_p2g_c, P_g2p_c;
  MatrixXd P_f2p_f, P_p2f_f, P_p2g_f, P_g2p_f;
  VectorXd M_c, M_f, M_g;
  VectorXd H_c, H_f;
};

inline GlueGridSet build_projection_set(int order, const std::vector<double>& y_c,
                                        const std::vector<double>& y_f) {
  GlueGridSet gs;
  gs.order = order;
  gs.y_c = y_c;
  gs.y_f = y_f;
  gs.y_g = build_glue_grid(y_c, y_f);
  const int q = order;
  for (int side = 0; side < 2; ++side) {
    const auto& y = side == 0 ? y_c : y_f;
    const int n = static_cast<int>(y.size());
    const double h = y[1] - y[0];
    MatrixXd P = proj_detail::build_P(order, n);
    VectorXd H = detail::norm_weights(order, n) * h;
    VectorXd M = VectorXd::Constant((n - 1) * q, h);
    MatrixXd p2f = H.cwiseInverse().asDiagonal() * P.transpose() * M.asDiagonal();
    // basis transfer to glue cells (exact subdivision)
    const int ng = static_cast<int>(gs.y_g.size()) - 1;
    MatrixXd p2g = MatrixXd::Zero(ng * q, (n - 1) * q);
    const double tol = 1e-10;
    for (int c = 0; c < n - 1; ++c)
      for (int g = 0; g < ng; ++g) {
        if (gs.y_g[g] < y[c] - tol || gs.y_g[g + 1] > y[c + 1] + tol) continue;
        p2g.block(g * q, c * q, q, q) =
            proj_detail::reexpand(q, (gs.y_g[g] - y[c]) / h, (gs.y_g[g + 1] - y[c]) / h);
      }
    VectorXd Mg = VectorXd::Zero(ng * q);
    for (int g = 0; g < ng; ++g)
      Mg.segment(g * q, q).setConstant(gs.y_g[g + 1] - gs.y_g[g]);
    MatrixXd g2p = M.cwiseInverse().asDiagonal() * p2g.transpose() * Mg.asDiagonal();
    if (side == 0) {
      gs.P_f2p_c = P; gs.P_p2f_c = p2f; gs.P_p2g_c = p2g; gs.P_g2p_c = g2p;
      gs.M_c = M; gs.H_c = H; gs.M_g = Mg;
    } else {
      gs.P_f2p_f = P; gs.P_p2f_f = p2f; gs.P_p2g_f = p2g; gs.P_g2p_f = g2p;
      gs.M_f = M; gs.H_f = H;
    }
  }
  return gs;
}

inline InterfaceOperatorPair compose_interface(const GlueGridSet& gs) {
  InterfaceOperatorPair p;
  p.order = gs.order;
  p.kind = PairKind::projection_composed;
  p.I_c2f = gs.P_p2f_f * gs.P_g2p_f * gs.P_p2g_c * gs.P_f2p_c;
  p.I_f2c = gs.P_p2f_c * gs.P_g2p_c * gs.P_p2g_f * gs.P_f2p_f;
  p.H_c = gs.H_c;
  p.H_f = gs.H_f;
  return p;
}

// Convenience: composed pair for a 1:2 two-block interface on [a,b].
inline InterfaceOperatorPair build_projection_pair(int order, int nc, double hc,
                                                   double a = 0.0) {
  std::vector<double> yc(nc), yf(2 * nc - 1);
  for (int i = 0; i < nc; ++i) yc[i] = a + i * hc;
  for (int i = 0; i < 2 * nc - 1; ++i) yf[i] = a + i * hc / 2;
  yc.back() = yf.back();
  return compose_interface(build_projection_set(order, yc, yf));
}

}  // namespace sbpsat
