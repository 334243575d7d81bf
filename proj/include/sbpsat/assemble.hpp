#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <vector>

#include "sbpsat/errors.hpp"
#include "sbpsat/interface.hpp"
#include "sbpsat/meshgen.hpp"
#include "sbpsat/projection.hpp"
#include "sbpsat/sbp.hpp"

namespace sbpsat {

using SparseMat = Eigen::SparseMatrix<double>;

inline double tau_bound(double alpha, double h_left, double h_right) {
  if (alpha <= 0) throw NonpositiveInput("alpha");
  if (h_left <= 0) throw NonpositiveInput("h_left");
  if (h_right <= 0) throw NonpositiveInput("h_right");
  return std::max(1 / (2 * alpha * h_left), 1 / (2 * alpha * h_right));
}

struct PenaltyConfig {
  double safety = 1.2;        // multiplier on the energy-method bound
  double sigma_safety = 1.2;  // same idea for the boundary penalty
  double tau_override = -1;   // <0: use safety * bound
};

struct BlockLayout {
  int nx = 0, ny = 0;
  double hx = 0, hy = 0, x0 = 0, y0 = 0;
  long offset = 0;
  long n() const { return static_cast<long>(nx) * ny; }
  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
};

// One Kronecker-product contribution X (x-direction) (x) Y (y-direction)
// between a row block and a column block; global index is i*ny + j.
struct KronTerm {
  int rb = 0, cb = 0;
  MatrixXd X, Y;
};

struct SemidiscreteSystem {
  int order = 0;
  double tau = 0;
  std::vector<BlockLayout> blocks;
  std::vector<KronTerm> terms;       // z_tt = Q z - data_op g
  std::vector<KronTerm> data_terms;  // boundary-data operator (same sign as in Q)
  SparseMat Q_mat;
  SparseMat data_op;
  VectorXd H_global;

  long size() const {
    long n = 0;
    for (auto& b : blocks) n += b.n();
    return n;
  }

  VectorXd sample(const std::function<double(double, double)>& f) const {
    VectorXd v(size());
    for (auto& b : blocks)
      for (int i = 0; i < b.nx; ++i)
        for (int j = 0; j < b.ny; ++j) v(b.offset + i * b.ny + j) = f(b.x(i), b.y(j));
    return v;
  }

  // assembled path
  VectorXd apply_rhs(const VectorXd& z, const VectorXd& g) const {
    if (z.size() != size()) throw SizeMismatch("state length");
    return Q_mat * z - data_op * g;
  }

  // term-by-term Kronecker application; no assembled matrix involved
  VectorXd apply_rhs_matrix_free(const VectorXd& z, const VectorXd& g) const {
    if (z.size() != size()) throw SizeMismatch("state length");
    VectorXd out = VectorXd::Zero(size());
    auto run = [&](const std::vector<KronTerm>& ts, const VectorXd& src, double sign) {
      for (auto& t : ts) {
        const BlockLayout& R = blocks[t.rb];
        const BlockLayout& C = blocks[t.cb];
        Eigen::Map<const MatrixXd> V(src.data() + C.offset, C.ny, C.nx);
        Eigen::Map<MatrixXd> O(out.data() + R.offset, R.ny, R.nx);
        O += sign * t.Y * V * t.X.transpose();
      }
    };
    run(terms, z, 1.0);
    run(data_terms, g, -1.0);
    return out;
  }
};

namespace detail {

inline void add_term(std::vector<KronTerm>& terms, int rb, int cb, MatrixXd X, MatrixXd Y) {
  terms.push_back({rb, cb, std::move(X), std::move(Y)});
}

inline SparseMat terms_to_sparse(const SemidiscreteSystem& sys,
                                 const std::vector<KronTerm>& terms) {
  std::vector<Eigen::Triplet<double>> trip;
  for (auto& t : terms) {
    const BlockLayout& R = sys.blocks[t.rb];
    const BlockLayout& C = sys.blocks[t.cb];
    for (int xi = 0; xi < t.X.rows(); ++xi)
      for (int xj = 0; xj < t.X.cols(); ++xj) {
        double xv = t.X(xi, xj);
        if (xv == 0.0) continue;
        for (int yi = 0; yi < t.Y.rows(); ++yi)
          for (int yj = 0; yj < t.Y.cols(); ++yj) {
            double yv = t.Y(yi, yj);
            if (yv == 0.0) continue;
            trip.emplace_back(R.offset + xi * R.ny + yi, C.offset + xj * C.ny + yj, xv * yv);
          }
      }
  }
  SparseMat m(sys.size(), sys.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline void finalize(SemidiscreteSystem& sys) {
  sys.Q_mat = terms_to_sparse(sys, sys.terms);
  sys.data_op = terms_to_sparse(sys, sys.data_terms);
  sys.H_global.resize(sys.size());
  // per-block 2D norm from the 1D weights; recomputed from the layout
  for (auto& b : sys.blocks) {
    VectorXd wx = norm_weights(sys.order, b.nx) * b.hx;
    VectorXd wy = norm_weights(sys.order, b.ny) * b.hy;
    for (int i = 0; i < b.nx; ++i)
      for (int j = 0; j < b.ny; ++j) sys.H_global(b.offset + i * b.ny + j) = wx(i) * wy(j);
  }
}

// Own-block SAT matrix for one weak Dirichlet face (1D factor).
inline MatrixXd dirichlet_sat_1d(const SbpOperatorSet& ops, bool left_face, double sigma) {
  const int n = ops.n;
  int i = left_face ? 0 : n - 1;
  double bsign = left_face ? -1.0 : 1.0;
  MatrixXd E = MatrixXd::Zero(n, n);
  E(i, i) = 1.0;
  MatrixXd Hi = ops.H.cwiseInverse().asDiagonal();
  return Hi * (bsign * ops.S.transpose()) * E - sigma * Hi * E;
}

// Six interface SAT terms between role-A block (face at its last x/y index)
// and role-B block (face at index 0), along the given axis (0: x, 1: y).
// I_a2b maps the A trace to the B trace, I_b2a the reverse.
inline void couple_faces(SemidiscreteSystem& sys, int ba, int bb, int axis,
                         const SbpOperatorSet& oa, const SbpOperatorSet& ob,
                         const MatrixXd& I_a2b, const MatrixXd& I_b2a, double tau) {
  const int na = oa.n, nb = ob.n;
  MatrixXd Ea = MatrixXd::Zero(na, na);
  Ea(na - 1, na - 1) = 1;
  MatrixXd Eb = MatrixXd::Zero(nb, nb);
  Eb(0, 0) = 1;
  MatrixXd Eab = MatrixXd::Zero(na, nb);
  Eab(na - 1, 0) = 1;
  MatrixXd Eba = Eab.transpose();
  MatrixXd Hai = oa.H.cwiseInverse().asDiagonal();
  MatrixXd Hbi = ob.H.cwiseInverse().asDiagonal();
  MatrixXd I = MatrixXd::Identity(na, na);
  MatrixXd own_a =
      Hai * (0.5 * oa.S.transpose() * Ea - tau * Ea - 0.5 * Ea * oa.S);
  MatrixXd cross_a =
      Hai * ((-0.5 * oa.S.transpose() + tau * I) * Eab + 0.5 * Eab * ob.S);
  MatrixXd Ib = MatrixXd::Identity(nb, nb);
  MatrixXd own_b =
      Hbi * (-0.5 * ob.S.transpose() * Eb - tau * Eb + 0.5 * Eb * ob.S);
  MatrixXd cross_b =
      Hbi * ((0.5 * ob.S.transpose() + tau * Ib) * Eba - 0.5 * Eba * oa.S);
  const BlockLayout& A = sys.blocks[ba];
  const BlockLayout& B = sys.blocks[bb];
  if (axis == 0) {
    add_term(sys.terms, ba, ba, own_a, MatrixXd::Identity(A.ny, A.ny));
    add_term(sys.terms, ba, bb, cross_a, I_b2a);
    add_term(sys.terms, bb, bb, own_b, MatrixXd::Identity(B.ny, B.ny));
    add_term(sys.terms, bb, ba, cross_b, I_a2b);
  } else {
    add_term(sys.terms, ba, ba, MatrixXd::Identity(A.nx, A.nx), own_a);
    add_term(sys.terms, ba, bb, I_b2a, cross_a);
    add_term(sys.terms, bb, bb, MatrixXd::Identity(B.nx, B.nx), own_b);
    add_term(sys.terms, bb, ba, I_a2b, cross_b);
  }
}

inline void add_interior(SemidiscreteSystem& sys, int b, const SbpOperatorSet& ox,
                         const SbpOperatorSet& oy) {
  add_term(sys.terms, b, b, ox.D2, MatrixXd::Identity(oy.n, oy.n));
  add_term(sys.terms, b, b, MatrixXd::Identity(ox.n, ox.n), oy.D2);
}

// Weak Dirichlet condition on one face; also recorded as a data term so the
// forcing carries -SAT(g).
inline void add_dirichlet(SemidiscreteSystem& sys, int b, Side side,
                          const SbpOperatorSet& ox, const SbpOperatorSet& oy,
                          double sigma_safety) {
  const BlockLayout& L = sys.blocks[b];
  bool along_x = side == Side::west || side == Side::east;
  const SbpOperatorSet& o = along_x ? ox : oy;
  bool left = side == Side::west || side == Side::south;
  double sigma = sigma_safety / (o.alpha * o.h);
  MatrixXd A = dirichlet_sat_1d(o, left, sigma);
  MatrixXd X = along_x ? A : MatrixXd::Identity(L.nx, L.nx);
  MatrixXd Y = along_x ? MatrixXd::Identity(L.ny, L.ny) : A;
  add_term(sys.terms, b, b, X, Y);
  add_term(sys.data_terms, b, b, X, Y);
}

inline double resolve_tau(const PenaltyConfig& p, double bound) {
  if (p.tau_override >= 0) {
    if (p.tau_override < bound) throw PenaltyBelowBound(p.tau_override, bound);
    return p.tau_override;
  }
  if (p.safety < 1) throw ParameterOutOfRange("safety");
  return p.safety * bound;
}

}  // namespace detail

// Two blocks [-1,0]x[0,1] and [0,1]x[0,1] coupled at x=0 with the supplied
// trace-transfer pair (1:2 ratio when sizes differ, conforming otherwise).
inline SemidiscreteSystem assemble_two_block(const InterfaceOperatorPair& pair,
                                             const PenaltyConfig& penalty = {},
                                             bool unsafe_tau = false) {
  const int order = pair.order;
  const int ncL = pair.nc(), ncR = pair.nf();
  SemidiscreteSystem sys;
  sys.order = order;
  double hL = 1.0 / (ncL - 1), hR = 1.0 / (ncR - 1);
  sys.blocks.push_back({ncL, ncL, hL, hL, -1.0, 0.0, 0});
  sys.blocks.push_back({ncR, ncR, hR, hR, 0.0, 0.0, static_cast<long>(ncL) * ncL});
  SbpOperatorSet oL = build_sbp(order, GridLine1D(ncL, hL, -1.0));
  SbpOperatorSet oR = build_sbp(order, GridLine1D(ncR, hR, 0.0));
  double bound = tau_bound(oL.alpha, hL, hR);
  sys.tau = unsafe_tau && penalty.tau_override >= 0 ? penalty.tau_override
                                                    : detail::resolve_tau(penalty, bound);
  detail::add_interior(sys, 0, oL, oL);
  detail::add_interior(sys, 1, oR, oR);
  detail::couple_faces(sys, 0, 1, 0, oL, oR, pair.I_c2f, pair.I_f2c, sys.tau);
  detail::add_dirichlet(sys, 0, Side::west, oL, oL, penalty.sigma_safety);
  detail::add_dirichlet(sys, 0, Side::south, oL, oL, penalty.sigma_safety);
  detail::add_dirichlet(sys, 0, Side::north, oL, oL, penalty.sigma_safety);
  detail::add_dirichlet(sys, 1, Side::east, oR, oR, penalty.sigma_safety);
  detail::add_dirichlet(sys, 1, Side::south, oR, oR, penalty.sigma_safety);
  detail::add_dirichlet(sys, 1, Side::north, oR, oR, penalty.sigma_safety);
  detail::finalize(sys);
  return sys;
}

inline SemidiscreteSystem assemble_two_block(int order, int r, PairKind family,
                                             const PenaltyConfig& penalty = {}) {
  const int ncL = 25 * (1 << r) + 1;
  const double hL = 1.0 / (ncL - 1);
  InterfaceOperatorPair pair = family == PairKind::interpolation
                                   ? build_interpolation_pair(order, ncL, hL)
                                   : build_projection_pair(order, ncL, hL);
  return assemble_two_block(pair, penalty);
}

// Conforming split of [-1,1]x[0,1] at x=0 with identity trace transfer.
inline SemidiscreteSystem assemble_conforming_two_block(int order, int n,
                                                        const PenaltyConfig& penalty = {}) {
  double h = 1.0 / (n - 1);
  InterfaceOperatorPair id;
  id.order = order;
  id.kind = PairKind::interpolation;
  id.I_c2f = MatrixXd::Identity(n, n);
  id.I_f2c = MatrixXd::Identity(n, n);
  id.H_c = detail::norm_weights(order, n) * h;
  id.H_f = id.H_c;
  return assemble_two_block(id, penalty);
}

// Same split, but with the coupling operators composed through a glue grid
// over the shared trace; with the isometric projections the composition is an
// exact identity, so this must agree with assemble_conforming_two_block.
inline SemidiscreteSystem assemble_conforming_as_glue(int order, int n,
                                                      const PenaltyConfig& penalty = {}) {
  double h = 1.0 / (n - 1);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) y[i] = i * h;
  auto pair = compose_interface(build_projection_set(order, y, y));
  return assemble_two_block(pair, penalty);
}

// Single block [-1,1]x[0,1], Dirichlet all around (interface-free control).
inline SemidiscreteSystem assemble_single_block(int order, int nx, int ny,
                                                const PenaltyConfig& penalty = {}) {
  SemidiscreteSystem sys;
  sys.order = order;
  double hx = 2.0 / (nx - 1), hy = 1.0 / (ny - 1);
  sys.blocks.push_back({nx, ny, hx, hy, -1.0, 0.0, 0});
  SbpOperatorSet ox = build_sbp(order, GridLine1D(nx, hx, -1.0));
  SbpOperatorSet oy = build_sbp(order, GridLine1D(ny, hy, 0.0));
  sys.tau = 0;
  detail::add_interior(sys, 0, ox, oy);
  for (Side s : {Side::west, Side::east, Side::south, Side::north})
    detail::add_dirichlet(sys, 0, s, ox, oy, penalty.sigma_safety);
  detail::finalize(sys);
  return sys;
}

// T-junction of §-three-blocks on [-1,1]^2 with glue-grid coupling at x=0
// (one left trace vs two stacked right traces) and y=0.
inline SemidiscreteSystem assemble_tjunction(int order, int r,
                                             const PenaltyConfig& penalty = {}) {
  const int s = 1 << r;
  SemidiscreteSystem sys;
  sys.order = order;
  struct Dim { int nx, ny; double x0, y0, Lx, Ly; };
  const Dim dims[3] = {{27 * s + 1, 50 * s + 1, -1, -1, 1, 2},
                       {26 * s + 1, 24 * s + 1, 0, 0, 1, 1},
                       {50 * s + 1, 49 * s + 1, 0, -1, 1, 1}};
  long off = 0;
  std::vector<SbpOperatorSet> ox, oy;
  for (auto& d : dims) {
    double hx = d.Lx / (d.nx - 1), hy = d.Ly / (d.ny - 1);
    sys.blocks.push_back({d.nx, d.ny, hx, hy, d.x0, d.y0, off});
    off += static_cast<long>(d.nx) * d.ny;
    ox.push_back(build_sbp(order, GridLine1D(d.nx, hx, d.x0)));
    oy.push_back(build_sbp(order, GridLine1D(d.ny, hy, d.y0)));
  }
  for (int b = 0; b < 3; ++b) detail::add_interior(sys, b, ox[b], oy[b]);
  double alpha = ox[0].alpha;

  // ---- x=0: block 0 east vs stacked [block 2; block 1] west
  auto line = [](double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + i * (b - a) / (n - 1);
    v.back() = b;
    return v;
  };
  std::vector<double> y1 = line(-1, 1, dims[0].ny);
  std::vector<double> y3 = line(-1, 0, dims[2].ny);
  std::vector<double> y2 = line(0, 1, dims[1].ny);
  std::vector<double> yg = build_glue_grid(y1, [&] {
    std::vector<double> all = y3;
    all.insert(all.end(), y2.begin() + 1, y2.end());
    return all;
  }());
  SideGlueOps ga = side_to_glue(order, {y1}, yg);
  SideGlueOps gb = side_to_glue(order, {y3, y2}, yg);
  MatrixXd I_a2b = gb.back * ga.G;  // stacked-B trace <- A trace
  MatrixXd I_b2a = ga.back * gb.G;
  const int n3 = dims[2].ny;
  double tau_x = penalty.safety *
                 std::max({1 / (2 * alpha * sys.blocks[0].hx), 1 / (2 * alpha * sys.blocks[1].hx),
                           1 / (2 * alpha * sys.blocks[2].hx)});
  sys.tau = tau_x;
  {
    const auto& oa = ox[0];
    MatrixXd Ea = MatrixXd::Zero(oa.n, oa.n);
    Ea(oa.n - 1, oa.n - 1) = 1;
    MatrixXd Hai = oa.H.cwiseInverse().asDiagonal();
    MatrixXd own_a = Hai * (0.5 * oa.S.transpose() * Ea - tau_x * Ea - 0.5 * Ea * oa.S);
    detail::add_term(sys.terms, 0, 0, own_a, MatrixXd::Identity(dims[0].ny, dims[0].ny));
    // cross terms to each stacked neighbour, with the matching row/col slice
    struct Part { int blk; int lo, sz; };
    for (auto part : {Part{2, 0, n3}, Part{1, n3, dims[1].ny}}) {
      const auto& ob = ox[part.blk];
      MatrixXd Eab = MatrixXd::Zero(oa.n, ob.n);
      Eab(oa.n - 1, 0) = 1;
      MatrixXd I = MatrixXd::Identity(oa.n, oa.n);
      MatrixXd cross_a =
          Hai * ((-0.5 * oa.S.transpose() + tau_x * I) * Eab + 0.5 * Eab * ob.S);
      detail::add_term(sys.terms, 0, part.blk, cross_a, I_b2a.middleCols(part.lo, part.sz));
      MatrixXd Eb = MatrixXd::Zero(ob.n, ob.n);
      Eb(0, 0) = 1;
      MatrixXd Hbi = ob.H.cwiseInverse().asDiagonal();
      MatrixXd own_b = Hbi * (-0.5 * ob.S.transpose() * Eb - tau_x * Eb + 0.5 * Eb * ob.S);
      detail::add_term(sys.terms, part.blk, part.blk, own_b,
                       MatrixXd::Identity(part.sz, part.sz));
      MatrixXd Ib = MatrixXd::Identity(ob.n, ob.n);
      MatrixXd cross_b =
          Hbi * ((0.5 * ob.S.transpose() + tau_x * Ib) * Eab.transpose() - 0.5 * Eab.transpose() * oa.S);
      detail::add_term(sys.terms, part.blk, 0, cross_b, I_a2b.middleRows(part.lo, part.sz));
    }
  }

  // ---- y=0: block 2 north vs block 1 south
  std::vector<double> x3 = line(0, 1, dims[2].nx);
  std::vector<double> x2 = line(0, 1, dims[1].nx);
  auto gset = build_projection_set(order, x3, x2);
  auto hpair = compose_interface(gset);
  double tau_y = penalty.safety *
                 std::max(1 / (2 * alpha * sys.blocks[2].hy), 1 / (2 * alpha * sys.blocks[1].hy));
  detail::couple_faces(sys, 2, 1, 1, oy[2], oy[1], hpair.I_c2f, hpair.I_f2c, tau_y);

  // ---- outer Dirichlet faces
  detail::add_dirichlet(sys, 0, Side::west, ox[0], oy[0], penalty.sigma_safety);
  detail::add_dirichlet(sys, 0, Side::south, ox[0], oy[0], penalty.sigma_safety);
  detail::add_dirichlet(sys, 0, Side::north, ox[0], oy[0], penalty.sigma_safety);
  detail::add_dirichlet(sys, 1, Side::east, ox[1], oy[1], penalty.sigma_safety);
  detail::add_dirichlet(sys, 1, Side::north, ox[1], oy[1], penalty.sigma_safety);
  detail::add_dirichlet(sys, 2, Side::east, ox[2], oy[2], penalty.sigma_safety);
  detail::add_dirichlet(sys, 2, Side::south, ox[2], oy[2], penalty.sigma_safety);
  detail::finalize(sys);
  return sys;
}

inline void export_sparse(const SparseMat& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

inline void export_diag(const VectorXd& d, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < d.size(); ++i) os << i << ' ' << i << ' ' << d(i) << '\n';
}

}  // namespace sbpsat
