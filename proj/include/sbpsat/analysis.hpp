#pragma once

#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <vector>

#include <lapacke.h>

#include "sbpsat/assemble.hpp"
#include "sbpsat/errors.hpp"

namespace sbpsat {

struct EnergySample {
  double t = 0;
  double total = 0;
  double kinetic = 0;
  double potential = 0;  // -z^T H Q z, all spatial terms
};

// Discrete energy of the semidiscrete system with homogeneous data:
// E = z_t^T H z_t - z^T (H Q) z.  For configurations that satisfy the
// energy estimate this is conserved exactly in time and non-negative.
inline EnergySample discrete_energy(const SemidiscreteSystem& sys, const VectorXd& z,
                                    const VectorXd& z_t, double t = 0) {
  if (z.size() != sys.size() || z_t.size() != sys.size()) throw SizeMismatch("state length");
  EnergySample e;
  e.t = t;
  e.kinetic = z_t.dot(sys.H_global.cwiseProduct(z_t));
  e.potential = -z.dot(sys.H_global.cwiseProduct(sys.Q_mat * z));
  e.total = e.kinetic + e.potential;
  return e;
}

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real = 0;
  double max_imag = 0;  // max |Im|
  double radius = 0;
};

constexpr long kDenseEigLimit = 6000;

// Full spectrum of Q_mat by dense nonsymmetric eigensolve.
inline SpectrumReport spectrum(const SemidiscreteSystem& sys) {
  const long n = sys.size();
  if (n > kDenseEigLimit) throw SystemTooLarge(n, kDenseEigLimit);
  MatrixXd A = MatrixXd(sys.Q_mat);
  std::vector<double> wr(n), wi(n);
  int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<int>(n), A.data(),
                           static_cast<int>(n), wr.data(), wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw ConstraintSystemInfeasible("dgeev failed with info " + std::to_string(info));
  SpectrumReport r;
  r.eigenvalues.reserve(n);
  r.max_real = wr[0];
  for (long i = 0; i < n; ++i) {
    r.eigenvalues.emplace_back(wr[i], wi[i]);
    r.max_real = std::max(r.max_real, wr[i]);
    r.max_imag = std::max(r.max_imag, std::abs(wi[i]));
    r.radius = std::max(r.radius, std::abs(r.eigenvalues.back()));
  }
  return r;
}

struct ErrorNorms {
  double l2 = 0;
  double max = 0;
};

// Single-grid norms: L2 = sqrt(h^d e^T e), max = max|e| / amp.
inline ErrorNorms error_norms(const VectorXd& u_h, const VectorXd& u_ex, double h, int d,
                              double amp = 1.0) {
  if (u_h.size() != u_ex.size()) throw SizeMismatch("error norm inputs");
  if (amp <= 0) throw NonpositiveInput("amp");
  VectorXd e = u_h - u_ex;
  ErrorNorms n;
  n.l2 = std::sqrt(std::pow(h, d) * e.squaredNorm());
  n.max = e.cwiseAbs().maxCoeff() / amp;
  return n;
}

// Multi-block accumulation: per-block h_x*h_y weighting summed under the root.
inline ErrorNorms error_norms(const SemidiscreteSystem& sys, const VectorXd& u_h,
                              const VectorXd& u_ex, double amp = 1.0) {
  if (u_h.size() != sys.size() || u_ex.size() != sys.size()) throw SizeMismatch("state length");
  if (amp <= 0) throw NonpositiveInput("amp");
  ErrorNorms n;
  double acc = 0;
  for (auto& b : sys.blocks) {
    VectorXd e = u_h.segment(b.offset, b.n()) - u_ex.segment(b.offset, b.n());
    acc += b.hx * b.hy * e.squaredNorm();
    n.max = std::max(n.max, e.cwiseAbs().maxCoeff() / amp);
  }
  n.l2 = std::sqrt(acc);
  return n;
}

struct ConvergenceRow {
  int order = 0;
  int refinement = 0;
  double l2_error = 0;
  double q_l2 = 0;  // NaN on the coarsest level
  double max_error = 0;
  double q_max = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

// q = log(e_coarse/e_fine)/log(2) between consecutive refinements.
inline ConvergenceReport convergence_rates(int order, const std::vector<ErrorNorms>& levels) {
  if (levels.size() < 2) throw InsufficientLevels();
  ConvergenceReport rep;
  for (size_t r = 0; r < levels.size(); ++r) {
    ConvergenceRow row;
    row.order = order;
    row.refinement = static_cast<int>(r);
    row.l2_error = levels[r].l2;
    row.max_error = levels[r].max;
    if (r == 0) {
      row.q_l2 = row.q_max = std::nan("");
    } else {
      row.q_l2 = std::log(levels[r - 1].l2 / levels[r].l2) / std::log(2.0);
      row.q_max = std::log(levels[r - 1].max / levels[r].max) / std::log(2.0);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

inline void write_convergence_csv(const ConvergenceReport& rep,
                                  const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << "order,refinement,l2_error,q_l2,max_error,q_max\n" << std::setprecision(10);
  for (auto& r : rep.rows) {
    os << r.order << ',' << r.refinement << ',' << r.l2_error << ',';
    if (std::isnan(r.q_l2)) os << ""; else os << r.q_l2;
    os << ',' << r.max_error << ',';
    if (std::isnan(r.q_max)) os << ""; else os << r.q_max;
    os << '\n';
  }
}

}  // namespace sbpsat
