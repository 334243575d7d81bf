#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "sbpsat/errors.hpp"
#include "sbpsat/interface.hpp"
#include "sbpsat/sbp.hpp"

namespace sbpsat {

// Scale-free (h=1) operator coefficients as stored on disk.  The interior
// stencils are centered; closures apply at the low end and mirror to the
// high end (D1 antisymmetric, D2 symmetric, S reversed and negated).
struct SbpCoefficients {
  int order = 0;
  int closure_rows = 0;
  double alpha = 0;
  VectorXd h_closure;      // boundary norm weights (interior weight is 1)
  VectorXd d1_interior;    // centered stencil, odd length
  MatrixXd d1_closure;     // closure_rows x width
  VectorXd d2_interior;
  MatrixXd d2_closure;
  VectorXd s_row;          // one-sided boundary-derivative stencil at node 0
};

namespace detail {

inline void write_block(std::ostream& os, const std::string& label, const MatrixXd& m) {
  os << label << ' ' << m.rows() << ' ' << m.cols() << '\n';
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

inline MatrixXd read_block(std::istream& is, const std::string& want) {
  std::string label;
  long r = 0, c = 0;
  if (!(is >> label >> r >> c)) throw ParseError("expected block header '" + want + "'");
  if (label != want) throw ParseError("expected block '" + want + "', found '" + label + "'");
  if (r <= 0 || c <= 0) throw ParseError("block '" + want + "' has empty shape");
  MatrixXd m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j)
      if (!(is >> m(i, j))) throw ParseError("truncated block '" + want + "'");
  return m;
}

inline double header_value(const std::string& header, const std::string& key) {
  auto pos = header.find(key + "=");
  if (pos == std::string::npos) throw ParseError("header missing '" + key + "='");
  return std::atof(header.c_str() + pos + key.size() + 1);
}

}  // namespace detail

inline void save_sbp_coefficients(const std::filesystem::path& path, const SbpCoefficients& c) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << "sbp order=" << c.order << " closure_rows=" << c.closure_rows
     << " alpha=" << std::setprecision(17) << c.alpha << '\n';
  detail::write_block(os, "H_CLOSURE", c.h_closure.transpose());
  detail::write_block(os, "D1_INTERIOR", c.d1_interior.transpose());
  detail::write_block(os, "D1_CLOSURE", c.d1_closure);
  detail::write_block(os, "D2_INTERIOR", c.d2_interior.transpose());
  detail::write_block(os, "D2_CLOSURE", c.d2_closure);
  detail::write_block(os, "S_ROW", c.s_row.transpose());
}

// Build an operator set on `grid` from scale-free coefficients.  The result
// is validated; inconsistent data raises CoefficientValidationFailed.
inline SbpOperatorSet build_sbp_from_coefficients(const SbpCoefficients& c,
                                                  const GridLine1D& grid) {
  const int n = grid.n;
  const double h = grid.h;
  const int r = c.closure_rows;
  const int wi = static_cast<int>(c.d1_interior.size());
  const int half = wi / 2;
  const int wc = static_cast<int>(c.d1_closure.cols());
  const int need = 2 * std::max(r, wc) + wi;
  if (n < need) throw GridTooSmall(n, need);

  SbpOperatorSet s;
  s.order = c.order;
  s.n = n;
  s.h = h;
  s.alpha = c.alpha;
  s.closure_rows = r;
  s.H = VectorXd::Constant(n, h);
  for (Eigen::Index i = 0; i < c.h_closure.size(); ++i) {
    s.H(i) = c.h_closure(i) * h;
    s.H(n - 1 - i) = c.h_closure(i) * h;
  }
  s.D1 = MatrixXd::Zero(n, n);
  s.D2 = MatrixXd::Zero(n, n);
  for (int i = r; i < n - r; ++i)
    for (int k = 0; k < wi; ++k) {
      s.D1(i, i - half + k) = c.d1_interior(k);
      s.D2(i, i - half + k) = c.d2_interior(k);
    }
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < wc; ++j) {
      s.D1(i, j) = c.d1_closure(i, j);
      s.D1(n - 1 - i, n - 1 - j) = -c.d1_closure(i, j);
      s.D2(i, j) = c.d2_closure(i, j);
      s.D2(n - 1 - i, n - 1 - j) = c.d2_closure(i, j);
    }
  s.D1 /= h;
  s.D2 /= h * h;
  s.S = MatrixXd::Identity(n, n);
  for (Eigen::Index j = 0; j < c.s_row.size(); ++j) {
    s.S(0, j) = c.s_row(j) / h;
    s.S(n - 1, n - 1 - j) = -c.s_row(j) / h;
  }
  detail::finish_derived(s);

  SbpVerifyReport rep = verify_sbp_identities(s);
  if (rep.max_residual() > 1e-10)
    throw CoefficientValidationFailed("sbp identities", rep.max_residual());
  double lmin = verify_borrowing(s);
  if (lmin < -1e-10 * std::max(1.0, s.M.cwiseAbs().maxCoeff()))
    throw CoefficientValidationFailed("borrowing remainder", lmin);
  return s;
}

inline SbpCoefficients load_sbp_coefficients(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  if (header.rfind("sbp ", 0) != 0) throw ParseError("not an sbp coefficient file");
  SbpCoefficients c;
  c.order = static_cast<int>(detail::header_value(header, "order"));
  c.closure_rows = static_cast<int>(detail::header_value(header, "closure_rows"));
  c.alpha = detail::header_value(header, "alpha");
  if (c.order < 2 || c.order > 10 || c.order % 2) throw UnsupportedOrder(c.order);
  if (c.alpha <= 0) throw CoefficientValidationFailed("alpha positive", c.alpha);
  c.h_closure = detail::read_block(is, "H_CLOSURE").transpose();
  c.d1_interior = detail::read_block(is, "D1_INTERIOR").transpose();
  c.d1_closure = detail::read_block(is, "D1_CLOSURE");
  c.d2_interior = detail::read_block(is, "D2_INTERIOR").transpose();
  c.d2_closure = detail::read_block(is, "D2_CLOSURE");
  c.s_row = detail::read_block(is, "S_ROW").transpose();
  if (c.h_closure.minCoeff() <= 0)
    throw CoefficientValidationFailed("H positive", c.h_closure.minCoeff());
  if (c.d1_interior.size() % 2 == 0) throw ParseError("D1_INTERIOR must have odd length");
  // full validation happens on a concrete grid
  build_sbp_from_coefficients(c, GridLine1D(4 * static_cast<int>(c.d1_closure.cols()) + 9, 1.0));
  return c;
}

inline SbpCoefficients extract_coefficients(const SbpOperatorSet& s) {
  SbpCoefficients c;
  c.order = s.order;
  c.closure_rows = s.closure_rows;
  c.alpha = s.alpha;
  const int r = s.closure_rows;
  c.h_closure = s.H.head(r).array() / s.h;
  const int half = s.order / 2;
  c.d1_interior = s.D1.row(s.n / 2).segment(s.n / 2 - half, 2 * half + 1) * s.h;
  c.d2_interior = s.D2.row(s.n / 2).segment(s.n / 2 - half, 2 * half + 1) * s.h * s.h;
  int wc = r + half + 1;
  c.d1_closure = s.D1.topLeftCorner(r, wc) * s.h;
  c.d2_closure = s.D2.topLeftCorner(r, wc) * s.h * s.h;
  c.s_row = s.S.row(0).head(half + 2) * s.h;
  return c;
}

inline void save_interface_pair(const std::filesystem::path& path,
                                const InterfaceOperatorPair& p) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << "iface kind="
     << (p.kind == PairKind::interpolation ? "interpolation" : "projection")
     << " order=" << p.order << " nc=" << p.nc() << " nf=" << p.nf() << '\n';
  detail::write_block(os, "I_C2F", p.I_c2f);
  detail::write_block(os, "I_F2C", p.I_f2c);
  detail::write_block(os, "H_C", p.H_c.transpose());
  detail::write_block(os, "H_F", p.H_f.transpose());
}

inline InterfaceOperatorPair load_interface_pair(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  if (header.rfind("iface ", 0) != 0) throw ParseError("not an interface operator file");
  InterfaceOperatorPair p;
  p.kind = header.find("kind=interpolation") != std::string::npos
               ? PairKind::interpolation
               : PairKind::projection_composed;
  if (header.find("kind=") == std::string::npos) throw ParseError("header missing kind=");
  p.order = static_cast<int>(detail::header_value(header, "order"));
  const int nc = static_cast<int>(detail::header_value(header, "nc"));
  const int nf = static_cast<int>(detail::header_value(header, "nf"));
  p.I_c2f = detail::read_block(is, "I_C2F");
  p.I_f2c = detail::read_block(is, "I_F2C");
  p.H_c = detail::read_block(is, "H_C").transpose();
  p.H_f = detail::read_block(is, "H_F").transpose();
  if (p.I_c2f.rows() != nf || p.I_c2f.cols() != nc || p.I_f2c.rows() != nc ||
      p.I_f2c.cols() != nf || p.H_c.size() != nc || p.H_f.size() != nf)
    throw SizeMismatch("interface blocks disagree with header nc/nf");
  if (p.H_c.minCoeff() <= 0 || p.H_f.minCoeff() <= 0)
    throw CoefficientValidationFailed("trace norms positive",
                                      std::min(p.H_c.minCoeff(), p.H_f.minCoeff()));
  double compat = p.compatibility_residual();
  if (compat > 1e-12) throw CompatibilityViolation(compat);
  double cres = p.constant_residual();
  if (cres > 1e-12) throw CoefficientValidationFailed("constant preservation", cres);
  return p;
}

// Coefficient-file search directory: SBPSAT_COEFF_DIR overrides the default.
inline std::filesystem::path coeff_dir(const std::filesystem::path& fallback = "data") {
  if (const char* env = std::getenv("SBPSAT_COEFF_DIR")) return env;
  return fallback;
}

// Locate an operator coefficient file for the given order, if shipped.
inline std::filesystem::path find_sbp_coeff_file(int order,
                                                 const std::filesystem::path& fallback = "data") {
  auto p = coeff_dir(fallback) / ("sbp_order" + std::to_string(order) + ".txt");
  return std::filesystem::exists(p) ? p : std::filesystem::path{};
}

}  // namespace sbpsat
