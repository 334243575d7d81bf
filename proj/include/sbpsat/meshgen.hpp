#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <string>
#include <vector>

#include "sbpsat/errors.hpp"

namespace sbpsat {

using Eigen::MatrixXd;
using Eigen::Vector2d;

// Parametric boundary curve s in [0,1] -> (x,y).
struct BoundaryCurve {
  std::function<Vector2d(double)> f;
  Vector2d operator()(double s) const { return f(s); }

  static BoundaryCurve line(const Vector2d& a, const Vector2d& b) {
    return {[=](double s) { return Vector2d(a + s * (b - a)); }};
  }
};

enum class Side { south, north, west, east };

inline std::string side_name(Side s) {
  switch (s) {
    case Side::south: return "south";
    case Side::north: return "north";
    case Side::west: return "west";
    case Side::east: return "east";
  }
  return "?";
}

// Four bounding curves plus per-direction point counts.
struct BlockSpec {
  BoundaryCurve south, north, west, east;
  int n_xi = 0, n_eta = 0;

  void check_corners() const {
    const double tol = 1e-10;
    auto close = [&](const Vector2d& a, const Vector2d& b) { return (a - b).norm() <= tol; };
    if (!close(south(0), west(0)) || !close(south(1), east(0)) ||
        !close(north(0), west(1)) || !close(north(1), east(1)))
      throw EndpointMismatch();
  }
};

inline Vector2d transfinite_map(const BlockSpec& b, double xi, double eta) {
  if (xi < -1e-14 || xi > 1 + 1e-14 || eta < -1e-14 || eta > 1 + 1e-14)
    throw ParameterOutOfRange("xi/eta");
  Vector2d p_sw = b.south(0), p_se = b.south(1), p_nw = b.north(0), p_ne = b.north(1);
  return (1 - eta) * b.south(xi) + eta * b.north(xi) + (1 - xi) * b.west(eta) +
         xi * b.east(eta) - xi * eta * p_ne - xi * (1 - eta) * p_se -
         eta * (1 - xi) * p_nw - (1 - xi) * (1 - eta) * p_sw;
}

inline BlockSpec rotate_block(const BlockSpec& b, int quarter_turns) {
  int k = ((quarter_turns % 4) + 4) % 4;
  double c = std::cos(k * M_PI / 2), s = std::sin(k * M_PI / 2);
  // snap to exact values
  c = std::round(c);
  s = std::round(s);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  auto rot = [R](const BoundaryCurve& curve) {
    return BoundaryCurve{[R, curve](double t) { return Vector2d(R * curve(t)); }};
  };
  BlockSpec out = b;
  out.south = rot(b.south);
  out.north = rot(b.north);
  out.west = rot(b.west);
  out.east = rot(b.east);
  return out;
}

// One generated block: point arrays indexed (i,j) = (xi,eta).
struct MeshBlock {
  BlockSpec spec;
  MatrixXd x, y;  // n_xi rows, n_eta cols

  int n_xi() const { return static_cast<int>(x.rows()); }
  int n_eta() const { return static_cast<int>(x.cols()); }

  std::vector<double> trace_coord(Side s, bool along_y) const {
    std::vector<double> t;
    const MatrixXd& m = along_y ? y : x;
    switch (s) {
      case Side::south: for (int i = 0; i < n_xi(); ++i) t.push_back(m(i, 0)); break;
      case Side::north: for (int i = 0; i < n_xi(); ++i) t.push_back(m(i, n_eta() - 1)); break;
      case Side::west: for (int j = 0; j < n_eta(); ++j) t.push_back(m(0, j)); break;
      case Side::east: for (int j = 0; j < n_eta(); ++j) t.push_back(m(n_xi() - 1, j)); break;
    }
    return t;
  }
};

inline MeshBlock generate_block(const BlockSpec& spec) {
  spec.check_corners();
  if (spec.n_xi < 2 || spec.n_eta < 2) throw GridTooSmall(std::min(spec.n_xi, spec.n_eta), 2);
  MeshBlock b;
  b.spec = spec;
  b.x.resize(spec.n_xi, spec.n_eta);
  b.y.resize(spec.n_xi, spec.n_eta);
  for (int i = 0; i < spec.n_xi; ++i)
    for (int j = 0; j < spec.n_eta; ++j) {
      Vector2d p = transfinite_map(spec, double(i) / (spec.n_xi - 1), double(j) / (spec.n_eta - 1));
      b.x(i, j) = p.x();
      b.y(i, j) = p.y();
    }
  return b;
}

enum class InterfaceKind { conforming, ratio_1_2, glue };

struct MeshInterface {
  int block_a = 0;
  Side side_a = Side::east;
  int block_b = 0;
  Side side_b = Side::west;
  InterfaceKind kind = InterfaceKind::conforming;
};

struct MeshBoundary {
  int block = 0;
  Side side = Side::south;
  std::string condition = "dirichlet";
};

struct MultiBlockMesh {
  std::vector<MeshBlock> blocks;
  std::vector<MeshInterface> interfaces;
  std::vector<MeshBoundary> boundaries;

  long total_points() const {
    long n = 0;
    for (auto& b : blocks) n += static_cast<long>(b.n_xi()) * b.n_eta();
    return n;
  }

  // Every block edge must appear exactly once across interfaces+boundaries.
  void check_coverage() const {
    std::vector<std::vector<int>> seen(blocks.size(), std::vector<int>(4, 0));
    for (auto& f : interfaces) {
      seen[f.block_a][static_cast<int>(f.side_a)]++;
      seen[f.block_b][static_cast<int>(f.side_b)]++;
    }
    for (auto& b : boundaries) seen[b.block][static_cast<int>(b.side)]++;
    for (size_t bi = 0; bi < blocks.size(); ++bi)
      for (int s = 0; s < 4; ++s)
        if (seen[bi][s] != 1)
          throw CoverageGap("block " + std::to_string(bi) + " side " +
                            side_name(static_cast<Side>(s)) + " covered " +
                            std::to_string(seen[bi][s]) + " times");
  }
};

namespace detail {

inline int refine_count(int n0, int r) { return (n0 - 1) * (1 << r) + 1; }

inline BlockSpec cartesian_block(double x0, double x1, double y0, double y1, int nx, int ny) {
  BlockSpec b;
  b.south = BoundaryCurve::line({x0, y0}, {x1, y0});
  b.north = BoundaryCurve::line({x0, y1}, {x1, y1});
  b.west = BoundaryCurve::line({x0, y0}, {x0, y1});
  b.east = BoundaryCurve::line({x1, y0}, {x1, y1});
  b.n_xi = nx;
  b.n_eta = ny;
  return b;
}

}  // namespace detail

// [-1,1]x[0,1] split at x=0; 1:2 refinement ratio across the interface.
inline MultiBlockMesh build_two_block_mesh(int r) {
  if (r < 0) throw ParameterOutOfRange("refinement");
  MultiBlockMesh m;
  int nl = detail::refine_count(26, r), nr = detail::refine_count(51, r);
  m.blocks.push_back(generate_block(detail::cartesian_block(-1, 0, 0, 1, nl, nl)));
  m.blocks.push_back(generate_block(detail::cartesian_block(0, 1, 0, 1, nr, nr)));
  m.interfaces.push_back({0, Side::east, 1, Side::west, InterfaceKind::ratio_1_2});
  for (int b : {0, 1})
    for (Side s : {Side::south, Side::north, b == 0 ? Side::west : Side::east})
      m.boundaries.push_back({b, s, "dirichlet"});
  m.check_coverage();
  return m;
}

// [-1,1]^2 in three blocks; glue interfaces at x=0 and y=0 (x>0).
inline MultiBlockMesh build_tjunction_mesh(int r) {
  if (r < 0) throw ParameterOutOfRange("refinement");
  MultiBlockMesh m;
  auto R = [&](int n0) { return detail::refine_count(n0, r); };
  m.blocks.push_back(generate_block(detail::cartesian_block(-1, 0, -1, 1, R(28), R(51))));
  m.blocks.push_back(generate_block(detail::cartesian_block(0, 1, 0, 1, R(27), R(25))));
  m.blocks.push_back(generate_block(detail::cartesian_block(0, 1, -1, 0, R(51), R(50))));
  m.interfaces.push_back({0, Side::east, 1, Side::west, InterfaceKind::glue});
  m.interfaces.push_back({0, Side::east, 2, Side::west, InterfaceKind::glue});
  m.interfaces.push_back({2, Side::north, 1, Side::south, InterfaceKind::glue});
  m.boundaries = {{0, Side::south, "dirichlet"}, {0, Side::north, "dirichlet"},
                  {0, Side::west, "dirichlet"},  {1, Side::north, "dirichlet"},
                  {1, Side::east, "dirichlet"},  {2, Side::south, "dirichlet"},
                  {2, Side::east, "dirichlet"}};
  // no check_coverage: the east side of block 0 legitimately carries two glue
  // records (one per stacked neighbour)
  return m;
}

// Quarter block between the unit-circle arc (south) and one side of the
// square of half-width D (north).
inline BlockSpec cavity_quadrant(double a, double D, int n_arc, int n_rad) {
  BlockSpec b;
  const double s2 = std::sqrt(2.0);
  b.south = {[a](double xi) {
    double t = xi * std::sqrt(2.0) - 1 / std::sqrt(2.0);
    return Vector2d(a * t, a * std::sqrt(1 - t * t));
  }};
  b.north = BoundaryCurve::line({-D, D}, {D, D});
  b.west = BoundaryCurve::line({-a / s2, a / s2}, {-D, D});
  b.east = BoundaryCurve::line({a / s2, a / s2}, {D, D});
  b.n_xi = n_arc;
  b.n_eta = n_rad;
  return b;
}

enum class CavityStyle { n_partitioning, t_partitioning };

// Circular cavity of radius 1 in [-25.5,11.7]x[-11.7,11.7].
// Per-edge counts are chosen for ~20 points per wavelength (wavelength 2.5)
// and to make the two published totals exact: 109867 and 54903 points.
inline MultiBlockMesh build_cavity_mesh(CavityStyle style) {
  const double a = 1.0, D = 11.7;
  MultiBlockMesh m;
  if (style == CavityStyle::n_partitioning) {
    // four quadrant blocks circle->outer square + left rectangle
    const int n_arc = 181, n_rad = 113, n_rx = 155;
    BlockSpec q = cavity_quadrant(a, D, n_arc, n_rad);
    for (int k = 0; k < 4; ++k) m.blocks.push_back(generate_block(rotate_block(q, k)));
    m.blocks.push_back(generate_block(detail::cartesian_block(-25.5, -D, -D, D, n_rx, n_arc)));
    for (int k = 0; k < 4; ++k)
      m.interfaces.push_back({k, Side::east, (k + 1) % 4, Side::west, InterfaceKind::conforming});
    // quadrant k=1 is the west one (rotation by pi/2 sends north to west)
    m.interfaces.push_back({4, Side::east, 1, Side::north, InterfaceKind::conforming});
    for (int k = 0; k < 4; ++k)
      if (k != 1) m.boundaries.push_back({k, Side::north, "outer"});
    m.boundaries.push_back({4, Side::west, "outer"});
    m.boundaries.push_back({4, Side::south, "outer"});
    m.boundaries.push_back({4, Side::north, "outer"});
    for (int k = 0; k < 4; ++k) m.boundaries.push_back({k, Side::south, "cavity"});
  } else {
    // small square around the cavity, four trapezoids out to the big square,
    // left rectangle with a T-junction at x=-11.7
    const double Ds = 1.3;
    const int n_arc = 96, n_rad = 11, n_trap = 75, n_rx = 117, n_ry = 187;
    BlockSpec q = cavity_quadrant(a, Ds, n_arc, n_rad);
    for (int k = 0; k < 4; ++k) m.blocks.push_back(generate_block(rotate_block(q, k)));
    BlockSpec t;  // north trapezoid small->big square
    t.south = BoundaryCurve::line({-Ds, Ds}, {Ds, Ds});
    t.north = BoundaryCurve::line({-D, D}, {D, D});
    t.west = BoundaryCurve::line({-Ds, Ds}, {-D, D});
    t.east = BoundaryCurve::line({Ds, Ds}, {D, D});
    t.n_xi = n_arc;
    t.n_eta = n_trap;
    for (int k = 0; k < 4; ++k) m.blocks.push_back(generate_block(rotate_block(t, k)));
    m.blocks.push_back(generate_block(detail::cartesian_block(-25.5, -D, -D, D, n_rx, n_ry)));
    for (int k = 0; k < 4; ++k) {
      m.interfaces.push_back({k, Side::east, (k + 1) % 4, Side::west, InterfaceKind::conforming});
      m.interfaces.push_back({k, Side::north, 4 + k, Side::south, InterfaceKind::conforming});
      m.interfaces.push_back({4 + k, Side::east, 4 + (k + 1) % 4, Side::west,
                              InterfaceKind::conforming});
    }
    m.interfaces.push_back({8, Side::east, 5, Side::north, InterfaceKind::glue});
    for (int k = 0; k < 4; ++k) {
      m.boundaries.push_back({k, Side::south, "cavity"});
      if (k != 1) m.boundaries.push_back({4 + k, Side::north, "outer"});
    }
    m.boundaries.push_back({8, Side::west, "outer"});
    m.boundaries.push_back({8, Side::south, "outer"});
    m.boundaries.push_back({8, Side::north, "outer"});
  }
  m.check_coverage();
  return m;
}

// Circular inclusion of radius 1 inside the square of half-width 1.3,
// with the Cartesian block [-5.9,-1.3]x[-1.3,1.3] attached on the left.
inline MultiBlockMesh build_inclusion_mesh(bool conforming) {
  const double a = 1.0, D = 1.3, d = 0.7 / std::sqrt(2.0);
  MultiBlockMesh m;
  // B0: left Cartesian block
  m.blocks.push_back(generate_block(
      detail::cartesian_block(-5.9, -D, -D, D, 51, conforming ? 101 : 51)));
  // outer ring: circle -> square, four quadrants
  BlockSpec q = cavity_quadrant(a, D, conforming ? 101 : 51, 26);
  for (int k = 0; k < 4; ++k) m.blocks.push_back(generate_block(rotate_block(q, k)));
  // inner ring: center square -> circle, four quadrants
  BlockSpec w;
  const double s2 = std::sqrt(2.0);
  w.south = BoundaryCurve::line({-a * d, a * d}, {a * d, a * d});
  w.north = {[a](double xi) {
    double t = xi * std::sqrt(2.0) - 1 / std::sqrt(2.0);
    return Vector2d(a * t, a * std::sqrt(1 - t * t));
  }};
  w.west = BoundaryCurve::line({-a * d, a * d}, {-a / s2, a / s2});
  w.east = BoundaryCurve::line({a * d, a * d}, {a / s2, a / s2});
  w.n_xi = 101;
  w.n_eta = 51;
  for (int k = 0; k < 4; ++k) m.blocks.push_back(generate_block(rotate_block(w, k)));
  // center square
  m.blocks.push_back(generate_block(
      detail::cartesian_block(-a * d, a * d, -a * d, a * d, 101, 101)));
  m.interfaces.push_back({0, Side::east, 2, Side::north,
                          conforming ? InterfaceKind::conforming : InterfaceKind::glue});
  for (int k = 0; k < 4; ++k) {
    m.interfaces.push_back({1 + k, Side::east, 1 + (k + 1) % 4, Side::west,
                            InterfaceKind::conforming});
    m.interfaces.push_back({5 + k, Side::east, 5 + (k + 1) % 4, Side::west,
                            InterfaceKind::conforming});
    m.interfaces.push_back({5 + k, Side::north, 1 + k, Side::south,
                            conforming ? InterfaceKind::conforming : InterfaceKind::glue});
  }
  // center square sides meet the inner-ring souths: N,E,S,W quadrants
  m.interfaces.push_back({9, Side::north, 5, Side::south, InterfaceKind::conforming});
  m.interfaces.push_back({9, Side::west, 6, Side::south, InterfaceKind::conforming});
  m.interfaces.push_back({9, Side::south, 7, Side::south, InterfaceKind::conforming});
  m.interfaces.push_back({9, Side::east, 8, Side::south, InterfaceKind::conforming});
  for (int k = 0; k < 4; ++k)
    if (k != 1) m.boundaries.push_back({1 + k, Side::north, "outer"});
  m.boundaries.push_back({0, Side::west, "outer"});
  m.boundaries.push_back({0, Side::south, "outer"});
  m.boundaries.push_back({0, Side::north, "outer"});
  m.check_coverage();
  return m;
}

inline void export_mesh_csv(const MultiBlockMesh& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << "block_id,i,j,x,y\n" << std::setprecision(17);
  for (size_t b = 0; b < m.blocks.size(); ++b)
    for (int i = 0; i < m.blocks[b].n_xi(); ++i)
      for (int j = 0; j < m.blocks[b].n_eta(); ++j)
        os << b << ',' << i << ',' << j << ',' << m.blocks[b].x(i, j) << ','
           << m.blocks[b].y(i, j) << '\n';
}

inline void export_mesh_topology(const MultiBlockMesh& m, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open " + path.string() + " for writing");
  os << "{\n  \"blocks\": [\n";
  for (size_t b = 0; b < m.blocks.size(); ++b)
    os << "    {\"id\": " << b << ", \"n_xi\": " << m.blocks[b].n_xi()
       << ", \"n_eta\": " << m.blocks[b].n_eta() << "}"
       << (b + 1 < m.blocks.size() ? "," : "") << '\n';
  os << "  ],\n  \"interfaces\": [\n";
  auto kind_name = [](InterfaceKind k) {
    return k == InterfaceKind::conforming ? "conforming"
           : k == InterfaceKind::ratio_1_2 ? "ratio-1:2" : "glue";
  };
  for (size_t i = 0; i < m.interfaces.size(); ++i) {
    auto& f = m.interfaces[i];
    os << "    {\"a\": " << f.block_a << ", \"side_a\": \"" << side_name(f.side_a)
       << "\", \"b\": " << f.block_b << ", \"side_b\": \"" << side_name(f.side_b)
       << "\", \"kind\": \"" << kind_name(f.kind) << "\"}"
       << (i + 1 < m.interfaces.size() ? "," : "") << '\n';
  }
  os << "  ],\n  \"boundaries\": [\n";
  for (size_t i = 0; i < m.boundaries.size(); ++i) {
    auto& b = m.boundaries[i];
    os << "    {\"block\": " << b.block << ", \"side\": \"" << side_name(b.side)
       << "\", \"condition\": \"" << b.condition << "\"}"
       << (i + 1 < m.boundaries.size() ? "," : "") << '\n';
  }
  os << "  ]\n}\n";
}

}  // namespace sbpsat
