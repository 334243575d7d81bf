#include <catch2/catch_amalgamated.hpp>

#include "sbpsat/assemble.hpp"
#include "sbpsat/projection.hpp"

using namespace sbpsat;

namespace {
// small two-block system for structural checks
SemidiscreteSystem small_system(int order, const PenaltyConfig& pen = {},
                                bool unsafe = false) {
  const int nc = order == 2 ? 14 : 21;
  return assemble_two_block(build_projection_pair(order, nc, 1.0 / (nc - 1)), pen, unsafe);
}
}  // namespace

TEST_CASE("penalty lower bound") {
  REQUIRE(tau_bound(0.4, 0.1, 0.1) == Catch::Approx(12.5));
  REQUIRE(tau_bound(0.2508560249, 0.04, 0.1) == Catch::Approx(49.82934));
  // the bound follows the smaller spacing
  REQUIRE(tau_bound(0.4, 0.04, 0.02) == Catch::Approx(62.5));
  REQUIRE_THROWS_AS(tau_bound(-1, 0.1, 0.1), NonpositiveInput);
  REQUIRE_THROWS_AS(tau_bound(0.4, 0.0, 0.1), NonpositiveInput);

  PenaltyConfig pen;
  pen.tau_override = 10.0;  // below the bound for these spacings
  REQUIRE_THROWS_AS(small_system(2, pen), PenaltyBelowBound);
}

TEST_CASE("energy matrix is symmetric") {
  for (int order : {2, 4}) {
    auto sys = small_system(order);
    MatrixXd HQ = sys.H_global.asDiagonal() * MatrixXd(sys.Q_mat);
    double scale = HQ.cwiseAbs().maxCoeff();
    INFO("order " << order);
    REQUIRE((HQ - HQ.transpose()).cwiseAbs().maxCoeff() / scale < 1e-12);
  }
}

TEST_CASE("matrix-free apply matches the assembled sparse matrix") {
  for (int order : {2, 4}) {
    auto sys = small_system(order);
    srand(42);
    VectorXd z = VectorXd::Random(sys.size());
    VectorXd g = VectorXd::Random(sys.size());
    VectorXd a = sys.apply_rhs(z, g);
    VectorXd b = sys.apply_rhs_matrix_free(z, g);
    INFO("order " << order);
    REQUIRE((a - b).cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("constant state with matching data is stationary") {
  for (int order : {2, 4}) {
    auto sys = small_system(order);
    VectorXd z = VectorXd::Constant(sys.size(), 3.5);
    VectorXd rhs = sys.apply_rhs(z, z);
    INFO("order " << order);
    REQUIRE(rhs.cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("conforming coupling through the glue path is exact") {
  for (int order : {2, 4}) {
    const int n = 21;
    auto direct = assemble_conforming_two_block(order, n);
    auto glue = assemble_conforming_as_glue(order, n);
    MatrixXd d = MatrixXd(direct.Q_mat) - MatrixXd(glue.Q_mat);
    double scale = MatrixXd(direct.Q_mat).cwiseAbs().maxCoeff();
    INFO("order " << order);
    REQUIRE(d.cwiseAbs().maxCoeff() / scale < 1e-10);
  }
}

TEST_CASE("under-penalized coupling loses the energy estimate") {
  auto bound_sys = small_system(2);
  PenaltyConfig pen;
  pen.tau_override = 0.5 * bound_sys.tau / 1.2;
  auto sys = small_system(2, pen, /*unsafe=*/true);
  MatrixXd HQ = sys.H_global.asDiagonal() * MatrixXd(sys.Q_mat);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(-0.5 * (HQ + HQ.transpose()),
                                             Eigen::EigenvaluesOnly);
  REQUIRE(es.eigenvalues().minCoeff() < -1e-6);

  // at the default safety factor the same quantity is non-negative
  MatrixXd HQ0 = bound_sys.H_global.asDiagonal() * MatrixXd(bound_sys.Q_mat);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es0(-0.5 * (HQ0 + HQ0.transpose()),
                                              Eigen::EigenvaluesOnly);
  REQUIRE(es0.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("t-junction assembly is well formed") {
  auto sys = assemble_tjunction(2, 0);
  REQUIRE(sys.blocks.size() == 3);
  REQUIRE(sys.size() == 28 * 51 + 27 * 25 + 51 * 50);
  MatrixXd HQ = sys.H_global.asDiagonal() * MatrixXd(sys.Q_mat);
  double scale = HQ.cwiseAbs().maxCoeff();
  REQUIRE((HQ - HQ.transpose()).cwiseAbs().maxCoeff() / scale < 1e-12);
  // constant state, constant data: nothing moves
  VectorXd z = VectorXd::Constant(sys.size(), -1.25);
  REQUIRE(sys.apply_rhs(z, z).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("layout bookkeeping") {
  auto sys = assemble_two_block(2, 0, PairKind::projection_composed);
  REQUIRE(sys.blocks.size() == 2);
  REQUIRE(sys.blocks[0].nx == 26);
  REQUIRE(sys.blocks[1].nx == 51);
  REQUIRE(sys.blocks[1].offset == 26 * 26);
  REQUIRE(sys.size() == 26 * 26 + 51 * 51);
  // sampling uses the same layout as the operators
  VectorXd xs = sys.sample([](double x, double) { return x; });
  REQUIRE(xs(0) == Catch::Approx(-1.0));
  REQUIRE(xs(sys.size() - 1) == Catch::Approx(1.0));
}
