#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "sbpsat/analysis.hpp"
#include "sbpsat/projection.hpp"

using namespace sbpsat;

namespace {
SemidiscreteSystem small_system(int order = 2) {
  const int nc = 14;
  return assemble_two_block(build_projection_pair(order, nc, 1.0 / (nc - 1)));
}
}  // namespace

TEST_CASE("discrete energy basics") {
  auto sys = small_system();
  VectorXd zero = VectorXd::Zero(sys.size());
  auto e0 = discrete_energy(sys, zero, zero);
  REQUIRE(e0.total == 0.0);

  // velocity-only state: energy is the weighted kinetic term
  VectorXd v = VectorXd::Ones(sys.size());
  auto ek = discrete_energy(sys, zero, v);
  REQUIRE(ek.potential == 0.0);
  REQUIRE(ek.kinetic == Catch::Approx(sys.H_global.sum()));
  REQUIRE(ek.total == Catch::Approx(ek.kinetic));

  srand(7);
  for (int k = 0; k < 50; ++k) {
    VectorXd z = VectorXd::Random(sys.size()), zt = VectorXd::Random(sys.size());
    REQUIRE(discrete_energy(sys, z, zt).total >= 0.0);
  }
  REQUIRE_THROWS_AS(discrete_energy(sys, VectorXd::Zero(3), zero), SizeMismatch);
}

TEST_CASE("spectrum of a small stable system") {
  auto sys = small_system();
  auto sp = spectrum(sys);
  REQUIRE((long)sp.eigenvalues.size() == sys.size());
  REQUIRE(sp.max_real <= 1e-8);
  REQUIRE(sp.max_imag <= 1e-8 * sp.radius);
}

TEST_CASE("dense eigensolver size guard") {
  SemidiscreteSystem fake;
  fake.blocks.push_back({90, 90, 0.1, 0.1, 0, 0, 0});
  REQUIRE_THROWS_AS(spectrum(fake), SystemTooLarge);
}

TEST_CASE("error norms") {
  VectorXd a = VectorXd::Zero(100), b = VectorXd::Zero(100);
  b(17) = 0.5;
  auto n = error_norms(a, b, 0.1, 2, 2.0);
  REQUIRE(n.l2 == Catch::Approx(0.1 * 0.5));
  REQUIRE(n.max == Catch::Approx(0.25));
  REQUIRE_THROWS_AS(error_norms(a, VectorXd::Zero(7), 0.1, 2), SizeMismatch);
  REQUIRE_THROWS_AS(error_norms(a, b, 0.1, 2, -1.0), NonpositiveInput);
}

TEST_CASE("convergence rates invert exact powers of two") {
  std::vector<ErrorNorms> levels = {{4e-2, 8e-2}, {1e-2, 1e-2}, {2.5e-3, 1.25e-3}};
  auto rep = convergence_rates(4, levels);
  REQUIRE(rep.rows.size() == 3);
  REQUIRE(std::isnan(rep.rows[0].q_l2));
  REQUIRE(rep.rows[1].q_l2 == Catch::Approx(2.0));
  REQUIRE(rep.rows[1].q_max == Catch::Approx(3.0));
  REQUIRE(rep.rows[2].q_max == Catch::Approx(3.0));
  REQUIRE_THROWS_AS(convergence_rates(4, {{1e-2, 1e-2}}), InsufficientLevels);
}

TEST_CASE("convergence csv layout") {
  std::vector<ErrorNorms> levels = {{4e-2, 8e-2}, {1e-2, 1e-2}};
  auto rep = convergence_rates(2, levels);
  auto path = std::filesystem::temp_directory_path() / "rates.csv";
  write_convergence_csv(rep, path);
  std::ifstream is(path);
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  REQUIRE(header == "order,refinement,l2_error,q_l2,max_error,q_max");
  REQUIRE(row0 == "2,0,0.04,,0.08,");  // empty rate fields on the coarsest level
  REQUIRE(row1.substr(0, 9) == "2,1,0.01,");
}
