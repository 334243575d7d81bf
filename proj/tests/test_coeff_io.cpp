#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "sbpsat/coeff_io.hpp"
#include "sbpsat/interface.hpp"

using namespace sbpsat;
namespace fs = std::filesystem;

namespace {
fs::path tmpfile(const char* name) { return fs::temp_directory_path() / name; }
}  // namespace

TEST_CASE("operator coefficient files round-trip") {
  for (int order : {2, 4}) {
    auto grid = GridLine1D::over(0, 1, 21);
    auto direct = build_sbp(order, grid);
    auto path = tmpfile("sbp_roundtrip.txt");
    save_sbp_coefficients(path, extract_coefficients(direct));
    auto rebuilt = build_sbp_from_coefficients(load_sbp_coefficients(path), grid);
    REQUIRE((rebuilt.D1 - direct.D1).cwiseAbs().maxCoeff() < 1e-13 / grid.h);
    REQUIRE((rebuilt.D2 - direct.D2).cwiseAbs().maxCoeff() < 1e-12 / (grid.h * grid.h));
    REQUIRE((rebuilt.H - direct.H).cwiseAbs().maxCoeff() < 1e-15);
    REQUIRE(rebuilt.alpha == Catch::Approx(direct.alpha));
  }
}

TEST_CASE("tampered coefficients are rejected") {
  auto direct = build_sbp(4, GridLine1D::over(0, 1, 21));
  auto c = extract_coefficients(direct);
  c.d1_closure(0, 0) += 1e-3;
  auto path = tmpfile("sbp_tampered.txt");
  save_sbp_coefficients(path, c);
  REQUIRE_THROWS_AS(build_sbp_from_coefficients(load_sbp_coefficients(path),
                                                GridLine1D::over(0, 1, 21)),
                    CoefficientValidationFailed);
}

TEST_CASE("malformed coefficient files are rejected") {
  auto path = tmpfile("sbp_garbage.txt");
  std::ofstream(path) << "not a coefficient file\n";
  REQUIRE_THROWS_AS(load_sbp_coefficients(path), ParseError);
  REQUIRE_THROWS_AS(load_sbp_coefficients(tmpfile("does_not_exist.txt")), ParseError);
}

TEST_CASE("interface pair files round-trip and reject incompatibility") {
  auto pair = build_interpolation_pair(4, 26, 0.04);
  auto path = tmpfile("iface_roundtrip.txt");
  save_interface_pair(path, pair);
  auto loaded = load_interface_pair(path);
  REQUIRE((loaded.I_c2f - pair.I_c2f).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((loaded.I_f2c - pair.I_f2c).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(loaded.kind == pair.kind);

  auto bad = pair;
  bad.I_f2c(0, 0) += 1e-6;  // breaks the adjoint relation
  auto badpath = tmpfile("iface_bad.txt");
  save_interface_pair(badpath, bad);
  REQUIRE_THROWS_AS(load_interface_pair(badpath), CompatibilityViolation);
}

TEST_CASE("coefficient directory resolution honors the environment") {
  unsetenv("SBPSAT_COEFF_DIR");
  REQUIRE(coeff_dir("fallback_dir") == fs::path("fallback_dir"));
  setenv("SBPSAT_COEFF_DIR", "/tmp/elsewhere", 1);
  REQUIRE(coeff_dir("fallback_dir") == fs::path("/tmp/elsewhere"));
  unsetenv("SBPSAT_COEFF_DIR");
  REQUIRE(find_sbp_coeff_file(6, "no_such_dir").empty());
}
