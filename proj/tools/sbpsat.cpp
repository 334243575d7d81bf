// Command-line harness: operator verification, interface diagnostics,
// spectra, convergence studies, mesh generation, and single simulations.
// Every command is driven by a key=value config file; outputs are CSV.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sbpsat/analysis.hpp"
#include "sbpsat/assemble.hpp"
#include "sbpsat/coeff_io.hpp"
#include "sbpsat/config.hpp"
#include "sbpsat/meshgen.hpp"
#include "sbpsat/projection.hpp"
#include "sbpsat/timestepping.hpp"

namespace fs = std::filesystem;
using namespace sbpsat;

namespace {

// write-temp-then-rename so partial files never appear under --out
void atomic_write(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw ParseError("cannot open " + tmp.string() + " for writing");
    os << contents;
  }
  fs::rename(tmp, path);
}

PairKind parse_family(const std::string& s) {
  if (s == "interpolation") return PairKind::interpolation;
  if (s == "projection") return PairKind::projection_composed;
  throw ConfigError("family must be 'interpolation' or 'projection', got '" + s + "'");
}

InterfaceOperatorPair make_pair(int order, PairKind family, int nc, double hc) {
  return family == PairKind::interpolation ? build_interpolation_pair(order, nc, hc)
                                           : build_projection_pair(order, nc, hc);
}

int cmd_verify_ops(const Config& cfg, const fs::path& out) {
  auto orders = cfg.has("orders") ? cfg.get_int_list("orders") : std::vector<int>{2, 4};
  std::ostringstream csv;
  csv << "order,source,identity_residual,borrowing_lambda_min,status\n";
  int failures = 0;
  for (int order : orders) {
    std::string source = "embedded";
    double res = 0, lmin = 0;
    std::string status = "pass";
    try {
      SbpOperatorSet s;
      if (order == 2 || order == 4) {
        s = build_sbp(order, GridLine1D::over(0, 1, 21));
      } else {
        fs::path f = find_sbp_coeff_file(order, cfg.get("coeff_dir", "data"));
        if (f.empty()) {
          csv << order << ",none,,,skipped-no-coefficients\n";
          std::printf("order %d: skipped (no coefficient file)\n", order);
          continue;
        }
        source = f.string();
        s = build_sbp_from_coefficients(load_sbp_coefficients(f), GridLine1D::over(0, 1, 21));
      }
      res = verify_sbp_identities(s).max_residual();
      lmin = verify_borrowing(s);
      if (res > 1e-12 || lmin < -1e-10) {
        status = "fail";
        ++failures;
      }
    } catch (const std::exception& e) {
      status = std::string("error: ") + e.what();
      ++failures;
    }
    csv << order << ',' << source << ',' << res << ',' << lmin << ',' << status << '\n';
    std::printf("order %d: %s (identities %.2e, lambda_min %.2e)\n", order, status.c_str(), res,
                lmin);
  }
  atomic_write(out / "verify_ops.csv", csv.str());
  return failures == 0 ? 0 : 1;
}

int cmd_interface_eigs(const Config& cfg, const fs::path& out) {
  auto orders = cfg.has("orders") ? cfg.get_int_list("orders") : std::vector<int>{2, 4};
  const int nc = 25 * (1 << cfg.get_int("refinement", 0)) + 1;
  const double hc = 1.0 / (nc - 1);
  std::ostringstream csv;
  csv << "order,family,k_coarse,k_fine,compatibility\n";
  for (int order : orders)
    for (auto family : {PairKind::interpolation, PairKind::projection_composed}) {
      const char* fname = family == PairKind::interpolation ? "interpolation" : "projection";
      auto pair = make_pair(order, family, nc, hc);
      auto d = xi_diagnostics(pair, hc, hc / 2);
      csv << order << ',' << fname << ',' << std::setprecision(6) << d.k_c << ',' << d.k_f << ','
          << pair.compatibility_residual() << '\n';
      std::printf("order %d %s: k_c=%.3e k_f=%.3e\n", order, fname, d.k_c, d.k_f);
    }
  atomic_write(out / "interface_eigs.csv", csv.str());
  return 0;
}

int cmd_spectrum(const Config& cfg, const fs::path& out) {
  auto orders = cfg.has("orders") ? cfg.get_int_list("orders") : std::vector<int>{2, 4};
  const int r = cfg.get_int("refinement", 0);
  const std::string mesh = cfg.get("mesh", "two-block");
  PenaltyConfig pen;
  pen.safety = cfg.get_double("tau_safety", 1.2);
  std::ostringstream csv;
  csv << "order,family,max_real,max_imag,radius\n";
  for (int order : orders)
    for (auto family : {PairKind::interpolation, PairKind::projection_composed}) {
      const char* fname = family == PairKind::interpolation ? "interpolation" : "projection";
      if (mesh == "t-junction" && family == PairKind::interpolation) continue;
      SemidiscreteSystem sys = mesh == "t-junction" ? assemble_tjunction(order, r, pen)
                                                    : assemble_two_block(order, r, family, pen);
      auto sp = spectrum(sys);
      csv << order << ',' << fname << ',' << std::setprecision(6) << sp.max_real << ','
          << sp.max_imag << ',' << sp.radius << '\n';
      std::printf("%s order %d %s: max Re %.4e, max |Im|/radius %.2e\n", mesh.c_str(), order,
                  fname, sp.max_real, sp.radius > 0 ? sp.max_imag / sp.radius : 0.0);
    }
  atomic_write(out / "spectrum.csv", csv.str());
  return 0;
}

SemidiscreteSystem make_system(const std::string& mesh, int order, PairKind family, int r,
                               const PenaltyConfig& pen) {
  if (mesh == "two-block") return assemble_two_block(order, r, family, pen);
  if (mesh == "t-junction") return assemble_tjunction(order, r, pen);
  if (mesh == "single-block")
    return assemble_single_block(order, 50 * (1 << r) + 1, 25 * (1 << r) + 1, pen);
  throw ConfigError("mesh must be two-block, t-junction or single-block, got '" + mesh + "'");
}

int cmd_converge(const Config& cfg, const fs::path& out) {
  auto orders = cfg.has("orders") ? cfg.get_int_list("orders") : std::vector<int>{2, 4};
  const int r_max = cfg.get_int("r_max", 1);
  const double t_f = cfg.get_double("t_f", 2.0);
  const std::string mesh = cfg.get("mesh", "two-block");
  PairKind family = parse_family(cfg.get("family", "projection"));
  PenaltyConfig pen;
  pen.safety = cfg.get_double("tau_safety", 1.2);
  if (r_max < 1) throw InsufficientLevels();
  for (int order : orders) {
    std::vector<ErrorNorms> levels;
    for (int r = 0; r <= r_max; ++r) {
      auto sys = make_system(mesh, order, family, r, pen);
      double dt = cfg.get_double("dt_factor", dt_rule_factor(order)) * min_spacing(sys);
      auto sf = run_manufactured(sys, t_f, dt);
      VectorXd ex = sys.sample([&](double x, double y) { return manufactured::u(x, y, sf.t); });
      levels.push_back(error_norms(sys, sf.z, ex, manufactured::amplitude));
      std::printf("order %d r=%d: L2 %.4e max %.4e\n", order, r, levels.back().l2,
                  levels.back().max);
    }
    auto rep = convergence_rates(order, levels);
    write_convergence_csv(rep, out / ("converge_order" + std::to_string(order) + ".csv"));
    for (size_t i = 1; i < rep.rows.size(); ++i)
      std::printf("order %d r=%zu: q_l2 %.3f q_max %.3f\n", order, i, rep.rows[i].q_l2,
                  rep.rows[i].q_max);
  }
  return 0;
}

int cmd_mesh(const Config& cfg, const fs::path& out) {
  const std::string kind = cfg.get("kind", "two-block");
  const int r = cfg.get_int("refinement", 0);
  MultiBlockMesh m;
  if (kind == "two-block") m = build_two_block_mesh(r);
  else if (kind == "t-junction") m = build_tjunction_mesh(r);
  else if (kind == "cavity-t") m = build_cavity_mesh(CavityStyle::t_partitioning);
  else if (kind == "cavity-n") m = build_cavity_mesh(CavityStyle::n_partitioning);
  else if (kind == "inclusion-conforming") m = build_inclusion_mesh(true);
  else if (kind == "inclusion-nonconforming") m = build_inclusion_mesh(false);
  else throw ConfigError("unknown mesh kind '" + kind + "'");
  export_mesh_csv(m, out / (kind + "_points.csv"));
  export_mesh_topology(m, out / (kind + "_topology.json"));
  std::printf("%s: %zu blocks, %ld points\n", kind.c_str(), m.blocks.size(), m.total_points());
  return 0;
}

int cmd_solve(const Config& cfg, const fs::path& out) {
  const int order = cfg.get_int("order", 4);
  const int r = cfg.get_int("refinement", 0);
  const double t_f = cfg.get_double("t_f", 2.0);
  const std::string mesh = cfg.get("mesh", "two-block");
  PairKind family = parse_family(cfg.get("family", "projection"));
  PenaltyConfig pen;
  pen.safety = cfg.get_double("tau_safety", 1.2);
  auto sys = make_system(mesh, order, family, r, pen);
  double dt = cfg.get_double("dt_factor", dt_rule_factor(order)) * min_spacing(sys);
  std::ostringstream energy_log, error_log;
  energy_log << "t,value\n";
  error_log << "t,value\n";
  SimulateOptions opt;
  opt.blowup_guard = cfg.get_double("blowup_guard", 1e6);
  int stride = cfg.get_int("observer_stride", 10);
  opt.observers.push_back({stride, [&](const SimulationState& s) {
    energy_log << s.t << ',' << discrete_energy(sys, s.z, s.z_t, s.t).total << '\n';
  }});
  opt.observers.push_back({stride, [&](const SimulationState& s) {
    VectorXd ex = sys.sample([&](double x, double y) { return manufactured::u(x, y, s.t); });
    error_log << s.t << ',' << error_norms(sys, s.z, ex, manufactured::amplitude).l2 << '\n';
  }});
  try {
    auto g = [&](double t) {
      return sys.sample([t](double x, double y) { return manufactured::u(x, y, t); });
    };
    SimulationState s0;
    s0.z = g(0.0);
    s0.z_t = sys.sample([](double x, double y) { return manufactured::u_t(x, y, 0.0); });
    auto sf = simulate(sys, std::move(s0), t_f, dt, g, opt);
    VectorXd ex = sys.sample([&](double x, double y) { return manufactured::u(x, y, sf.t); });
    auto en = error_norms(sys, sf.z, ex, manufactured::amplitude);
    std::printf("final t=%.4f: L2 %.4e max %.4e\n", sf.t, en.l2, en.max);
  } catch (const BlowupDetected& e) {
    std::printf("%s\n", e.what());
    atomic_write(out / "energy.csv", energy_log.str());
    atomic_write(out / "error.csv", error_log.str());
    return 2;
  }
  atomic_write(out / "energy.csv", energy_log.str());
  atomic_write(out / "error.csv", error_log.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBP-SAT multi-block wave equation toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  int (*handler)(const Config&, const fs::path&) = nullptr;
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const Config&, const fs::path&);
  };
  const Cmd cmds[] = {
      {"verify-ops", "verify operator identities and borrowing bounds", cmd_verify_ops},
      {"interface-eigs", "interface operator eigenvalue diagnostics", cmd_interface_eigs},
      {"spectrum", "dense spectrum of the assembled system", cmd_spectrum},
      {"converge", "manufactured-solution convergence study", cmd_converge},
      {"mesh", "generate and export multi-block meshes", cmd_mesh},
      {"solve", "run one simulation with observers", cmd_solve},
  };
  for (auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->callback([&, fn = c.fn] { handler = fn; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    Config cfg = Config::load(config_path);
    if (const char* env = std::getenv("SBPSAT_COEFF_DIR")) cfg.set("coeff_dir", env);
    fs::create_directories(out_dir);
    return handler(cfg, out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
