#include "ife/driver.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  ife::run_config cfg;

  // the config file seeds the defaults; explicit flags then override its keys
  try {
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") cfg = ife::load_config_file(argv[i + 1], cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{"immersed finite element interpolation, solve and verification driver"};
  std::string config_path, mesh_sizes = ife::join_sizes(cfg.mesh_sizes);
  app.add_option("--config", config_path, "flat JSON config file; keys match these flags");
  app.add_option("--mode", cfg.mode, "interp | solve | verify")->capture_default_str();
  app.add_option("--element", cfg.element, "p1 | cr | q1 | rq1")->capture_default_str();
  app.add_option("--beta-minus", cfg.beta_minus, "diffusion coefficient inside the interface")
      ->capture_default_str();
  app.add_option("--beta-plus", cfg.beta_plus, "diffusion coefficient outside the interface")
      ->capture_default_str();
  app.add_option("--mesh-sizes", mesh_sizes, "comma-separated cells per axis, increasing")
      ->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "edge penalty weight; negative selects 10*max(beta)")
      ->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "interface-band width parameter in (0, 1/sqrt(2))")
      ->capture_default_str();
  app.add_option("--epsilon-flag", cfg.epsilon_flag, "scheme symmetry: -1, 0 or +1")
      ->capture_default_str();
  app.add_option("--kappa-bar", cfg.kappa_bar, "normal-deviation allowance")
      ->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "skew-harmonic admissibility slack in (0,1)")
      ->capture_default_str();
  app.add_option("--quad-degree", cfg.quad_degree, "Gauss points per direction")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for the randomized verification suites")
      ->capture_default_str();
  app.add_option("--output", cfg.output, "report path; empty writes to stdout")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "csv | md")->capture_default_str();
  app.add_option("--curve-kind", cfg.curve_kind, "circle | ellipse")->capture_default_str();
  app.add_option("--curve-r", cfg.curve_r, "circle radius")->capture_default_str();
  app.add_option("--curve-cx", cfg.curve_cx, "interface center x")->capture_default_str();
  app.add_option("--curve-cy", cfg.curve_cy, "interface center y")->capture_default_str();
  app.add_option("--curve-a", cfg.curve_a, "ellipse semi-axis a")->capture_default_str();
  app.add_option("--curve-b", cfg.curve_b, "ellipse semi-axis b")->capture_default_str();
  app.add_option("--cg-tol", cfg.cg_tol, "solver relative residual tolerance")
      ->capture_default_str();
  app.add_option("--dump-solution", cfg.dump_solution, "csv path for the finest nodal vector");
  app.add_option("--dump-mesh", cfg.dump_mesh, "csv path for the finest element classification");
  app.add_option("--dump-ife", cfg.dump_ife, "csv path for the finest immersed basis coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    cfg.mesh_sizes = ife::parse_sizes(mesh_sizes);
    ife::validate_config(cfg);

    if (cfg.mode == "verify") {
      ife::verify_report rep = ife::run_verify(cfg);
      std::cout << rep.text();
      std::cout << (rep.pass() ? "verification passed" : "verification FAILED") << "\n";
      return rep.pass() ? 0 : 2;
    }

    const bool want_artifacts =
        !cfg.dump_solution.empty() || !cfg.dump_mesh.empty() || !cfg.dump_ife.empty();
    ife::run_artifacts art;
    ife::convergence_report rep = ife::run_convergence(cfg, want_artifacts ? &art : nullptr);
    const std::string text = ife::emit_report(rep, cfg.format);
    if (cfg.output.empty())
      std::cout << text;
    else
      ife::write_text(cfg.output, text);
    std::cerr << "completed in " << rep.wall_seconds << " s\n";

    if (!cfg.dump_solution.empty()) ife::write_text(cfg.dump_solution, ife::dump_solution_csv(art));
    if (!cfg.dump_mesh.empty()) ife::write_text(cfg.dump_mesh, ife::dump_mesh_csv(art));
    if (!cfg.dump_ife.empty()) ife::write_text(cfg.dump_ife, ife::dump_ife_csv(art));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
