#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "avem/avem.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Adaptive H(div) virtual element eigensolver for the acoustic vibration problem"};

  std::string domain = "square";
  std::string pattern = "squares";
  int resolution = 8;
  std::uint64_t seed = 1;
  std::string mode = "adaptive";
  int eig_index = 1;
  double theta = 0.5;
  int max_ndof = 20000;
  int max_steps = 40;
  std::string out_dir;
  bool svg = false;

  app.add_option("--domain", domain, "square|lshape|hshape|circle")->capture_default_str();
  app.add_option("--pattern", pattern, "triangles|squares|hexagons|trapezoids|mix|voronoi")
      ->capture_default_str();
  app.add_option("--resolution", resolution, "initial mesh resolution (sites for voronoi)")
      ->capture_default_str();
  app.add_option("--seed", seed, "random seed (voronoi only)")->capture_default_str();
  app.add_option("--mode", mode, "uniform|adaptive")->capture_default_str();
  app.add_option("--eig-index", eig_index, "1-based index among positive eigenvalues")
      ->capture_default_str();
  app.add_option("--theta", theta, "marking fraction of the max indicator")->capture_default_str();
  app.add_option("--max-ndof", max_ndof, "stop once free DOFs reach this count")
      ->capture_default_str();
  app.add_option("--max-steps", max_steps, "maximum refinement steps")->capture_default_str();
  app.add_option("--out", out_dir, "output directory (required)")->required();
  app.add_flag("--svg", svg, "render per-step mesh SVGs and the final field figure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  avem::RunConfig cfg;
  try {
    cfg.domain = avem::make_domain(domain);
    cfg.pattern = avem::pattern_from_string(pattern);
    if (mode == "uniform")
      cfg.mode = avem::RunMode::uniform;
    else if (mode == "adaptive")
      cfg.mode = avem::RunMode::adaptive;
    else
      throw avem::ConfigError("unknown mode: " + mode);
    if (resolution < 1) throw avem::ConfigError("resolution must be >= 1");
    if (eig_index < 1) throw avem::ConfigError("--eig-index must be >= 1");
    if (!(theta > 0.0 && theta <= 1.0)) throw avem::ConfigError("--theta must lie in (0,1]");
    cfg.resolution = resolution;
    cfg.seed = seed;
    cfg.eig_index = eig_index;
    cfg.theta_mark = theta;
    cfg.max_ndof = max_ndof;
    cfg.max_steps = max_steps;
  } catch (const avem::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << out << ": " << ec.message() << "\n";
    return 2;
  }

  avem::PolygonalMesh final_mesh;
  Eigen::VectorXd final_w;
  double final_lambda = 0.0;

  const auto observer = [&](const avem::StepContext& ctx) {
    const std::string tag = "mesh_step_" + std::to_string(ctx.step);
    avem::write_mesh_json(*ctx.mesh, out / (tag + ".json"));
    if (svg) {
      std::vector<double> eta_k;
      eta_k.reserve(ctx.report->indicators.size());
      for (const auto& ind : ctx.report->indicators) eta_k.push_back(std::sqrt(ind.eta_sq));
      avem::render_svg(*ctx.mesh, &eta_k, out / (tag + ".svg"));
    }
    final_mesh = *ctx.mesh;
    final_w = ctx.pair->w;
    final_lambda = ctx.pair->lambda;
    std::printf("step %3d  N %7d  lambda_h %.8f  eta^2 %.6e\n", ctx.step, ctx.dofmap->n_free,
                ctx.pair->lambda, ctx.report->eta * ctx.report->eta);
    std::fflush(stdout);
  };

  avem::ConvergenceHistory hist = avem::run(cfg, observer);
  if (hist.steps.empty()) {
    std::cerr << "solver failure: " << hist.failure << "\n";
    return 3;
  }

  std::optional<avem::ExtrapolationResult> ex;
  std::optional<double> rate;
  if (hist.steps.size() >= 4) {
    ex = avem::extrapolate(hist);
    try {
      rate = avem::estimate_rate(hist, ex->lambda_star);
    } catch (const avem::InsufficientData&) {
    }
  }

  avem::write_history_csv(hist, out / "history.csv");
  avem::detail::write_file_atomic(out / "summary.json", avem::summary_to_json(hist, ex, rate));
  if (svg && final_mesh.n_cells() > 0 && final_lambda > 0.0) {
    const avem::DofMap dm = avem::build_dof_map(final_mesh, 0);
    const avem::FieldReconstruction fields =
        avem::reconstruct_fields(final_mesh, dm, final_w, final_lambda);
    avem::render_fields_svg(final_mesh, fields, out / "fields_final.svg");
  }

  std::printf("\n%-6s %-8s %-14s %-13s %-13s %-13s %-12s %-10s\n", "step", "N", "lambda_h",
              "theta^2", "J^2", "eta^2", "error", "eff");
  for (std::size_t i = 0; i < hist.steps.size(); ++i) {
    const auto& r = hist.steps[i];
    std::printf("%-6zu %-8d %-14.8f %-13.4e %-13.4e %-13.4e ", i, r.n, r.lambda_h, r.theta_sq,
                r.jump_sq, r.eta_sq);
    if (r.error) std::printf("%-12.4e ", *r.error); else std::printf("%-12s ", "-");
    if (r.effectivity) std::printf("%-10.4f\n", *r.effectivity); else std::printf("%-10s\n", "-");
  }
  if (ex)
    std::printf("\nextrapolated lambda* = %.6f  (alpha = %.3f, fit residual %.2e)\n",
                ex->lambda_star, ex->alpha, ex->fit_residual);
  if (rate) std::printf("rate vs lambda*: N^(%.3f)\n", *rate);

  if (hist.failed()) {
    std::cerr << "solver failure after " << hist.steps.size() << " steps: " << hist.failure << "\n";
    return 3;
  }
  return 0;
}
