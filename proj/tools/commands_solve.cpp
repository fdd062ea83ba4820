// Direct solver subcommands: one scalar or elastic contact solve with full
// field output, and a nested-refinement self-convergence study.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <siglab/elastic_solver.hpp>
#include <siglab/expr.hpp>
#include <siglab/inverse.hpp>
#include <siglab/measurement.hpp>
#include <siglab/report.hpp>
#include <siglab/scalar_solver.hpp>
#include <siglab/scene.hpp>

#include "commands.hpp"
#include "run_writer.hpp"

namespace siglab::cli {

namespace {

bool is_vector_datum(const std::string& f) { return f.find(',') != std::string::npos; }

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<double> active_mask(int n_verts, const std::vector<int>& active) {
  std::vector<double> mask(n_verts, 0.0);
  for (const int v : active) mask[v] = 1.0;
  return mask;
}

double mean_over(const std::vector<int>& idx, const std::vector<double>& field) {
  if (idx.empty()) return 0.0;
  double s = 0.0;
  for (const int v : idx) s += field[v];
  return s / static_cast<double>(idx.size());
}

}  // namespace

int cmd_solve_scalar(const Options& opt) {
  require(!opt.f.empty(), "solve-scalar needs --f");
  require(opt.h > 0.0, "--h must be positive");
  const LoadedScene ls = read_scene(opt.scene);

  std::ostringstream flags;
  flags << "f=" << opt.f << ";h=" << format_double(opt.h) << ";seed=" << opt.seed;
  RunWriter run("solve-scalar", opt.out, flags.str(), ls.bytes);

  // 1. mesh the domain with the obstacles punched out and solve
  const Mesh mesh = triangulate(solve_domain(ls.scene), opt.h, ls.scene.gamma);
  const Expr f = Expr::parse(opt.f);
  const ScalarSolution sol = solve_scalar(mesh, [&](Vec2 p) { return f.eval(p); });
  if (!sol.converged)
    throw NonConvergenceError("active-set iteration did not converge at h=" +
                              format_double(opt.h));

  // 2. derived quantities: measurement-window flux, contact reactions
  const BoundaryMeasurement trace = measure_scalar_flux(mesh, sol.u);
  const std::vector<double> reaction = reaction_flux(mesh, sol);
  double comp = 0.0, flux_mean = 0.0;
  for (int v = 0; v < mesh.n_verts(); ++v)
    comp = std::max(comp, std::abs(sol.u[v] * sol.lambda[v]));
  for (const Vec2 val : trace.value) flux_mean += val.x;
  if (!trace.value.empty()) flux_mean /= static_cast<double>(trace.value.size());

  // 3. artifacts
  write_vtk(run.path("solution.vtk"), mesh,
            {{"u", sol.u}, {"lambda", sol.lambda}, {"reaction_flux", reaction},
             {"active", active_mask(mesh.n_verts(), sol.active)}},
            {});
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.s.size());
  for (std::size_t i = 0; i < trace.s.size(); ++i)
    rows.push_back({trace.s[i], trace.value[i].x});
  write_csv(run.path("trace.csv"), {"s", "flux"}, rows);
  write_gnuplot(run.path("trace.gp"), "trace.csv", "Normal flux on the measurement window",
                "arc length s", "flux", {{2, "flux"}});

  run.summary = {{"command", "solve-scalar"},
                 {"f", opt.f},
                 {"h", opt.h},
                 {"vertices", mesh.n_verts()},
                 {"iterations", sol.iterations},
                 {"converged", sol.converged},
                 {"active_count", sol.active.size()},
                 {"complementarity_max", comp},
                 {"flux_mean", flux_mean},
                 {"contact_flux_mean", mean_over(sol.active, reaction)}};
  run.finish();

  std::printf("solve-scalar: converged in %d iterations, %zu active of %d vertices\n",
              sol.iterations, sol.active.size(), mesh.n_verts());
  std::printf("flux mean over window %.6g, complementarity max %.3g\n", flux_mean, comp);
  std::printf("wrote %s\n", run.dir().string().c_str());
  return kExitOk;
}

int cmd_solve_elastic(const Options& opt) {
  require(!opt.f.empty(), "solve-elastic needs --f");
  require(is_vector_datum(opt.f), "solve-elastic needs a two-component datum \"fx, fy\"");
  require(opt.h > 0.0, "--h must be positive");
  const LoadedScene ls = read_scene(opt.scene);

  std::ostringstream flags;
  flags << "f=" << opt.f << ";h=" << format_double(opt.h) << ";seed=" << opt.seed;
  RunWriter run("solve-elastic", opt.out, flags.str(), ls.bytes);

  // 1. solve with the default material (mu = lambda = 1)
  const Mesh mesh = triangulate(solve_domain(ls.scene), opt.h, ls.scene.gamma);
  const VectorExpr g = VectorExpr::parse(opt.f);
  const LameParams mat;
  const ElasticSolution sol = solve_elastic(mesh, [&](Vec2 p) { return g.eval(p); }, mat);
  if (!sol.converged)
    throw NonConvergenceError("active-set iteration did not converge at h=" +
                              format_double(opt.h));

  // 2. traction on the measurement window plus contact diagnostics
  const BoundaryMeasurement trace = measure_elastic_traction(mesh, sol.u, mat);
  double comp = 0.0, traction_mean = 0.0, traction_max = 0.0;
  for (int v = 0; v < mesh.n_verts(); ++v)
    comp = std::max(comp, std::abs(sol.p_normal[v] * dot(sol.u[v], mesh.node_normal[v])));
  for (const Vec2 t : trace.value) {
    traction_mean += norm(t);
    traction_max = std::max(traction_max, norm(t));
  }
  if (!trace.value.empty()) traction_mean /= static_cast<double>(trace.value.size());

  // 3. artifacts
  write_vtk(run.path("solution.vtk"), mesh,
            {{"p_normal", sol.p_normal}, {"p_tangent", sol.p_tangent},
             {"active", active_mask(mesh.n_verts(), sol.active)}},
            {{"displacement", sol.u}});
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.s.size());
  for (std::size_t i = 0; i < trace.s.size(); ++i)
    rows.push_back({trace.s[i], trace.value[i].x, trace.value[i].y, norm(trace.value[i])});
  write_csv(run.path("trace.csv"), {"s", "traction_x", "traction_y", "traction_norm"}, rows);
  write_gnuplot(run.path("trace.gp"), "trace.csv", "Traction on the measurement window",
                "arc length s", "traction", {{2, "x"}, {3, "y"}, {4, "norm"}});

  run.summary = {{"command", "solve-elastic"},
                 {"f", opt.f},
                 {"h", opt.h},
                 {"vertices", mesh.n_verts()},
                 {"iterations", sol.iterations},
                 {"converged", sol.converged},
                 {"active_count", sol.active.size()},
                 {"complementarity_max", comp},
                 {"traction_mean", traction_mean},
                 {"traction_max", traction_max},
                 {"contact_pressure_mean", mean_over(sol.active, sol.p_normal)}};
  run.finish();

  std::printf("solve-elastic: converged in %d iterations, %zu active of %d vertices\n",
              sol.iterations, sol.active.size(), mesh.n_verts());
  std::printf("traction max over window %.6g, complementarity max %.3g\n", traction_max, comp);
  std::printf("wrote %s\n", run.dir().string().c_str());
  return kExitOk;
}

int cmd_convergence(const Options& opt) {
  require(!opt.f.empty(), "convergence needs --f");
  require(opt.h > 0.0, "--h must be positive");
  require(opt.levels >= 2, "convergence needs --levels >= 2");
  const LoadedScene ls = read_scene(opt.scene);
  const bool elastic = is_vector_datum(opt.f);

  std::ostringstream flags;
  flags << "f=" << opt.f << ";h=" << format_double(opt.h) << ";levels=" << opt.levels
        << ";seed=" << opt.seed;
  RunWriter run("convergence", opt.out, flags.str(), ls.bytes);

  // 1. solve the nested red-refinement ladder. refine() keeps the parent
  // vertices as a prefix of the child numbering, so successive solutions
  // can be compared pointwise at the coarse vertices with no interpolation.
  Mesh mesh = triangulate(solve_domain(ls.scene), opt.h, ls.scene.gamma);
  std::vector<std::vector<double>> level_rows, diff_rows;
  std::vector<double> diffs;
  std::vector<std::vector<double>> scalar_levels;
  std::vector<std::vector<Vec2>> vector_levels;
  for (int l = 0; l < opt.levels; ++l) {
    const double h_l = opt.h / static_cast<double>(1 << l);
    double contact_mean = 0.0;
    std::size_t active_count = 0;
    int iterations = 0;
    if (elastic) {
      const VectorExpr g = VectorExpr::parse(opt.f);
      const ElasticSolution sol =
          solve_elastic(mesh, [&](Vec2 p) { return g.eval(p); }, LameParams{});
      if (!sol.converged)
        throw NonConvergenceError("elastic solve did not converge at level " +
                                  std::to_string(l));
      vector_levels.push_back(sol.u);
      contact_mean = mean_over(sol.active, sol.p_normal);
      active_count = sol.active.size();
      iterations = sol.iterations;
    } else {
      const Expr f = Expr::parse(opt.f);
      const ScalarSolution sol = solve_scalar(mesh, [&](Vec2 p) { return f.eval(p); });
      if (!sol.converged)
        throw NonConvergenceError("scalar solve did not converge at level " +
                                  std::to_string(l));
      contact_mean = mean_over(sol.active, reaction_flux(mesh, sol));
      scalar_levels.push_back(sol.u);
      active_count = sol.active.size();
      iterations = sol.iterations;
    }
    level_rows.push_back({static_cast<double>(l), h_l, static_cast<double>(mesh.n_verts()),
                          static_cast<double>(active_count), static_cast<double>(iterations),
                          contact_mean});
    if (l + 1 < opt.levels) mesh = refine(mesh);
  }

  // 2. successive differences at shared vertices, and observed rates
  for (int l = 0; l + 1 < opt.levels; ++l) {
    double d = 0.0;
    if (elastic) {
      const auto& coarse = vector_levels[l];
      const auto& fine = vector_levels[l + 1];
      for (std::size_t i = 0; i < coarse.size(); ++i)
        d = std::max(d, norm(fine[i] - coarse[i]));
    } else {
      const auto& coarse = scalar_levels[l];
      const auto& fine = scalar_levels[l + 1];
      for (std::size_t i = 0; i < coarse.size(); ++i)
        d = std::max(d, std::abs(fine[i] - coarse[i]));
    }
    diffs.push_back(d);
    const double rate =
        l > 0 && d > 0.0 ? std::log2(diffs[l - 1] / d) : std::numeric_limits<double>::quiet_NaN();
    diff_rows.push_back({static_cast<double>(l), opt.h / static_cast<double>(1 << l), d, rate});
  }

  // 3. artifacts
  write_csv(run.path("levels.csv"), {"level", "h", "vertices", "active", "iterations",
                                     "contact_mean"},
            level_rows);
  write_csv(run.path("diffs.csv"), {"level", "h", "diff_linf", "rate"}, diff_rows);
  write_gnuplot(run.path("diffs.gp"), "diffs.csv", "Self-convergence under refinement",
                "coarse level", "max pointwise difference", {{3, "diff"}}, true);

  run.summary = {{"command", "convergence"},
                 {"f", opt.f},
                 {"h", opt.h},
                 {"levels", opt.levels},
                 {"kind", elastic ? "elastic" : "scalar"},
                 {"diffs", diffs}};
  if (diffs.size() >= 2) {
    std::vector<double> rates;
    for (std::size_t i = 1; i < diffs.size(); ++i)
      rates.push_back(diffs[i] > 0.0 ? std::log2(diffs[i - 1] / diffs[i]) : 0.0);
    run.summary["rates"] = rates;
  }
  run.finish();

  std::printf("convergence: %d levels from h=%.6g\n", opt.levels, opt.h);
  for (std::size_t i = 0; i < diffs.size(); ++i)
    std::printf("  level %zu -> %zu: diff %.4e\n", i, i + 1, diffs[i]);
  std::printf("wrote %s\n", run.dir().string().c_str());
  return kExitOk;
}

}  // namespace siglab::cli
