#pragma once

#include <string>

namespace siglab::cli {

// Exit codes shared by every subcommand. Validation covers bad flags,
// malformed scenes and geometry that the solvers refuse; non-convergence
// covers active-set iteration budgets and failed reconstructions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitUsage = 64;

/// Union of all subcommand flags. Each command reads the subset it
/// documents and ignores the rest; defaults here are the CLI defaults.
struct Options {
  std::string scene;        // path to a scene JSON file
  std::string f;            // boundary datum expression; "fx, fy" = elastic
  double h = 0.1;           // target mesh size
  int levels = 3;           // refinement ladder length
  std::string out = "runs"; // parent directory for run output
  unsigned seed = 0;        // reserved for randomized studies
  double tol = 0.0;         // 0 = command-specific default
  double omega = 0.1;       // angular speed of the rigid datum
  std::string c = "0,0";    // translation part, or "-Ap" for -omega*perp(p)
  double r0 = 0.0;          // initial radius for reconstruction
  int segments = 48;        // radial obstacle discretization
  int k = 0;                // Fourier order of the radial parametrization
  bool crime_free = false;  // synthesize target on a rotated mesh family
};

int cmd_solve_scalar(const Options& opt);
int cmd_solve_elastic(const Options& opt);
int cmd_geometry(const Options& opt);
int cmd_distinguish(const Options& opt);
int cmd_counterexample(const Options& opt);
int cmd_upsilon(const Options& opt);
int cmd_gauss_green(const Options& opt);
int cmd_reconstruct(const Options& opt);
int cmd_convergence(const Options& opt);

}  // namespace siglab::cli
