#include "siglab/inverse.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "siglab/expr.hpp"
#include "siglab/scalar_solver.hpp"

namespace siglab {

namespace {

Mesh build_mesh(const ExperimentConfig& config, const PolygonalSet& obstacle, int extra_refines,
                double h_scale) {
  const PolygonalSet domain =
      obstacle.rings.empty() ? config.omega : punch_holes(config.omega, {&obstacle});
  Mesh mesh = triangulate(domain, config.h * h_scale, config.gamma);
  for (int i = 0; i < extra_refines; ++i) mesh = refine(mesh);
  return mesh;
}

BoundaryMeasurement forward_scaled(const ExperimentConfig& config, const PolygonalSet& obstacle,
                                   int extra_refines, double h_scale) {
  const Mesh mesh = build_mesh(config, obstacle, extra_refines, h_scale);
  if (config.kind == ProblemKind::kScalar) {
    const Expr f = Expr::parse(config.f);
    const ScalarSolution sol = solve_scalar(mesh, [&f](Vec2 p) { return f.eval(p); });
    if (!sol.converged) throw NonConvergenceError("forward map: scalar solve did not converge");
    return measure_scalar_flux(mesh, sol.u);
  }
  const VectorExpr f = VectorExpr::parse(config.f);
  const ElasticSolution sol =
      solve_elastic(mesh, [&f](Vec2 p) { return f.eval(p); }, config.lame);
  if (!sol.converged) throw NonConvergenceError("forward map: elastic solve did not converge");
  return measure_elastic_traction(mesh, sol.u, config.lame);
}

// Datum samples on the outer ring of omega: vertices and edge midpoints.
std::vector<Vec2> ring_samples(const PolygonalSet& omega) {
  if (omega.rings.empty()) throw GeometryError("experiment domain has no boundary");
  const std::vector<Vec2>& pts = omega.rings[0].pts;
  std::vector<Vec2> out;
  out.reserve(2 * pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    out.push_back(pts[j]);
    out.push_back(0.5 * (pts[j] + pts[(j + 1) % pts.size()]));
  }
  return out;
}

double max_edge_length(const PolygonalSet& s) {
  double m = 0.0;
  for (const Ring& ring : s.rings)
    for (std::size_t j = 0; j < ring.pts.size(); ++j)
      m = std::max(m, dist(ring.pts[j], ring.pts[(j + 1) % ring.pts.size()]));
  return m;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kDistinguished: return "DISTINGUISHED";
    case Verdict::kObstructed: return "OBSTRUCTED";
    case Verdict::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

std::string to_string(ReconStatus s) {
  switch (s) {
    case ReconStatus::kConverged: return "converged";
    case ReconStatus::kStagnated: return "stagnated";
    case ReconStatus::kFailed: return "failed";
    case ReconStatus::kMaxIterations: return "max-iterations";
  }
  return "max-iterations";
}

BoundaryMeasurement forward_map(const ExperimentConfig& config, const PolygonalSet& obstacle,
                                int extra_refines) {
  return forward_scaled(config, obstacle, extra_refines, 1.0);
}

GapReport distinguishability(const ExperimentConfig& config, const PolygonalSet& o1,
                             const PolygonalSet& o2) {
  GapReport rep;
  const double spacing = config.h / 2.0;

  // The obstruction screens run on the datum alone and take precedence:
  // when the datum cannot separate ANY pair, a small measured gap proves
  // nothing either way.
  if (config.kind == ProblemKind::kScalar) {
    const Expr f = Expr::parse(config.f);
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Vec2 p : ring_samples(config.omega)) {
      const double v = f.eval(p);
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi)) && lo >= -1e-12) {
      rep.verdict = Verdict::kObstructed;
      rep.reason = "boundary datum is a nonnegative constant";
    }
  } else {
    const VectorExpr f = VectorExpr::parse(config.f);
    const std::vector<Vec2> pts = ring_samples(config.omega);
    std::vector<Vec2> vals(pts.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      vals[i] = f.eval(pts[i]);
      scale = std::max(scale, norm(vals[i]));
    }
    const RigidFit fit = fit_rigid_motion(pts, vals);
    if (fit.residual_linf <= 1e-10 * std::max(1.0, scale)) {
      // Rigid datum: the pair is only obstructed if BOTH obstacles admit it
      // tangentially. Polygonal members of the tangential family carry an
      // edge-chord residual, so the membership tolerance scales with the
      // coarsest edge.
      auto member = [&fit](const PolygonalSet& ob) {
        UpsilonQuery q;
        q.obstacle = ob;
        q.rigid = fit.motion;
        q.tolerance = 0.75 * std::abs(fit.motion.omega) * max_edge_length(ob) + 1e-12;
        return upsilon_membership(q).member;
      };
      if (member(o1) && member(o2)) {
        rep.verdict = Verdict::kObstructed;
        rep.reason = "datum is a rigid motion and both obstacles admit it tangentially";
      }
    }
  }

  const BoundaryMeasurement m1 = forward_map(config, o1);
  const BoundaryMeasurement m2 = forward_map(config, o2);
  rep.gap = gap(m1, m2, spacing);
  const BoundaryMeasurement m1f = forward_map(config, o1, 1);
  const BoundaryMeasurement m2f = forward_map(config, o2, 1);
  rep.error_estimate = std::max(gap(m1, m1f, spacing).l2, gap(m2, m2f, spacing).l2);

  if (rep.verdict != Verdict::kObstructed) {
    if (rep.gap.l2 > 10.0 * rep.error_estimate) {
      rep.verdict = Verdict::kDistinguished;
      rep.reason = "measurement gap exceeds ten times the refinement drift";
    } else {
      rep.verdict = Verdict::kInconclusive;
      rep.reason = "measurement gap is within the discretization error";
    }
  }
  return rep;
}

UpsilonResult upsilon_membership(const UpsilonQuery& q) {
  if (!(q.tolerance > 0.0)) throw std::invalid_argument("upsilon query: tolerance must be positive");
  UpsilonResult out;
  for (const Ring& ring : q.obstacle.rings) {
    const std::size_t n = ring.pts.size();
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 p = ring.pts[j];
      const Vec2 pn = ring.pts[(j + 1) % n];
      const double len = dist(p, pn);
      if (len == 0.0) continue;
      // rings keep the region on the left, so outward is -perp
      const Vec2 nu = -1.0 * perp((pn - p) / len);
      // the velocity is affine along the edge, so endpoint values bound it
      out.residual = std::max(out.residual, std::abs(dot(q.rigid.apply(p), nu)));
      out.residual = std::max(out.residual, std::abs(dot(q.rigid.apply(pn), nu)));
    }
  }
  out.member = out.residual <= q.tolerance;
  return out;
}

bool upsilon_empty_certificate(const RigidMotion& rigid, const PolygonalSet& omega) {
  // |A x| = |omega| |x| peaks at a boundary vertex of the polygon
  double m = 0.0;
  for (const Ring& ring : omega.rings)
    for (const Vec2 p : ring.pts) m = std::max(m, std::abs(rigid.omega) * norm(p));
  return norm(rigid.c) > m;
}

PolygonalSet RadialObstacle::polygon() const {
  if (a.size() != b.size())
    throw std::invalid_argument("radial obstacle: cosine and sine harmonics must pair up");
  if (a.size() > 4) throw std::invalid_argument("radial obstacle: at most four harmonics");
  if (segments < 8) throw std::invalid_argument("radial obstacle: at least eight segments");
  std::vector<Vec2> pts;
  pts.reserve(segments);
  for (int j = 0; j < segments; ++j) {
    const double th = 2.0 * std::numbers::pi * j / segments;
    double r = r0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double kk = static_cast<double>(k + 1);
      r += a[k] * std::cos(kk * th) + b[k] * std::sin(kk * th);
    }
    if (!(r > 0.0)) throw GeometryError("radial obstacle: nonpositive radius");
    pts.push_back(center + r * Vec2{std::cos(th), std::sin(th)});
  }
  return make_polygon(pts, BoundarySource::kObstacle1);
}

namespace {

std::vector<double> pack(const RadialObstacle& o) {
  std::vector<double> th;
  th.push_back(o.r0);
  th.insert(th.end(), o.a.begin(), o.a.end());
  th.insert(th.end(), o.b.begin(), o.b.end());
  return th;
}

RadialObstacle unpack(const RadialObstacle& proto, const std::vector<double>& th) {
  RadialObstacle o = proto;
  o.r0 = th[0];
  const std::size_t k = proto.a.size();
  for (std::size_t i = 0; i < k; ++i) {
    o.a[i] = th[1 + i];
    o.b[i] = th[1 + k + i];
  }
  return o;
}

// Fixed arc-length grid over the target window with L2 quadrature weights:
// rectangle rule around the ring when closed, trapezoid on the span when
// open. Every candidate profile is evaluated on this same grid.
struct MisfitGrid {
  std::vector<double> s, w;
};

MisfitGrid make_grid(const BoundaryMeasurement& target, double spacing) {
  MisfitGrid g;
  if (target.closed) {
    const int n = std::max(1, static_cast<int>(std::ceil(target.length / spacing)));
    const double step = target.length / n;
    for (int k = 0; k < n; ++k) {
      g.s.push_back(k * step);
      g.w.push_back(step);
    }
  } else {
    const double span = target.s.back() - target.s.front();
    const int n = std::max(1, static_cast<int>(std::ceil(span / spacing)));
    const double step = span / n;
    for (int k = 0; k <= n; ++k) {
      g.s.push_back(target.s.front() + k * step);
      g.w.push_back((k == 0 || k == n) ? 0.5 * step : step);
    }
  }
  return g;
}

Eigen::VectorXd residual_on_grid(const MisfitGrid& grid, const BoundaryMeasurement& m,
                                 const BoundaryMeasurement& target) {
  Eigen::VectorXd r(2 * grid.s.size());
  for (std::size_t i = 0; i < grid.s.size(); ++i) {
    const Vec2 d = sample(m, grid.s[i]) - sample(target, grid.s[i]);
    const double sw = std::sqrt(grid.w[i]);
    r[2 * i] = sw * d.x;
    r[2 * i + 1] = sw * d.y;
  }
  return r;
}

}  // namespace

ReconstructionResult reconstruct(const ExperimentConfig& config, const BoundaryMeasurement& target,
                                 const RadialObstacle& init, bool crime_free) {
  if (target.s.empty()) throw std::invalid_argument("reconstruct: empty target measurement");
  const double h_scale = crime_free ? std::sqrt(2.0) : 1.0;
  const double spacing = config.h / 2.0;
  const MisfitGrid grid = make_grid(target, spacing);
  const double fd_step = 1e-4 * init.r0;

  ReconstructionResult res;
  res.obstacle = init;

  auto eval = [&](const std::vector<double>& th) -> std::optional<Eigen::VectorXd> {
    try {
      const PolygonalSet poly = unpack(init, th).polygon();
      const BoundaryMeasurement m = forward_scaled(config, poly, 0, h_scale);
      ++res.forward_evals;
      return residual_on_grid(grid, m, target);
    } catch (const std::exception&) {
      return std::nullopt;  // left omega, nonpositive radius or solve failure
    }
  };

  std::vector<double> th = pack(init);
  const int np = static_cast<int>(th.size());
  auto r_opt = eval(th);
  if (!r_opt) throw GeometryError("reconstruct: initial obstacle is infeasible");
  Eigen::VectorXd r = *r_opt;
  res.misfit_history.push_back(r.norm());

  double target_scale = 0.0;
  for (std::size_t i = 0; i < grid.s.size(); ++i)
    target_scale += grid.w[i] * norm2(sample(target, grid.s[i]));
  const double floor_tol = 1e-10 * std::max(1.0, std::sqrt(target_scale));

  if (res.misfit_history.back() <= floor_tol) {
    res.status = ReconStatus::kConverged;
    return res;
  }

  for (int outer = 0; outer < 60; ++outer) {
    Eigen::MatrixXd jac(r.size(), np);
    for (int k = 0; k < np; ++k) {
      std::vector<double> thk = th;
      thk[k] += fd_step;
      const auto rk = eval(thk);
      if (rk)
        jac.col(k) = (*rk - r) / fd_step;
      else
        jac.col(k).setZero();  // direction infeasible this close to the boundary
    }

    Eigen::VectorXd delta =
        (jac.transpose() * jac).ldlt().solve(-jac.transpose() * r);
    if (!delta.allFinite() || delta.norm() == 0.0) {
      res.status = ReconStatus::kStagnated;
      break;
    }
    // keep candidates desk-scale: noise Jacobians otherwise propose wild steps
    const double lim = 0.25 * init.r0;
    const double dinf = delta.cwiseAbs().maxCoeff();
    if (dinf > lim) delta *= lim / dinf;

    bool accepted = false;
    int rejections = 0, infeasible = 0;
    Eigen::VectorXd step = delta;
    std::vector<double> thc(th);
    Eigen::VectorXd rc;
    while (rejections < 20) {
      for (int k = 0; k < np; ++k) thc[k] = th[k] + step[k];
      const auto rcand = eval(thc);
      if (!rcand) {
        ++rejections;
        ++infeasible;
        step *= 0.5;
        continue;
      }
      // demand a real decrease so noise on a flat misfit cannot pass as progress
      if (rcand->norm() < res.misfit_history.back() * (1.0 - 1e-9)) {
        rc = *rcand;
        accepted = true;
        break;
      }
      ++rejections;
      step *= 0.5;
    }
    if (!accepted) {
      res.status = (infeasible == rejections) ? ReconStatus::kFailed : ReconStatus::kStagnated;
      break;
    }

    th = thc;
    r = rc;
    res.misfit_history.push_back(r.norm());
    if (r.norm() <= floor_tol || step.cwiseAbs().maxCoeff() <= 1e-6 * init.r0) {
      res.status = ReconStatus::kConverged;
      break;
    }
  }

  res.obstacle = unpack(init, th);
  return res;
}

}  // namespace siglab
