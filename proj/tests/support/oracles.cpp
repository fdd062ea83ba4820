#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace oracle {

using siglab::PolygonalSet;
using siglab::Vec2;

Raster rasterize(const PolygonalSet& s, Vec2 lo, Vec2 hi, int nx, int ny) {
  Raster r;
  r.nx = nx;
  r.ny = ny;
  r.lo = lo;
  r.hi = hi;
  r.cell_w = (hi.x - lo.x) / nx;
  r.cell_h = (hi.y - lo.y) / ny;
  r.inside.assign(static_cast<size_t>(nx) * ny, 0);

  struct Crossing {
    double x;
    int sign;
  };
  std::vector<Crossing> crossings;
  for (int iy = 0; iy < ny; ++iy) {
    const double y = lo.y + (iy + 0.5) * r.cell_h;
    crossings.clear();
    for (const auto& ring : s.rings) {
      const int n = static_cast<int>(ring.pts.size());
      for (int i = 0; i < n; ++i) {
        const Vec2 a = ring.pts[i], b = ring.pts[(i + 1) % n];
        if (a.y <= y && b.y > y) {
          crossings.push_back({a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), +1});
        } else if (b.y <= y && a.y > y) {
          crossings.push_back({a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), -1});
        }
      }
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& l, const Crossing& rr) { return l.x < rr.x; });
    size_t k = 0;
    int winding = 0;
    for (int ix = 0; ix < nx; ++ix) {
      const double x = lo.x + (ix + 0.5) * r.cell_w;
      while (k < crossings.size() && crossings[k].x <= x) winding += crossings[k++].sign;
      if (winding != 0) r.inside[static_cast<size_t>(iy) * nx + ix] = 1;
    }
  }
  return r;
}

double raster_area(const PolygonalSet& s, int res) {
  if (s.empty()) return 0.0;
  auto [lo, hi] = bounding_box(s);
  const Vec2 pad = 0.01 * (hi - lo) + Vec2{1e-12, 1e-12};
  lo = lo - pad;
  hi = hi + pad;
  const Raster r = rasterize(s, lo, hi, res, res);
  std::size_t count = 0;
  for (auto v : r.inside) count += v;
  return static_cast<double>(count) * r.cell_w * r.cell_h;
}

double raster_density(const PolygonalSet& s, Vec2 p, double radius, int res) {
  const Vec2 lo = p - Vec2{radius, radius}, hi = p + Vec2{radius, radius};
  const Raster r = rasterize(s, lo, hi, res, res);
  std::size_t in_ball = 0, in_both = 0;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      if (siglab::dist(r.center(ix, iy), p) > radius) continue;
      ++in_ball;
      if (r.at(ix, iy)) ++in_both;
    }
  return in_ball == 0 ? 0.0 : static_cast<double>(in_both) / in_ball;
}

FloodLabels flood_classify(const PolygonalSet& omega, const PolygonalSet& o1,
                           const PolygonalSet& o2, int res) {
  FloodLabels out;
  auto [lo, hi] = bounding_box(omega);
  const Vec2 pad = 0.02 * (hi - lo);
  lo = lo - pad;
  hi = hi + pad;
  out.omega = rasterize(omega, lo, hi, res, res);
  out.o1 = o1.empty() ? Raster{} : rasterize(o1, lo, hi, res, res);
  out.o2 = o2.empty() ? Raster{} : rasterize(o2, lo, hi, res, res);
  const auto in_o1 = [&](int ix, int iy) { return !o1.empty() && out.o1.at(ix, iy); };
  const auto in_o2 = [&](int ix, int iy) { return !o2.empty() && out.o2.at(ix, iy); };

  const int nx = res, ny = res;
  const auto idx = [nx](int ix, int iy) { return static_cast<size_t>(iy) * nx + ix; };
  const auto free_cell = [&](int ix, int iy) {
    return out.omega.at(ix, iy) && !in_o1(ix, iy) && !in_o2(ix, iy);
  };

  out.comp.assign(static_cast<size_t>(nx) * ny, -1);
  int n_comp = 0;
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (!free_cell(ix, iy) || out.comp[idx(ix, iy)] != -1) continue;
      const int id = n_comp++;
      std::deque<std::pair<int, int>> queue{{ix, iy}};
      out.comp[idx(ix, iy)] = id;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
          const int mx = cx + dx[d], my = cy + dy[d];
          if (mx < 0 || mx >= nx || my < 0 || my >= ny) continue;
          if (!free_cell(mx, my) || out.comp[idx(mx, my)] != -1) continue;
          out.comp[idx(mx, my)] = id;
          queue.push_back({mx, my});
        }
      }
    }

  // the visible component is the one reachable from outside the domain
  std::vector<std::int64_t> touches(n_comp, 0);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (!free_cell(ix, iy)) continue;
      for (int d = 0; d < 4; ++d) {
        const int mx = ix + dx[d], my = iy + dy[d];
        const bool outside =
            mx < 0 || mx >= nx || my < 0 || my >= ny || !out.omega.at(mx, my);
        if (outside) {
          ++touches[out.comp[idx(ix, iy)]];
          break;
        }
      }
    }
  for (int c = 0; c < n_comp; ++c)
    if (touches[c] > 0 && (out.g0_id < 0 || touches[c] > touches[out.g0_id]))
      out.g0_id = c;

  // hidden region: inside omega, outside o2, not visible
  const auto hidden_cell = [&](int ix, int iy) {
    if (!out.omega.at(ix, iy) || in_o2(ix, iy)) return false;
    const auto c = out.comp[idx(ix, iy)];
    return !(c >= 0 && c == out.g0_id);
  };
  out.hidden.assign(static_cast<size_t>(nx) * ny, -1);
  int n_hidden = 0;
  std::vector<std::int64_t> hsize;
  std::vector<bool> htouch;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      if (!hidden_cell(ix, iy) || out.hidden[idx(ix, iy)] != -1) continue;
      const int id = n_hidden++;
      hsize.push_back(0);
      htouch.push_back(false);
      std::deque<std::pair<int, int>> queue{{ix, iy}};
      out.hidden[idx(ix, iy)] = id;
      while (!queue.empty()) {
        auto [cx, cy] = queue.front();
        queue.pop_front();
        ++hsize[id];
        for (int d = 0; d < 4; ++d) {
          const int mx = cx + dx[d], my = cy + dy[d];
          if (mx < 0 || mx >= nx || my < 0 || my >= ny) continue;
          if (out.comp[idx(mx, my)] == out.g0_id && out.g0_id >= 0) htouch[id] = true;
          if (!hidden_cell(mx, my) || out.hidden[idx(mx, my)] != -1) continue;
          out.hidden[idx(mx, my)] = id;
          queue.push_back({mx, my});
        }
      }
    }
  for (int c = 0; c < n_hidden; ++c) {
    if (!htouch[c]) continue;
    if (out.v_id < 0 || hsize[c] > hsize[out.v_id]) out.v_id = c;
  }
  return out;
}

RandomScene random_scene(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto star = [&](Vec2 center, double base, siglab::BoundarySource src) {
    const int n = 64;
    std::vector<double> amp(6, 0.0), phase(6, 0.0);
    double total = 0.0;
    for (int k = 2; k <= 5; ++k) {
      amp[k] = 0.12 * unit(rng) / k;
      phase[k] = 2.0 * std::numbers::pi * unit(rng);
      total += amp[k];
    }
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n;
      double r = 1.0;
      for (int k = 2; k <= 5; ++k) r += amp[k] * std::cos(k * t + phase[k]);
      r *= base;
      pts.push_back(center + r * Vec2{std::cos(t), std::sin(t)});
    }
    return make_polygon(pts, src);
  };

  for (int attempt = 0; attempt < 100; ++attempt) {
    RandomScene s;
    s.omega = siglab::make_circle({0.0, 0.0}, 1.0, 128, siglab::BoundarySource::kOmega);
    const double r1 = 0.16 + 0.14 * unit(rng);
    const double r2 = 0.16 + 0.14 * unit(rng);
    const double margin = 0.08;
    Vec2 c1, c2;
    {
      const double rho = (0.9 - r1 * 1.2 - margin) * std::sqrt(unit(rng));
      const double th = 2.0 * std::numbers::pi * unit(rng);
      c1 = {rho * std::cos(th), rho * std::sin(th)};
    }
    {
      // half the time aim near o1 so overlaps are common
      const bool near = unit(rng) < 0.5;
      const double reach = near ? (r1 + r2) * 0.8 : 0.9;
      for (int k = 0; k < 50; ++k) {
        const double rho = reach * std::sqrt(unit(rng));
        const double th = 2.0 * std::numbers::pi * unit(rng);
        c2 = c1 + Vec2{rho * std::cos(th), rho * std::sin(th)};
        if (siglab::norm(c2) + r2 * 1.2 + margin < 0.97) break;
        c2 = {2.0, 2.0};  // sentinel: containment failed
      }
      if (c2.x > 1.5) continue;
    }
    s.o1 = star(c1, r1, siglab::BoundarySource::kObstacle1);
    s.o2 = star(c2, r2, siglab::BoundarySource::kObstacle2);

    // o1 must keep some body outside closure(o2): test on a coarse raster
    const auto [lo, hi] = bounding_box(s.o1);
    const Raster raster1 = rasterize(s.o1, lo, hi, 128, 128);
    const Raster raster2 = rasterize(s.o2, lo, hi, 128, 128);
    std::int64_t o1_cells = 0, escaped = 0;
    for (size_t i = 0; i < raster1.inside.size(); ++i) {
      o1_cells += raster1.inside[i];
      escaped += raster1.inside[i] && !raster2.inside[i];
    }
    if (o1_cells == 0 || escaped < o1_cells / 20) continue;
    return s;
  }
  throw std::runtime_error("random scene generation failed to satisfy preconditions");
}

std::vector<double> pgs_solve(const siglab::DiscreteVI& vi, int max_sweeps, double tol) {
  std::vector<std::uint8_t> constrained(vi.n, 0);
  for (const int d : vi.constrained) constrained[d] = 1;

  std::vector<double> diag(vi.n, 0.0);
  for (int i = 0; i < vi.n; ++i) {
    for (int k = vi.row_ptr[i]; k < vi.row_ptr[i + 1]; ++k) {
      if (vi.col_idx[k] == i) diag[i] = vi.values[k];
    }
    if (!(diag[i] > 0.0)) throw std::runtime_error("pgs_solve: nonpositive diagonal");
  }

  double scale = 1.0;
  for (const double r : vi.rhs) scale = std::max(scale, std::abs(r));

  std::vector<double> u(vi.n, 0.0);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (int i = 0; i < vi.n; ++i) {
      double acc = vi.rhs[i];
      for (int k = vi.row_ptr[i]; k < vi.row_ptr[i + 1]; ++k) {
        const int j = vi.col_idx[k];
        if (j != i) acc -= vi.values[k] * u[j];
      }
      const double cand = acc / diag[i];
      if (constrained[i]) {
        u[i] = vi.bound_sign > 0 ? std::max(0.0, cand) : std::min(0.0, cand);
      } else {
        u[i] = cand;
      }
    }

    if (sweep % 32 != 0 && sweep != max_sweeps) continue;

    // KKT residual: plain residual off the constraint set, complementarity
    // min(|u|, |residual|) with feasible signs on it.
    double worst = 0.0;
    for (int i = 0; i < vi.n; ++i) {
      double res = -vi.rhs[i];
      for (int k = vi.row_ptr[i]; k < vi.row_ptr[i + 1]; ++k)
        res += vi.values[k] * u[vi.col_idx[k]];
      double viol = std::abs(res);
      if (constrained[i]) {
        const double s = static_cast<double>(vi.bound_sign);
        viol = std::abs(std::min(s * u[i], s * res));
      }
      worst = std::max(worst, viol);
    }
    if (worst < tol * scale) return u;
  }
  throw std::runtime_error("pgs_solve: sweep budget exhausted before convergence");
}

}  // namespace oracle
