#include "siglab/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "siglab/scalar_solver.hpp"
#include "p1.hpp"

namespace siglab {
namespace {

// Arc length of each ring vertex measured from vertex 0, plus the closing
// total. prefix[j] is where edge j starts; prefix[n] is the ring length.
std::vector<double> arc_prefix(const Ring& ring) {
  const int n = static_cast<int>(ring.pts.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int j = 0; j < n; ++j)
    prefix[j + 1] = prefix[j] + dist(ring.pts[j], ring.pts[(j + 1) % n]);
  return prefix;
}

BoundaryMeasurement measure_gamma(const Mesh& mesh, const std::vector<Vec2>& edge_values) {
  int ring = -1;
  for (const BoundaryEdge& be : mesh.bedges) {
    if (be.tag != BoundaryTag::kGamma) continue;
    if (ring == -1) ring = be.ring;
    if (be.ring != ring)
      throw GeometryError("measurement window spans more than one boundary ring");
  }
  if (ring == -1) throw GeometryError("mesh has no measurement boundary edges");

  const Ring& src = mesh.domain.rings[ring];
  const std::vector<double> prefix = arc_prefix(src);

  BoundaryMeasurement m;
  m.length = prefix.back();
  m.closed = true;
  std::vector<std::pair<double, Vec2>> samples;
  for (std::size_t k = 0; k < mesh.bedges.size(); ++k) {
    const BoundaryEdge& be = mesh.bedges[k];
    if (be.ring != ring) continue;
    if (be.tag != BoundaryTag::kGamma) {
      m.closed = false;
      continue;
    }
    const Vec2 mid = 0.5 * (mesh.verts[be.v0] + mesh.verts[be.v1]);
    const double s = prefix[be.parent_edge] + dist(src.pts[be.parent_edge], mid);
    samples.emplace_back(s, edge_values[k]);
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  m.s.reserve(samples.size());
  m.value.reserve(samples.size());
  for (const auto& [s, v] : samples) {
    m.s.push_back(s);
    m.value.push_back(v);
  }
  return m;
}

Vec2 interp(const BoundaryMeasurement& m, double s) {
  const int n = static_cast<int>(m.s.size());
  if (n == 1) return m.value[0];
  if (!m.closed) {
    if (s <= m.s.front()) return m.value.front();
    if (s >= m.s.back()) return m.value.back();
  } else {
    s = std::fmod(s, m.length);
    if (s < 0.0) s += m.length;
    if (s < m.s.front() || s >= m.s.back()) {
      // wrap segment from the last sample around to the first
      const double s0 = m.s.back() - m.length;
      const double span = m.s.front() - s0;
      double t = ((s >= m.s.back() ? s - m.length : s) - s0) / span;
      t = std::clamp(t, 0.0, 1.0);
      return (1.0 - t) * m.value.back() + t * m.value.front();
    }
  }
  const auto it = std::upper_bound(m.s.begin(), m.s.end(), s);
  const int i1 = static_cast<int>(it - m.s.begin());
  const int i0 = i1 - 1;
  const double span = m.s[i1] - m.s[i0];
  const double t = span > 0.0 ? (s - m.s[i0]) / span : 0.0;
  return (1.0 - t) * m.value[i0] + t * m.value[i1];
}

bool boxes_overlap(Vec2 alo, Vec2 ahi, Vec2 blo, Vec2 bhi) {
  return alo.x <= bhi.x && blo.x <= ahi.x && alo.y <= bhi.y && blo.y <= ahi.y;
}

std::pair<Vec2, Vec2> points_bbox(const std::vector<Vec2>& pts) {
  Vec2 lo = pts[0], hi = pts[0];
  for (const Vec2 p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  return {lo, hi};
}

// Keeps the part of poly on the left of a -> b (Sutherland-Hodgman step).
// Concave subjects may come back with zero-width bridges; their signed area
// is still the area of the true intersection, which is all we use.
void clip_halfplane(const std::vector<Vec2>& poly, Vec2 a, Vec2 b, std::vector<Vec2>& out) {
  out.clear();
  const int n = static_cast<int>(poly.size());
  const Vec2 d = b - a;
  for (int i = 0; i < n; ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % n];
    const double fp = cross(d, p - a);
    const double fq = cross(d, q - a);
    if (fp >= 0.0) out.push_back(p);
    if ((fp >= 0.0) != (fq >= 0.0)) out.push_back(p + (fp / (fp - fq)) * (q - p));
  }
}

double shoelace(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

// Signed area of ring intersected with the CCW triangle (a, b, c). Hole
// rings are clockwise, so summing over the rings of a region integrates
// its indicator function.
double clipped_area(const std::vector<Vec2>& ring_pts, Vec2 a, Vec2 b, Vec2 c,
                    std::vector<Vec2>& buf0, std::vector<Vec2>& buf1) {
  clip_halfplane(ring_pts, a, b, buf0);
  if (buf0.size() < 3) return 0.0;
  clip_halfplane(buf0, b, c, buf1);
  if (buf1.size() < 3) return 0.0;
  clip_halfplane(buf1, c, a, buf0);
  if (buf0.size() < 3) return 0.0;
  return shoelace(buf0);
}

// Parameter interval of segment p + t (q - p), t in [0, 1], within signed
// distance -margin of the CCW triangle (a slightly grown triangle, so that
// region edges lying a few ulps outside the mesh still produce candidate
// intervals). Returns false for an empty or degenerate interval.
bool clip_segment(const std::array<Vec2, 3>& tri, Vec2 p, Vec2 q, double margin, double& t0,
                  double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 ea = tri[e];
    const Vec2 d = tri[(e + 1) % 3] - ea;
    const double slack = margin * norm(d);
    const double fp = cross(d, p - ea) + slack;
    const double fq = cross(d, q - ea) + slack;
    if (fp < 0.0 && fq < 0.0) return false;
    if (fp >= 0.0 && fq >= 0.0) continue;
    const double tcut = fp / (fp - fq);
    if (fp < 0.0)
      t0 = std::max(t0, tcut);
    else
      t1 = std::min(t1, tcut);
  }
  return t1 - t0 > 1e-12;
}

std::array<double, 3> barycentric(const std::array<Vec2, 3>& tri, Vec2 p) {
  const double den = cross(tri[1] - tri[0], tri[2] - tri[0]);
  return {cross(tri[2] - tri[1], p - tri[1]) / den, cross(tri[0] - tri[2], p - tri[2]) / den,
          cross(tri[1] - tri[0], p - tri[0]) / den};
}

// Shared engine: density(t) is the elementwise energy density, integrand(t,
// p, nu) the conormal-flux-times-trace term of triangle t at point p with
// region outward normal nu. The region itself is never meshed: volume
// contributions come from clipping its rings against each triangle,
// boundary contributions from splitting each region edge at the triangles
// it traverses. Candidate intervals from all nearby triangles are merged
// into one breakpoint partition per edge and every piece is then claimed by
// exactly one triangle (probe point nudged to the interior side), so pieces
// riding along shared mesh edges are never counted twice and pieces lying a
// snap displacement outside the mesh still land in the adjacent triangle.
template <class Density, class Integrand>
GaussGreenResult gauss_green_impl(const Mesh& mesh, const PolygonalSet& region,
                                  Density density, Integrand integrand) {
  validate(region, "integration region");
  GaussGreenResult out;
  const int nt = mesh.n_tris();

  std::vector<std::array<Vec2, 3>> tv(nt);
  std::vector<Vec2> tlo(nt), thi(nt);
  std::vector<double> margin(nt);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) tv[t][i] = mesh.verts[mesh.tris[t][i]];
    const auto [a, b, c] = tv[t];
    tlo[t] = {std::min({a.x, b.x, c.x}), std::min({a.y, b.y, c.y})};
    thi[t] = {std::max({a.x, b.x, c.x}), std::max({a.y, b.y, c.y})};
    margin[t] = 1e-6 * std::max({dist(a, b), dist(b, c), dist(c, a)});
  }
  std::vector<std::pair<Vec2, Vec2>> ring_bbox;
  ring_bbox.reserve(region.rings.size());
  for (const Ring& r : region.rings) ring_bbox.push_back(points_bbox(r.pts));

  double abs_acc = 0.0;
  std::vector<Vec2> buf0, buf1;
  for (int t = 0; t < nt; ++t) {
    double cut = 0.0;
    for (std::size_t r = 0; r < region.rings.size(); ++r) {
      if (!boxes_overlap(tlo[t], thi[t], ring_bbox[r].first, ring_bbox[r].second)) continue;
      cut += clipped_area(region.rings[r].pts, tv[t][0], tv[t][1], tv[t][2], buf0, buf1);
    }
    if (cut != 0.0) {
      const double term = density(t) * cut;
      out.volume += term;
      abs_acc += std::abs(term);
    }
  }

  struct Candidate {
    int tri;
    double t0, t1;
  };
  std::vector<Candidate> cands;
  std::vector<double> cuts;
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  for (const Ring& ring : region.rings) {
    const int n = static_cast<int>(ring.pts.size());
    for (int j = 0; j < n; ++j) {
      const Vec2 p = ring.pts[j];
      const Vec2 q = ring.pts[(j + 1) % n];
      const double len = dist(p, q);
      if (len == 0.0) continue;
      // rings run with the region on the left, so outward is -perp
      const Vec2 nu = -1.0 * perp((q - p) / len);
      const Vec2 elo{std::min(p.x, q.x), std::min(p.y, q.y)};
      const Vec2 ehi{std::max(p.x, q.x), std::max(p.y, q.y)};
      cands.clear();
      cuts.clear();
      for (int t = 0; t < nt; ++t) {
        if (!boxes_overlap(tlo[t], thi[t], elo, ehi)) continue;
        double t0, t1;
        if (!clip_segment(tv[t], p, q, margin[t], t0, t1)) continue;
        cands.push_back({t, t0, t1});
        cuts.push_back(t0);
        cuts.push_back(t1);
      }
      if (cands.empty()) throw GeometryError("integration region extends outside the mesh");
      std::sort(cuts.begin(), cuts.end());
      double claimed_len = 0.0;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double ta = cuts[k];
        const double tb = cuts[k + 1];
        if (tb - ta <= 1e-12) continue;
        const double tm = 0.5 * (ta + tb);
        int claimed = -1;
        for (const Candidate& cd : cands) {
          if (tm < cd.t0 || tm > cd.t1) continue;
          const Vec2 probe = p + tm * (q - p) - margin[cd.tri] * nu;
          const auto lam = barycentric(tv[cd.tri], probe);
          if (std::min({lam[0], lam[1], lam[2]}) >= -1e-9) {
            claimed = cd.tri;
            break;
          }
        }
        if (claimed < 0) continue;
        claimed_len += tb - ta;
        const double half = 0.5 * (tb - ta);
        for (const double tg : {tm - half * inv_sqrt3, tm + half * inv_sqrt3}) {
          const double term = half * len * integrand(claimed, p + tg * (q - p), nu);
          out.boundary += term;
          abs_acc += std::abs(term);
        }
      }
      // every region edge must be fully tiled by mesh triangles
      if (claimed_len < 1.0 - 1e-4)
        throw GeometryError("integration region extends outside the mesh");
    }
  }
  out.residual = std::abs(out.boundary - out.volume);
  out.roundoff_bound = 100.0 * std::numeric_limits<double>::epsilon() * abs_acc;
  return out;
}

}  // namespace

BoundaryMeasurement measure_scalar_flux(const Mesh& mesh, const std::vector<double>& u) {
  const std::vector<double> flux = boundary_edge_flux(mesh, u);
  std::vector<Vec2> values(flux.size());
  for (std::size_t k = 0; k < flux.size(); ++k) values[k] = {flux[k], 0.0};
  return measure_gamma(mesh, values);
}

BoundaryMeasurement measure_elastic_traction(const Mesh& mesh, const std::vector<Vec2>& u,
                                             const LameParams& mat) {
  return measure_gamma(mesh, boundary_edge_traction(mesh, u, mat));
}

Vec2 sample(const BoundaryMeasurement& m, double s) {
  if (m.s.empty()) throw std::invalid_argument("sample: empty measurement");
  return interp(m, s);
}

BoundaryMeasurement resample(const BoundaryMeasurement& m, double spacing) {
  if (m.s.empty()) throw std::invalid_argument("resample: empty measurement");
  if (!(spacing > 0.0)) throw std::invalid_argument("resample: spacing must be positive");
  BoundaryMeasurement out;
  out.length = m.length;
  out.closed = m.closed;
  if (m.closed) {
    const int n = std::max(1, static_cast<int>(std::ceil(m.length / spacing)));
    const double step = m.length / n;
    for (int k = 0; k < n; ++k) {
      out.s.push_back(k * step);
      out.value.push_back(interp(m, k * step));
    }
  } else {
    const double span = m.s.back() - m.s.front();
    const int n = std::max(1, static_cast<int>(std::ceil(span / spacing)));
    const double step = span / n;
    for (int k = 0; k <= n; ++k) {
      const double s = m.s.front() + k * step;
      out.s.push_back(s);
      out.value.push_back(interp(m, s));
    }
  }
  return out;
}

MeasurementGap gap(const BoundaryMeasurement& a, const BoundaryMeasurement& b, double spacing) {
  if (a.s.empty() || b.s.empty()) throw std::invalid_argument("gap: empty measurement");
  if (!(spacing > 0.0)) throw std::invalid_argument("gap: spacing must be positive");
  MeasurementGap g;
  const bool periodic =
      a.closed && b.closed && std::abs(a.length - b.length) <= 1e-9 * std::max(a.length, b.length);
  if (periodic) {
    // grid from min(LA, LB) so gap(a, b) and gap(b, a) agree bit for bit
    const double period = std::min(a.length, b.length);
    const int n = std::max(1, static_cast<int>(std::ceil(period / spacing)));
    const double step = period / n;
    for (int k = 0; k < n; ++k) {
      const double s = k * step;
      const double d2 = norm2(interp(a, s) - interp(b, s));
      g.linf = std::max(g.linf, std::sqrt(d2));
      g.l2 += d2 * step;
    }
  } else {
    const double lo = std::max(a.s.front(), b.s.front());
    const double hi = std::min(a.s.back(), b.s.back());
    if (!(hi > lo)) throw std::invalid_argument("gap: measurement windows do not overlap");
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / spacing)));
    const double step = (hi - lo) / n;
    double prev = norm2(interp(a, lo) - interp(b, lo));
    g.linf = std::sqrt(prev);
    for (int k = 1; k <= n; ++k) {
      const double s = lo + k * step;
      const double d2 = norm2(interp(a, s) - interp(b, s));
      g.linf = std::max(g.linf, std::sqrt(d2));
      g.l2 += 0.5 * (prev + d2) * step;
      prev = d2;
    }
  }
  g.l2 = std::sqrt(g.l2);
  return g;
}

GaussGreenResult gauss_green_scalar(const Mesh& mesh, const std::vector<double>& u,
                                    const PolygonalSet& region) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("gauss_green_scalar: field size mismatch");
  std::vector<Vec2> grad(mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    const fe::P1Gradients hg = fe::hat_gradients(mesh, t);
    Vec2 gsum{0.0, 0.0};
    for (int i = 0; i < 3; ++i) gsum = gsum + u[mesh.tris[t][i]] * hg.g[i];
    grad[t] = gsum;
  }
  const auto tri_pts = [&](int t) {
    return std::array<Vec2, 3>{mesh.verts[mesh.tris[t][0]], mesh.verts[mesh.tris[t][1]],
                               mesh.verts[mesh.tris[t][2]]};
  };
  return gauss_green_impl(
      mesh, region, [&](int t) { return norm2(grad[t]); },
      [&](int t, Vec2 p, Vec2 nu) {
        const auto lam = barycentric(tri_pts(t), p);
        const auto& tri = mesh.tris[t];
        const double uh = lam[0] * u[tri[0]] + lam[1] * u[tri[1]] + lam[2] * u[tri[2]];
        return uh * dot(grad[t], nu);
      });
}

GaussGreenResult gauss_green_elastic(const Mesh& mesh, const std::vector<Vec2>& u,
                                     const LameParams& mat, const PolygonalSet& region) {
  if (static_cast<int>(u.size()) != mesh.n_verts())
    throw std::invalid_argument("gauss_green_elastic: field size mismatch");
  std::vector<std::array<double, 3>> sigma(mesh.n_tris());
  std::vector<double> dens(mesh.n_tris());
  for (int t = 0; t < mesh.n_tris(); ++t) {
    sigma[t] = element_stress(mesh, u, t, mat);
    const fe::P1Gradients hg = fe::hat_gradients(mesh, t);
    double exx = 0.0, eyy = 0.0, gxy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec2 ui = u[mesh.tris[t][i]];
      exx += ui.x * hg.g[i].x;
      eyy += ui.y * hg.g[i].y;
      gxy += ui.x * hg.g[i].y + ui.y * hg.g[i].x;
    }
    dens[t] = sigma[t][0] * exx + sigma[t][1] * eyy + sigma[t][2] * gxy;
  }
  const auto tri_pts = [&](int t) {
    return std::array<Vec2, 3>{mesh.verts[mesh.tris[t][0]], mesh.verts[mesh.tris[t][1]],
                               mesh.verts[mesh.tris[t][2]]};
  };
  return gauss_green_impl(
      mesh, region, [&](int t) { return dens[t]; },
      [&](int t, Vec2 p, Vec2 nu) {
        const auto lam = barycentric(tri_pts(t), p);
        const auto& tri = mesh.tris[t];
        const Vec2 uh = lam[0] * u[tri[0]] + lam[1] * u[tri[1]] + lam[2] * u[tri[2]];
        const Vec2 tr{sigma[t][0] * nu.x + sigma[t][2] * nu.y,
                      sigma[t][2] * nu.x + sigma[t][1] * nu.y};
        return dot(tr, uh);
      });
}

}  // namespace siglab
