#include "siglab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace siglab {

namespace {

constexpr double kQualityBound = 1.4619022000815437;  // 1 / (2 sin 20 deg)

std::uint64_t edge_key(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(std::min(a, b));
  const std::uint64_t hi = static_cast<std::uint32_t>(std::max(a, b));
  return (hi << 32) | lo;
}

// Sign of the orientation of (a, b, c) with a relative tolerance so exact
// and near-exact collinearity both report zero.
int orient_sign(Vec2 a, Vec2 b, Vec2 c) {
  const long double acx = a.x - c.x, acy = a.y - c.y;
  const long double bcx = b.x - c.x, bcy = b.y - c.y;
  const long double det = acx * bcy - acy * bcx;
  const long double mag = std::abs(acx * bcy) + std::abs(acy * bcx);
  if (std::abs(det) <= 1e-18L * mag) return 0;
  return det > 0 ? 1 : -1;
}

// Strict in-circumcircle test for a counterclockwise triangle (a, b, c).
bool in_circum(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  const long double adx = a.x - p.x, ady = a.y - p.y;
  const long double bdx = b.x - p.x, bdy = b.y - p.y;
  const long double cdx = c.x - p.x, cdy = c.y - p.y;
  const long double ad2 = adx * adx + ady * ady;
  const long double bd2 = bdx * bdx + bdy * bdy;
  const long double cd2 = cdx * cdx + cdy * cdy;
  const long double t1 = adx * (bdy * cd2 - cdy * bd2);
  const long double t2 = ady * (bdx * cd2 - cdx * bd2);
  const long double t3 = ad2 * (bdx * cdy - cdx * bdy);
  const long double det = t1 - t2 + t3;
  const long double mag = std::abs(t1) + std::abs(t2) + std::abs(t3);
  return det > 1e-17L * mag;
}

bool circumcenter(Vec2 a, Vec2 b, Vec2 c, Vec2* out) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-300) return false;
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  out->x = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  out->y = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  return true;
}

// Strictly inside the diametral circle of (a, b).
bool encroaches(Vec2 a, Vec2 b, Vec2 q) {
  const double d = dot(a - q, b - q);
  return d < -1e-14 * norm2(b - a);
}

struct Tri {
  int v[3];
  int n[3];  // neighbor across edge (v[i], v[(i+1)%3]), -1 if none
  bool alive = true;
  bool inside = false;
};

struct Seg {
  int a = -1, b = -1;  // directed, meshed domain on the left
  BoundaryTag tag = BoundaryTag::kOuter;
  Vec2 outward;
  int ring = -1, pedge = -1;
  bool alive = true;
};

class Triangulator {
 public:
  Triangulator(const PolygonalSet& domain, double h, const GammaSpec& gamma)
      : domain_(domain), h_(h), gamma_(gamma) {}

  Mesh run();

 private:
  const PolygonalSet& domain_;
  double h_;
  const GammaSpec& gamma_;

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
  std::vector<Seg> segs_;
  std::unordered_set<std::uint64_t> seg_keys_;
  std::vector<int> v2t_;
  int hint_ = 0;
  long inserts_ = 0, insert_cap_ = 0;

  bool constrained(int a, int b) const { return seg_keys_.count(edge_key(a, b)) > 0; }

  void init_box();
  int locate(Vec2 p, int start) const;
  int insert_point(Vec2 p, int start, std::vector<int>* new_tris);
  void split_segment(int s, std::vector<int>* new_tris);
  bool edge_triangles(int a, int b, int* t0, int* t1) const;
  void insert_boundary();
  void recover_segments();
  void flag_components();
  void refine_quality();
  Mesh extract() const;
};

void Triangulator::init_box() {
  auto [lo, hi] = bounding_box(domain_);
  const double diam = std::max({hi.x - lo.x, hi.y - lo.y, 1e-9});
  const double m = 10.0 * diam;
  pts_ = {{lo.x - m, lo.y - m}, {hi.x + m, lo.y - m}, {hi.x + m, hi.y + m},
          {lo.x - m, hi.y + m}};
  tris_.push_back({{0, 1, 2}, {-1, -1, 1}, true, false});
  tris_.push_back({{0, 2, 3}, {0, -1, -1}, true, false});
  v2t_ = {0, 0, 0, 1};
  insert_cap_ = 2000 + static_cast<long>(60.0 * area(domain_) / (h_ * h_));
}

// Walk toward p from triangle `start`, crossing whichever edge has p
// strictly on its far side; falls back to a linear scan if the walk cycles.
int Triangulator::locate(Vec2 p, int start) const {
  int t = start;
  if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) t = -1;
  if (t < 0) {
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
      if (tris_[i].alive) {
        t = i;
        break;
      }
  }
  int prev = -1;
  for (long steps = 0; steps < 4 * static_cast<long>(tris_.size()) + 16; ++steps) {
    bool moved = false;
    for (int i = 0; i < 3; ++i) {
      const int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3];
      const int nb = tris_[t].n[i];
      if (nb < 0 || nb == prev) continue;
      if (orient_sign(pts_[a], pts_[b], p) < 0) {
        prev = t;
        t = nb;
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  // deterministic fallback scan
  for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
    if (!tris_[i].alive) continue;
    bool ok = true;
    for (int e = 0; e < 3 && ok; ++e)
      ok = orient_sign(pts_[tris_[i].v[e]], pts_[tris_[i].v[(e + 1) % 3]], p) >= 0;
    if (ok) return i;
  }
  throw GeometryError("mesh point location failed");
}

int Triangulator::insert_point(Vec2 p, int start, std::vector<int>* new_tris) {
  if (++inserts_ > insert_cap_)
    throw GeometryError("mesh refinement did not terminate within its budget");
  const int t0 = locate(p, start);

  std::vector<int> cavity{t0};
  std::unordered_set<int> in_cav{t0};
  for (size_t k = 0; k < cavity.size(); ++k) {
    const int t = cavity[k];
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (nb < 0 || in_cav.count(nb)) continue;
      const int a = tris_[t].v[i], b = tris_[t].v[(i + 1) % 3];
      if (constrained(a, b)) continue;
      const auto& nt = tris_[nb];
      if (in_circum(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p)) {
        cavity.push_back(nb);
        in_cav.insert(nb);
      }
    }
  }

  // boundary of the cavity, with star-shape fix-up: an edge not strictly
  // visible from p forces its owner out of the cavity (or pulls the
  // neighbor in when the owner is the containing triangle)
  struct CavEdge {
    int a, b, outer, owner;
    bool inside_src;
  };
  std::vector<CavEdge> bnd;
  for (int round = 0; round < 200; ++round) {
    bnd.clear();
    for (const int t : cavity) {
      if (!in_cav.count(t)) continue;
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (nb >= 0 && in_cav.count(nb)) continue;
        bnd.push_back({tris_[t].v[i], tris_[t].v[(i + 1) % 3], nb, t, tris_[t].inside});
      }
    }
    int bad = -1;
    for (size_t i = 0; i < bnd.size(); ++i)
      if (orient_sign(pts_[bnd[i].a], pts_[bnd[i].b], p) <= 0) {
        bad = static_cast<int>(i);
        break;
      }
    if (bad < 0) break;
    const auto& e = bnd[bad];
    if (e.owner != t0) {
      in_cav.erase(e.owner);
    } else if (e.outer >= 0 && !constrained(e.a, e.b)) {
      cavity.push_back(e.outer);
      in_cav.insert(e.outer);
    } else {
      throw GeometryError("mesh cavity collapsed at a constrained edge");
    }
    if (round == 199) throw GeometryError("mesh cavity fix-up did not settle");
  }

  const int pid = static_cast<int>(pts_.size());
  pts_.push_back(p);
  v2t_.push_back(-1);
  for (const int t : cavity)
    if (in_cav.count(t)) tris_[t].alive = false;

  std::unordered_map<int, int> by_a, by_b;
  std::vector<int> fresh;
  fresh.reserve(bnd.size());
  for (const auto& e : bnd) {
    const int id = static_cast<int>(tris_.size());
    tris_.push_back({{e.a, e.b, pid}, {e.outer, -1, -1}, true, e.inside_src});
    if (e.outer >= 0) {
      auto& ot = tris_[e.outer];
      for (int i = 0; i < 3; ++i)
        if (ot.v[i] == e.b && ot.v[(i + 1) % 3] == e.a) ot.n[i] = id;
    }
    by_a[e.a] = id;
    by_b[e.b] = id;
    v2t_[e.a] = id;
    v2t_[e.b] = id;
    v2t_[pid] = id;
    fresh.push_back(id);
  }
  for (const int id : fresh) {
    tris_[id].n[1] = by_a.at(tris_[id].v[1]);
    tris_[id].n[2] = by_b.at(tris_[id].v[0]);
  }
  hint_ = fresh.empty() ? hint_ : fresh.front();
  if (new_tris)
    new_tris->insert(new_tris->end(), fresh.begin(), fresh.end());
  return pid;
}

// Both triangles adjacent to edge (a, b), found by circulating around a.
bool Triangulator::edge_triangles(int a, int b, int* t0, int* t1) const {
  *t0 = *t1 = -1;
  int start = v2t_[a];
  if (start < 0 || !tris_[start].alive) {
    start = -1;
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0 && start < 0; --i)
      if (tris_[i].alive &&
          (tris_[i].v[0] == a || tris_[i].v[1] == a || tris_[i].v[2] == a))
        start = i;
    if (start < 0) return false;
  }
  int t = start;
  for (int guard = 0; guard < 1 << 20; ++guard) {
    const auto& tr = tris_[t];
    int ia = -1;
    for (int i = 0; i < 3; ++i)
      if (tr.v[i] == a) ia = i;
    if (ia < 0) return false;
    for (int i = 0; i < 3; ++i) {
      const int u = tr.v[i], w = tr.v[(i + 1) % 3];
      if ((u == a && w == b) || (u == b && w == a)) {
        if (*t0 < 0)
          *t0 = t;
        else if (t != *t0)
          *t1 = t;
      }
    }
    t = tr.n[ia];  // next triangle counterclockwise around a
    if (t < 0) return *t0 >= 0;
    if (t == start) break;
  }
  return *t0 >= 0;
}

void Triangulator::split_segment(int s, std::vector<int>* new_tris) {
  const Seg seg = segs_[s];
  segs_[s].alive = false;
  seg_keys_.erase(edge_key(seg.a, seg.b));
  const Vec2 m = 0.5 * (pts_[seg.a] + pts_[seg.b]);
  const int mid = insert_point(m, v2t_[seg.a], new_tris);
  segs_.push_back({seg.a, mid, seg.tag, seg.outward, seg.ring, seg.pedge, true});
  segs_.push_back({mid, seg.b, seg.tag, seg.outward, seg.ring, seg.pedge, true});
  seg_keys_.insert(edge_key(seg.a, mid));
  seg_keys_.insert(edge_key(mid, seg.b));
}

void Triangulator::insert_boundary() {
  for (int r = 0; r < static_cast<int>(domain_.rings.size()); ++r) {
    const auto& ring = domain_.rings[r];
    const int n = static_cast<int>(ring.pts.size());
    const bool outer_ring = signed_area(ring) > 0;
    std::vector<int> ids;
    std::vector<std::pair<int, int>> meta;  // parent edge, sub index
    for (int e = 0; e < n; ++e) {
      const Vec2 a = ring.pts[e], b = ring.pts[(e + 1) % n];
      const double len = dist(a, b);
      const int k = std::max(1, static_cast<int>(std::ceil(len / h_ - 1e-12)));
      for (int j = 0; j < k; ++j) {
        const Vec2 p = a + (static_cast<double>(j) / k) * (b - a);
        ids.push_back(insert_point(p, hint_, nullptr));
        meta.push_back({e, j});
      }
    }
    const int np = static_cast<int>(ids.size());
    for (int i = 0; i < np; ++i) {
      const int e = meta[i].first;
      const Vec2 a = ring.pts[e], b = ring.pts[(e + 1) % n];
      const Vec2 d = normalized(b - a);
      BoundarySource src = BoundarySource::kOmega;
      if (!ring.prov.empty())
        src = ring.prov[e].source;
      else if (!outer_ring)
        src = BoundarySource::kObstacle1;
      BoundaryTag tag = BoundaryTag::kObstacle;
      if (src == BoundarySource::kOmega) {
        const Vec2 mid = 0.5 * (pts_[ids[i]] + pts_[ids[(i + 1) % np]]);
        tag = gamma_.covers(mid) ? BoundaryTag::kGamma : BoundaryTag::kOuter;
      }
      segs_.push_back({ids[i], ids[(i + 1) % np], tag, -perp(d), r, e, true});
      seg_keys_.insert(edge_key(ids[i], ids[(i + 1) % np]));
    }
  }
}

void Triangulator::recover_segments() {
  for (int pass = 0; pass < 64; ++pass) {
    bool split_any = false;
    const int ns = static_cast<int>(segs_.size());
    for (int s = 0; s < ns; ++s) {
      if (!segs_[s].alive) continue;
      const int a = segs_[s].a, b = segs_[s].b;
      int t0, t1;
      bool bad = false;
      if (!edge_triangles(a, b, &t0, &t1) || t0 < 0) {
        bad = true;  // segment missing from the triangulation
      } else {
        for (const int t : {t0, t1}) {
          if (t < 0) continue;
          for (int i = 0; i < 3; ++i) {
            const int q = tris_[t].v[i];
            if (q == a || q == b) continue;
            if (encroaches(pts_[a], pts_[b], pts_[q])) bad = true;
          }
        }
      }
      if (bad) {
        split_segment(s, nullptr);
        split_any = true;
      }
    }
    if (!split_any) return;
  }
  throw GeometryError("boundary recovery did not converge");
}

void Triangulator::flag_components() {
  // components of the triangulation separated by constrained edges; each
  // component is classified by one representative centroid
  const int nt = static_cast<int>(tris_.size());
  std::vector<int> comp(nt, -1);
  for (int seed = 0; seed < nt; ++seed) {
    if (!tris_[seed].alive || comp[seed] >= 0) continue;
    std::deque<int> q{seed};
    comp[seed] = seed;
    bool touches_super = false;
    std::vector<int> members;
    while (!q.empty()) {
      const int t = q.front();
      q.pop_front();
      members.push_back(t);
      for (int i = 0; i < 3; ++i)
        if (tris_[t].v[i] < 4) touches_super = true;
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (nb < 0 || !tris_[nb].alive || comp[nb] >= 0) continue;
        if (constrained(tris_[t].v[i], tris_[t].v[(i + 1) % 3])) continue;
        comp[nb] = seed;
        q.push_back(nb);
      }
    }
    bool inside = false;
    if (!touches_super) {
      const auto& tr = tris_[members.front()];
      const Vec2 c = (1.0 / 3.0) * (pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]);
      inside = contains(domain_, c);
    }
    for (const int t : members) tris_[t].inside = inside;
  }
}

void Triangulator::refine_quality() {
  std::deque<int> tq;
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (tris_[t].alive && tris_[t].inside) tq.push_back(t);

  while (!tq.empty()) {
    const int t = tq.front();
    tq.pop_front();
    if (t >= static_cast<int>(tris_.size()) || !tris_[t].alive || !tris_[t].inside)
      continue;
    const Vec2 a = pts_[tris_[t].v[0]], b = pts_[tris_[t].v[1]], c = pts_[tris_[t].v[2]];
    const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    const double smin = std::min({la, lb, lc});
    const double lmax = std::max({la, lb, lc});
    Vec2 cc;
    if (!circumcenter(a, b, c, &cc)) continue;
    const double r = dist(cc, a);
    const bool bad = (r / smin > kQualityBound) || (lmax > 2.0 * h_ * (1.0 + 1e-12));
    if (!bad) continue;

    // walk toward the circumcenter; a constrained edge in the way means
    // the boundary segment soaks up the split instead of the circumcenter
    int t_cc = t;
    bool blocked = false;
    {
      int cur = t, prev = -1;
      for (long steps = 0; steps < 4 * static_cast<long>(tris_.size()) + 16; ++steps) {
        bool moved = false;
        for (int i = 0; i < 3; ++i) {
          const int u = tris_[cur].v[i], w = tris_[cur].v[(i + 1) % 3];
          const int nb = tris_[cur].n[i];
          if (nb < 0 || nb == prev) continue;
          if (orient_sign(pts_[u], pts_[w], cc) < 0) {
            if (constrained(u, w)) {
              blocked = true;
              int hit = -1;
              for (int s = 0; s < static_cast<int>(segs_.size()); ++s)
                if (segs_[s].alive &&
                    edge_key(segs_[s].a, segs_[s].b) == edge_key(u, w))
                  hit = s;
              if (hit >= 0 && encroaches(pts_[segs_[hit].a], pts_[segs_[hit].b], cc)) {
                std::vector<int> fresh;
                split_segment(hit, &fresh);
                for (const int f : fresh)
                  if (tris_[f].alive && tris_[f].inside) tq.push_back(f);
                tq.push_back(t);
              }
            } else {
              prev = cur;
              cur = nb;
              moved = true;
            }
            break;
          }
        }
        if (blocked || !moved) break;
      }
      t_cc = cur;
    }
    if (blocked) continue;

    std::vector<int> fresh;
    insert_point(cc, t_cc, &fresh);
    for (const int f : fresh)
      if (tris_[f].alive && tris_[f].inside) tq.push_back(f);
  }
}

Mesh Triangulator::extract() const {
  Mesh m;
  m.domain = domain_;
  m.h = h_;
  std::vector<int> vmap(pts_.size(), -1);
  for (const auto& t : tris_) {
    if (!t.alive || !t.inside) continue;
    std::array<int, 3> tv;
    for (int i = 0; i < 3; ++i) {
      if (vmap[t.v[i]] < 0) {
        vmap[t.v[i]] = static_cast<int>(m.verts.size());
        m.verts.push_back(pts_[t.v[i]]);
      }
      tv[i] = vmap[t.v[i]];
    }
    m.tris.push_back(tv);
  }
  for (const auto& s : segs_) {
    if (!s.alive) continue;
    if (vmap[s.a] < 0 || vmap[s.b] < 0)
      throw GeometryError("boundary segment detached from the interior mesh");
    m.bedges.push_back({vmap[s.a], vmap[s.b], s.tag, s.outward, s.ring, s.pedge});
  }
  m.node_normal.assign(m.verts.size(), Vec2{0, 0});
  for (const auto& be : m.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    m.node_normal[be.v0] = m.node_normal[be.v0] + be.outward;
    m.node_normal[be.v1] = m.node_normal[be.v1] + be.outward;
  }
  for (auto& nrm : m.node_normal)
    if (norm(nrm) > 1e-14) nrm = normalized(nrm);
  return m;
}

Mesh Triangulator::run() {
  init_box();
  insert_boundary();
  recover_segments();
  flag_components();
  refine_quality();
  return extract();
}

void compute_node_normals(Mesh& m) {
  m.node_normal.assign(m.verts.size(), Vec2{0, 0});
  for (const auto& be : m.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    m.node_normal[be.v0] = m.node_normal[be.v0] + be.outward;
    m.node_normal[be.v1] = m.node_normal[be.v1] + be.outward;
  }
  for (auto& nrm : m.node_normal)
    if (norm(nrm) > 1e-14) nrm = normalized(nrm);
}

}  // namespace

std::string to_string(BoundaryTag t) {
  switch (t) {
    case BoundaryTag::kOuter: return "outer";
    case BoundaryTag::kGamma: return "gamma";
    case BoundaryTag::kObstacle: return "obstacle";
  }
  return "?";
}

bool GammaSpec::covers(Vec2 p) const {
  if (whole) return true;
  const double two_pi = 2.0 * std::numbers::pi;
  double ang = std::atan2(p.y - center.y, p.x - center.x);
  double w0 = std::fmod(a0, two_pi);
  if (w0 < 0) w0 += two_pi;
  double span = a1 - a0;
  if (span <= 0 || span > two_pi) span = two_pi;
  double rel = ang - w0;
  rel = std::fmod(rel, two_pi);
  if (rel < 0) rel += two_pi;
  return rel <= span;
}

Mesh triangulate(const PolygonalSet& domain, double h, const GammaSpec& gamma) {
  validate(domain, "mesh domain");
  if (!(h > 0)) throw ValidationError("mesh size must be positive");
  Triangulator tr(domain, h, gamma);
  return tr.run();
}

Mesh refine(const Mesh& mesh) {
  Mesh out;
  out.domain = mesh.domain;
  out.h = mesh.h / 2.0;
  out.verts = mesh.verts;
  std::unordered_map<std::uint64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(out.verts.size());
    out.verts.push_back(0.5 * (mesh.verts[a] + mesh.verts[b]));
    midpoint.emplace(key, id);
    return id;
  };
  out.tris.reserve(mesh.tris.size() * 4);
  for (const auto& t : mesh.tris) {
    const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
    out.tris.push_back({t[0], ab, ca});
    out.tris.push_back({ab, t[1], bc});
    out.tris.push_back({ca, bc, t[2]});
    out.tris.push_back({ab, bc, ca});
  }
  out.bedges.reserve(mesh.bedges.size() * 2);
  for (const auto& be : mesh.bedges) {
    const int m = mid(be.v0, be.v1);
    out.bedges.push_back({be.v0, m, be.tag, be.outward, be.ring, be.parent_edge});
    out.bedges.push_back({m, be.v1, be.tag, be.outward, be.ring, be.parent_edge});
  }
  compute_node_normals(out);
  return out;
}

double min_angle_deg(const Mesh& mesh) {
  double worst = 180.0;
  for (const auto& t : mesh.tris) {
    const Vec2 a = mesh.verts[t[0]], b = mesh.verts[t[1]], c = mesh.verts[t[2]];
    const double la = dist(b, c), lb = dist(c, a), lc = dist(a, b);
    const auto angle = [](double opp, double s1, double s2) {
      const double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
      return std::acos(std::clamp(cosv, -1.0, 1.0)) * 180.0 / std::numbers::pi;
    };
    worst = std::min({worst, angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
  }
  return worst;
}

void validate_mesh(const Mesh& mesh, double min_angle) {
  if (mesh.verts.empty() || mesh.tris.empty())
    throw ValidationError("mesh is empty");
  for (const auto& t : mesh.tris) {
    for (int i = 0; i < 3; ++i)
      if (t[i] < 0 || t[i] >= mesh.n_verts())
        throw ValidationError("triangle vertex out of range");
    const double sa = cross(mesh.verts[t[1]] - mesh.verts[t[0]],
                            mesh.verts[t[2]] - mesh.verts[t[0]]);
    if (sa <= 0) throw GeometryError("triangle is degenerate or clockwise");
  }

  std::unordered_map<std::uint64_t, int> edge_count;
  std::unordered_set<std::uint64_t> directed;
  for (const auto& t : mesh.tris)
    for (int i = 0; i < 3; ++i) {
      ++edge_count[edge_key(t[i], t[(i + 1) % 3])];
      directed.insert((static_cast<std::uint64_t>(static_cast<std::uint32_t>(t[i])) << 32) |
                      static_cast<std::uint32_t>(t[(i + 1) % 3]));
    }
  std::unordered_set<std::uint64_t> bkeys;
  for (const auto& be : mesh.bedges) {
    const auto it = edge_count.find(edge_key(be.v0, be.v1));
    if (it == edge_count.end() || it->second != 1)
      throw GeometryError("boundary edge not matched by exactly one triangle");
    // domain must lie on the left of v0 -> v1
    if (!directed.count((static_cast<std::uint64_t>(static_cast<std::uint32_t>(be.v0)) << 32) |
                        static_cast<std::uint32_t>(be.v1)))
      throw GeometryError("boundary edge orientation disagrees with its triangle");
    const Vec2 d = normalized(mesh.verts[be.v1] - mesh.verts[be.v0]);
    if (std::abs(dot(d, be.outward)) > 1e-9 || std::abs(norm(be.outward) - 1.0) > 1e-9)
      throw GeometryError("boundary normal is not a unit normal");
    bkeys.insert(edge_key(be.v0, be.v1));
  }
  int boundary_edges = 0;
  for (const auto& [key, cnt] : edge_count) {
    if (cnt == 1) {
      ++boundary_edges;
      if (!bkeys.count(key))
        throw GeometryError("triangle boundary edge carries no boundary record");
    } else if (cnt != 2) {
      throw GeometryError("edge shared by more than two triangles");
    }
  }
  if (boundary_edges != static_cast<int>(mesh.bedges.size()))
    throw GeometryError("boundary record count mismatch");

  const long v = mesh.n_verts();
  const long e = static_cast<long>(edge_count.size());
  const long f = mesh.n_tris();
  const long b = static_cast<long>(mesh.domain.rings.size());
  if (v - e + f != 2 - b)
    throw GeometryError("mesh violates the Euler relation for its ring count");

  if (min_angle > 0 && min_angle_deg(mesh) < min_angle - 1e-9)
    throw GeometryError("mesh minimum angle below the quality bound");

  for (const auto& be : mesh.bedges) {
    if (be.tag != BoundaryTag::kObstacle) continue;
    for (const int vtx : {be.v0, be.v1})
      if (std::abs(norm(mesh.node_normal[vtx]) - 1.0) > 1e-9)
        throw GeometryError("obstacle vertex lacks a unit normal");
  }
}

std::vector<int> tagged_vertices(const Mesh& mesh,
                                 std::initializer_list<BoundaryTag> tags) {
  std::vector<int> out;
  for (const auto& be : mesh.bedges)
    for (const BoundaryTag t : tags)
      if (be.tag == t) {
        out.push_back(be.v0);
        out.push_back(be.v1);
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

constexpr std::uint64_t kMeshMagic = 0x53474c4d45534831ull;  // "SGLMESH1"

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::ifstream& is, T* v) {
  is.read(reinterpret_cast<char*>(v), sizeof(T));
  return static_cast<bool>(is);
}

}  // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open mesh cache for writing: " + path);
  put(os, kMeshMagic);
  put(os, mesh.h);
  put(os, static_cast<std::int64_t>(mesh.verts.size()));
  put(os, static_cast<std::int64_t>(mesh.tris.size()));
  put(os, static_cast<std::int64_t>(mesh.bedges.size()));
  put(os, static_cast<std::int64_t>(mesh.domain.rings.size()));
  for (const auto& p : mesh.verts) {
    put(os, p.x);
    put(os, p.y);
  }
  for (const auto& t : mesh.tris)
    for (int i = 0; i < 3; ++i) put(os, static_cast<std::int32_t>(t[i]));
  for (const auto& be : mesh.bedges) {
    put(os, static_cast<std::int32_t>(be.v0));
    put(os, static_cast<std::int32_t>(be.v1));
    put(os, static_cast<std::uint8_t>(be.tag));
    put(os, be.outward.x);
    put(os, be.outward.y);
    put(os, static_cast<std::int32_t>(be.ring));
    put(os, static_cast<std::int32_t>(be.parent_edge));
  }
  for (const auto& ring : mesh.domain.rings) {
    put(os, static_cast<std::int64_t>(ring.pts.size()));
    for (const auto& p : ring.pts) {
      put(os, p.x);
      put(os, p.y);
    }
    put(os, static_cast<std::int64_t>(ring.prov.size()));
    for (const auto& pr : ring.prov) {
      put(os, static_cast<std::uint8_t>(pr.source));
      put(os, pr.orientation);
    }
  }
  for (const auto& nrm : mesh.node_normal) {
    put(os, nrm.x);
    put(os, nrm.y);
  }
}

std::optional<Mesh> load_mesh(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint64_t magic = 0;
  if (!get(is, &magic) || magic != kMeshMagic) return std::nullopt;
  Mesh m;
  std::int64_t nv = 0, nt = 0, nb = 0, nr = 0;
  if (!get(is, &m.h) || !get(is, &nv) || !get(is, &nt) || !get(is, &nb) || !get(is, &nr))
    return std::nullopt;
  if (nv < 0 || nt < 0 || nb < 0 || nr < 0 || nv > (1ll << 31) || nt > (1ll << 31))
    return std::nullopt;
  m.verts.resize(nv);
  for (auto& p : m.verts)
    if (!get(is, &p.x) || !get(is, &p.y)) return std::nullopt;
  m.tris.resize(nt);
  for (auto& t : m.tris)
    for (int i = 0; i < 3; ++i) {
      std::int32_t v = 0;
      if (!get(is, &v)) return std::nullopt;
      t[i] = v;
    }
  m.bedges.resize(nb);
  for (auto& be : m.bedges) {
    std::int32_t v0, v1, ring, pedge;
    std::uint8_t tag;
    if (!get(is, &v0) || !get(is, &v1) || !get(is, &tag) || !get(is, &be.outward.x) ||
        !get(is, &be.outward.y) || !get(is, &ring) || !get(is, &pedge))
      return std::nullopt;
    be.v0 = v0;
    be.v1 = v1;
    be.tag = static_cast<BoundaryTag>(tag);
    be.ring = ring;
    be.parent_edge = pedge;
  }
  m.domain.rings.resize(nr);
  for (auto& ring : m.domain.rings) {
    std::int64_t np = 0;
    if (!get(is, &np) || np < 0 || np > (1ll << 31)) return std::nullopt;
    ring.pts.resize(np);
    for (auto& p : ring.pts)
      if (!get(is, &p.x) || !get(is, &p.y)) return std::nullopt;
    std::int64_t npr = 0;
    if (!get(is, &npr) || npr < 0 || npr > (1ll << 31)) return std::nullopt;
    ring.prov.resize(npr);
    for (auto& pr : ring.prov) {
      std::uint8_t src;
      if (!get(is, &src) || !get(is, &pr.orientation)) return std::nullopt;
      pr.source = static_cast<BoundarySource>(src);
    }
  }
  m.node_normal.resize(nv);
  for (auto& nrm : m.node_normal)
    if (!get(is, &nrm.x) || !get(is, &nrm.y)) return std::nullopt;
  return m;
}

}  // namespace siglab
