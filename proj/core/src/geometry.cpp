#include "siglab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "siglab/arrangement.hpp"

namespace siglab {

std::string to_string(BoundarySource s) {
  switch (s) {
    case BoundarySource::kNone: return "none";
    case BoundarySource::kOmega: return "omega";
    case BoundarySource::kObstacle1: return "obstacle1";
    case BoundarySource::kObstacle2: return "obstacle2";
    case BoundarySource::kAuxA: return "a";
    case BoundarySource::kAuxB: return "b";
  }
  return "?";
}

std::string to_string(EdgeTag t) {
  switch (t) {
    case EdgeTag::kSameAsO1: return "same_as_o1";
    case EdgeTag::kOppositeOfO2: return "opposite_of_o2";
    case EdgeTag::kCorner: return "corner";
  }
  return "?";
}

double signed_area(const Ring& r) {
  const int n = static_cast<int>(r.pts.size());
  double a2 = 0.0;
  for (int i = 0; i < n; ++i) a2 += cross(r.pts[i], r.pts[(i + 1) % n]);
  return 0.5 * a2;
}

double area(const PolygonalSet& s) {
  double a = 0.0;
  for (const auto& r : s.rings) a += signed_area(r);
  return a;
}

double perimeter(const PolygonalSet& s) {
  double p = 0.0;
  for (const auto& r : s.rings) {
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i) p += dist(r.pts[i], r.pts[(i + 1) % n]);
  }
  return p;
}

bool contains(const PolygonalSet& s, Vec2 p) {
  int wn = 0;
  for (const auto& r : s.rings) {
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i) {
      const Vec2 a = r.pts[i], b = r.pts[(i + 1) % n];
      if (a.y <= p.y) {
        if (b.y > p.y && cross(b - a, p - a) > 0.0) ++wn;
      } else {
        if (b.y <= p.y && cross(b - a, p - a) < 0.0) --wn;
      }
    }
  }
  return wn != 0;
}

std::pair<Vec2, Vec2> bounding_box(const PolygonalSet& s) {
  Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Vec2 hi{-lo.x, -lo.y};
  for (const auto& r : s.rings)
    for (const auto& p : r.pts) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  return {lo, hi};
}

double boundary_distance(const PolygonalSet& s, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& r : s.rings) {
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i)
      d = std::min(d, dist_point_segment(p, r.pts[i], r.pts[(i + 1) % n]));
  }
  return d;
}

namespace {

double snap_scale(const PolygonalSet& a) {
  const auto [lo, hi] = bounding_box(a);
  return 1e-9 * std::max(norm(hi - lo), 1e-6);
}

bool segments_properly_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

}  // namespace

void validate(const PolygonalSet& s, const std::string& what) {
  const double eps = s.empty() ? 0.0 : snap_scale(s);
  for (const auto& r : s.rings) {
    if (r.pts.size() < 3)
      throw ValidationError(what + ": ring with fewer than 3 vertices");
    if (!r.prov.empty() && r.prov.size() != r.pts.size())
      throw ValidationError(what + ": provenance size mismatch");
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i)
      if (dist(r.pts[i], r.pts[(i + 1) % n]) <= eps)
        throw ValidationError(what + ": consecutive vertices coincide");
    if (std::abs(signed_area(r)) <= eps * eps)
      throw ValidationError(what + ": ring with vanishing area");
  }
  // pairwise non-crossing (including self-intersection of each ring)
  struct Seg { Vec2 a, b; int ring, idx; };
  std::vector<Seg> segs;
  for (int ri = 0; ri < static_cast<int>(s.rings.size()); ++ri) {
    const auto& r = s.rings[ri];
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i)
      segs.push_back({r.pts[i], r.pts[(i + 1) % n], ri, i});
  }
  for (size_t i = 0; i < segs.size(); ++i)
    for (size_t j = i + 1; j < segs.size(); ++j) {
      if (segs[i].ring == segs[j].ring) {
        const int n = static_cast<int>(s.rings[segs[i].ring].pts.size());
        const int di = std::abs(segs[i].idx - segs[j].idx);
        if (di == 1 || di == n - 1) continue;  // adjacent edges share a vertex
      }
      if (segments_properly_cross(segs[i].a, segs[i].b, segs[j].a, segs[j].b))
        throw GeometryError(what + ": rings cross");
    }
}

PolygonalSet make_circle(Vec2 center, double radius, int segments,
                         BoundarySource source) {
  if (radius <= 0.0) throw ValidationError("circle radius must be positive");
  if (segments < 3) throw ValidationError("circle needs at least 3 segments");
  Ring r;
  r.pts.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * k / segments;
    r.pts.push_back(center + radius * Vec2{std::cos(t), std::sin(t)});
  }
  r.prov.assign(segments, EdgeProvenance{source, +1});
  PolygonalSet s;
  s.rings.push_back(std::move(r));
  return s;
}

PolygonalSet make_rectangle(Vec2 lo, Vec2 hi, BoundarySource source) {
  if (!(lo.x < hi.x && lo.y < hi.y))
    throw ValidationError("rectangle corners must be ordered");
  Ring r;
  r.pts = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  r.prov.assign(4, EdgeProvenance{source, +1});
  PolygonalSet s;
  s.rings.push_back(std::move(r));
  return s;
}

PolygonalSet make_polygon(const std::vector<Vec2>& vertices, BoundarySource source) {
  Ring r;
  r.pts = vertices;
  if (r.pts.size() >= 3 && signed_area(r) < 0.0)
    std::reverse(r.pts.begin(), r.pts.end());
  r.prov.assign(r.pts.size(), EdgeProvenance{source, +1});
  PolygonalSet s;
  s.rings.push_back(std::move(r));
  validate(s, "polygon");
  return s;
}

PolygonalSet retag(const PolygonalSet& s, BoundarySource source) {
  PolygonalSet out = s;
  for (auto& r : out.rings)
    r.prov.assign(r.pts.size(), EdgeProvenance{source, +1});
  return out;
}

PolygonalSet punch_holes(const PolygonalSet& domain,
                         const std::vector<const PolygonalSet*>& holes) {
  validate(domain, "domain");
  PolygonalSet out = domain;
  std::vector<const PolygonalSet*> placed;
  for (const PolygonalSet* hole : holes) {
    if (hole == nullptr || hole->empty())
      throw ValidationError("punch_holes: empty hole");
    validate(*hole, "hole");
    for (const auto& r : hole->rings) {
      if (signed_area(r) <= 0.0)
        throw ValidationError("punch_holes: hole rings must be counterclockwise");
      for (const Vec2& p : r.pts)
        if (!contains(domain, p))
          throw ValidationError("punch_holes: hole leaves the domain");
      for (const PolygonalSet* other : placed)
        if (contains(*other, r.pts[0]))
          throw ValidationError("punch_holes: holes overlap");
    }
    for (const PolygonalSet* other : placed)
      for (const auto& r : other->rings)
        if (contains(*hole, r.pts[0]))
          throw ValidationError("punch_holes: holes overlap");
    placed.push_back(hole);

    for (const auto& r : hole->rings) {
      const int n = static_cast<int>(r.pts.size());
      Ring rev;
      rev.pts.resize(n);
      for (int k = 0; k < n; ++k) rev.pts[k] = r.pts[(n - k) % n];
      if (!r.prov.empty()) {
        rev.prov.resize(n);
        // New edge j retraces source edge n-1-j backwards.
        for (int j = 0; j < n; ++j) {
          rev.prov[j] = r.prov[n - 1 - j];
          rev.prov[j].orientation = static_cast<std::int8_t>(-rev.prov[j].orientation);
        }
      }
      out.rings.push_back(std::move(rev));
    }
  }
  // Containment probes above leave crossings to the combined check.
  validate(out, "holed domain");
  return out;
}

PolygonalSet boolean_op(const PolygonalSet& a, const PolygonalSet& b, BoolOp op) {
  if (a.empty() && b.empty()) return {};
  Arrangement arr;
  arr.build({&a, &b});
  std::vector<int> keep;
  for (int f = 0; f < arr.face_count(); ++f) {
    if (arr.face(f).unbounded) continue;
    const bool in_a = arr.face_in(f, 0), in_b = arr.face_in(f, 1);
    bool sel = false;
    switch (op) {
      case BoolOp::kUnion: sel = in_a || in_b; break;
      case BoolOp::kIntersection: sel = in_a && in_b; break;
      case BoolOp::kDifference: sel = in_a && !in_b; break;
    }
    if (sel) keep.push_back(f);
  }
  return arr.region_from_faces(keep);
}

namespace {

// Shared machinery for compute_g0 / compute_v: overlay of (omega, o1, o2)
// plus the face set of the visible component.
struct TripleOverlay {
  Arrangement arr;
  std::vector<int> g0_faces;

  TripleOverlay(const PolygonalSet& omega, const PolygonalSet& o1,
                const PolygonalSet& o2) {
    arr.build({&omega, &o1, &o2});

    // compact containment: no obstacle boundary may touch or leave omega
    for (const auto& e : arr.edges()) {
      bool has_omega = false, has_obstacle = false;
      for (const auto& c : e.contributions) {
        if (c.input == 0) has_omega = true;
        if (c.input > 0) has_obstacle = true;
      }
      if (has_omega && has_obstacle)
        throw GeometryError("obstacle boundary touches the domain boundary");
    }
    for (int f = 0; f < arr.face_count(); ++f) {
      if (arr.face(f).unbounded) continue;
      if ((arr.face_in(f, 1) || arr.face_in(f, 2)) && !arr.face_in(f, 0))
        throw GeometryError("obstacle not contained in the domain");
    }

    for (int i : {1, 2}) {
      const auto comps = arr.components([i](const std::vector<bool>& in) {
        return in[0] && !in[static_cast<size_t>(i)];
      });
      if (comps.size() != 1)
        throw GeometryError("domain minus obstacle " + std::to_string(i) +
                            " is not connected");
    }

    const auto comps = arr.components([](const std::vector<bool>& in) {
      return in[0] && !in[1] && !in[2];
    });
    if (comps.empty()) throw GeometryError("domain is covered by the obstacles");

    // the visible component is the one whose boundary carries every
    // omega-sourced edge
    std::vector<bool> on_omega_needed;
    int found = -1;
    for (size_t ci = 0; ci < comps.size(); ++ci) {
      std::vector<bool> in(arr.face_count(), false);
      for (int f : comps[ci]) in[f] = true;
      bool all = true;
      for (const auto& e : arr.edges()) {
        bool has_omega = false;
        for (const auto& c : e.contributions)
          if (c.input == 0) has_omega = true;
        if (!has_omega) continue;
        const bool l = e.face_left >= 0 && in[e.face_left];
        const bool r = e.face_right >= 0 && in[e.face_right];
        if (l == r) {
          all = false;
          break;
        }
      }
      if (all) {
        found = static_cast<int>(ci);
        break;
      }
    }
    if (found < 0)
      throw GeometryError("no component is bounded by the whole domain boundary");
    g0_faces = comps[found];
  }
};

bool edge_between(const Arrangement::Edge& e, const std::vector<bool>& set_a,
                  const std::vector<bool>& set_b) {
  const bool la = e.face_left >= 0 && set_a[e.face_left];
  const bool ra = e.face_right >= 0 && set_a[e.face_right];
  const bool lb = e.face_left >= 0 && set_b[e.face_left];
  const bool rb = e.face_right >= 0 && set_b[e.face_right];
  return (la && rb) || (ra && lb);
}

}  // namespace

PolygonalSet compute_g0(const PolygonalSet& omega, const PolygonalSet& o1,
                        const PolygonalSet& o2) {
  validate(omega, "omega");
  if (!o1.empty()) validate(o1, "obstacle 1");
  if (!o2.empty()) validate(o2, "obstacle 2");
  TripleOverlay ov(omega, o1, o2);
  return ov.arr.region_from_faces(ov.g0_faces);
}

PolygonalSet compute_v(const PolygonalSet& omega, const PolygonalSet& g0,
                       const PolygonalSet& o1, const PolygonalSet& o2) {
  validate(omega, "omega");
  validate(o1, "obstacle 1");
  if (!o2.empty()) validate(o2, "obstacle 2");
  TripleOverlay ov(omega, o1, o2);
  const Arrangement& arr = ov.arr;

  // the caller must pass the g0 this overlay produces
  double g0_area = 0.0;
  for (int f : ov.g0_faces) g0_area += arr.face(f).area;
  const double tol = 10.0 * arr.snap_pitch() * std::max(perimeter(g0), 1.0) + 1e-12;
  if (std::abs(g0_area - area(g0)) > tol)
    throw ValidationError("g0 does not match the overlay of the given sets");

  // o1 must not be swallowed by o2
  double o1_minus_o2 = 0.0;
  for (int f = 0; f < arr.face_count(); ++f)
    if (!arr.face(f).unbounded && arr.face_in(f, 1) && !arr.face_in(f, 2))
      o1_minus_o2 += arr.face(f).area;
  if (o1_minus_o2 <= tol)
    throw ValidationError("obstacle 1 is contained in obstacle 2");

  std::vector<bool> in_g0(arr.face_count(), false);
  for (int f : ov.g0_faces) in_g0[f] = true;

  // candidate faces: inside omega, outside o2, not part of g0
  std::vector<bool> eligible(arr.face_count(), false);
  for (int f = 0; f < arr.face_count(); ++f)
    if (!arr.face(f).unbounded && arr.face_in(f, 0) && !arr.face_in(f, 2) && !in_g0[f])
      eligible[f] = true;

  // connected components of the eligible faces
  std::vector<int> comp(arr.face_count(), -1);
  int n_comp = 0;
  for (int f0 = 0; f0 < arr.face_count(); ++f0) {
    if (!eligible[f0] || comp[f0] != -1) continue;
    std::vector<int> stack{f0};
    comp[f0] = n_comp;
    while (!stack.empty()) {
      const int f = stack.back();
      stack.pop_back();
      for (const auto& e : arr.edges()) {
        int other = -1;
        if (e.face_left == f) other = e.face_right;
        else if (e.face_right == f) other = e.face_left;
        if (other >= 0 && eligible[other] && comp[other] == -1) {
          comp[other] = n_comp;
          stack.push_back(other);
        }
      }
    }
    ++n_comp;
  }

  struct Candidate {
    std::vector<int> faces;
    double area = 0.0;
    bool touches_g0 = false;
    Vec2 leftmost{std::numeric_limits<double>::max(), 0.0};
  };
  std::vector<Candidate> cands(n_comp);
  for (int f = 0; f < arr.face_count(); ++f)
    if (eligible[f]) {
      cands[comp[f]].faces.push_back(f);
      cands[comp[f]].area += arr.face(f).area;
    }
  std::vector<bool> comp_in(arr.face_count(), false);
  for (auto& c : cands) {
    std::fill(comp_in.begin(), comp_in.end(), false);
    for (int f : c.faces) comp_in[f] = true;
    for (const auto& e : arr.edges())
      if (edge_between(e, comp_in, in_g0)) {
        c.touches_g0 = true;
        break;
      }
    for (int be : arr.boundary_edges(c.faces))
      for (const Vec2 p : {arr.edges()[be].a, arr.edges()[be].b})
        if (p.x < c.leftmost.x || (p.x == c.leftmost.x && p.y < c.leftmost.y))
          c.leftmost = p;
  }
  cands.erase(std::remove_if(cands.begin(), cands.end(),
                             [](const Candidate& c) { return !c.touches_g0; }),
              cands.end());
  if (cands.empty())
    throw GeometryError("no hidden component shares boundary with g0");
  std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
    if (l.area != r.area) return l.area > r.area;
    if (l.leftmost.x != r.leftmost.x) return l.leftmost.x < r.leftmost.x;
    return l.leftmost.y < r.leftmost.y;
  });
  return arr.region_from_faces(cands.front().faces);
}

namespace {

struct SourceEdge {
  Vec2 a, b;
  Vec2 dir;  // normalized
};

std::vector<SourceEdge> directed_edges(const PolygonalSet& s) {
  std::vector<SourceEdge> out;
  for (const auto& r : s.rings) {
    const int n = static_cast<int>(r.pts.size());
    for (int i = 0; i < n; ++i) {
      const Vec2 a = r.pts[i], b = r.pts[(i + 1) % n];
      out.push_back({a, b, normalized(b - a)});
    }
  }
  return out;
}

// Both endpoints on a segment within tol bound the direction deviation by
// asin(2 tol / len), so the angle slack must widen as edges get shorter.
double direction_slack(double len, double tol) {
  const double sin_cap = std::min(1.0, 2.0 * tol / std::max(len, tol));
  return 1e-12 + sin_cap * sin_cap;
}

// True when [a, b] lies on the segment se (within tol) and runs along it;
// sign of dot distinguishes orientation.
bool edge_on_edge(Vec2 a, Vec2 b, const SourceEdge& se, double tol, double* dir_dot) {
  if (dist_point_segment(a, se.a, se.b) > tol) return false;
  if (dist_point_segment(b, se.a, se.b) > tol) return false;
  const Vec2 d = normalized(b - a);
  const double dd = dot(d, se.dir);
  if (std::abs(dd) < 1.0 - direction_slack(dist(a, b), tol)) return false;
  *dir_dot = dd;
  return true;
}

}  // namespace

std::vector<EdgeClassification> classify_boundary(const PolygonalSet& v,
                                                  const PolygonalSet& o1,
                                                  const PolygonalSet& o2) {
  validate(v, "v");
  validate(o1, "obstacle 1");
  if (!o2.empty()) validate(o2, "obstacle 2");
  PolygonalSet joint = v;
  for (const auto& r : o1.rings) joint.rings.push_back(r);
  for (const auto& r : o2.rings) joint.rings.push_back(r);
  const double tol = 4.0 * snap_scale(joint);

  const auto e1 = directed_edges(o1);
  const auto e2 = directed_edges(o2);

  std::vector<EdgeClassification> out;
  std::vector<std::string> violations;
  for (const auto& r : v.rings) {
    const int n = static_cast<int>(r.pts.size());
    std::vector<EdgeTag> tags(n);
    for (int i = 0; i < n; ++i) {
      const Vec2 a = r.pts[i], b = r.pts[(i + 1) % n];
      bool matched = false;
      double dd = 0.0;
      for (const auto& se : e1) {
        if (edge_on_edge(a, b, se, tol, &dd) && dd > 0.0) {
          // outward normals agree exactly when the directions agree
          const Vec2 nv = -perp(normalized(b - a));
          const Vec2 ns = -perp(se.dir);
          out.push_back({a, b, EdgeTag::kSameAsO1, dot(nv, ns)});
          tags[i] = EdgeTag::kSameAsO1;
          matched = true;
          break;
        }
      }
      if (!matched) {
        for (const auto& se : e2) {
          if (edge_on_edge(a, b, se, tol, &dd) && dd < 0.0) {
            const Vec2 nv = -perp(normalized(b - a));
            const Vec2 ns = -perp(se.dir);
            out.push_back({a, b, EdgeTag::kOppositeOfO2, dot(nv, ns)});
            tags[i] = EdgeTag::kOppositeOfO2;
            matched = true;
            break;
          }
        }
      }
      if (!matched) {
        std::ostringstream os;
        os << "unclassifiable edge (" << a.x << "," << a.y << ")-(" << b.x << ","
           << b.y << ")";
        violations.push_back(os.str());
      }
    }
    for (int i = 0; i < n; ++i) {
      const int prev = (i + n - 1) % n;
      if (tags[i] != tags[prev])
        out.push_back({r.pts[i], r.pts[i], EdgeTag::kCorner, 0.0});
    }
  }
  if (!violations.empty())
    throw GeometryError("boundary classification failed: " + violations.front() +
                        " (+" + std::to_string(violations.size() - 1) + " more)");
  for (const auto& c : out) {
    if (c.tag == EdgeTag::kCorner) continue;
    const double slack = direction_slack(dist(c.a, c.b), tol);
    if (c.tag == EdgeTag::kSameAsO1 && std::abs(c.normal_dot - 1.0) > slack)
      throw GeometryError("normal agreement violated on a same-direction edge");
    if (c.tag == EdgeTag::kOppositeOfO2 && std::abs(c.normal_dot + 1.0) > slack)
      throw GeometryError("normal agreement violated on an opposite-direction edge");
  }
  return out;
}

StructureReport check_structure(const std::vector<StructureInstance>& instances) {
  StructureReport report;
  auto add = [&](const std::string& check, int idx, bool holds,
                 const std::string& detail) {
    report.items.push_back({check, idx, holds, detail});
    report.all_hold = report.all_hold && holds;
  };

  for (int idx = 0; idx < static_cast<int>(instances.size()); ++idx) {
    const auto& inst = instances[idx];
    PolygonalSet g0, v;
    std::vector<EdgeClassification> cls;
    try {
      g0 = compute_g0(inst.omega, inst.o1, inst.o2);
      v = compute_v(inst.omega, g0, inst.o1, inst.o2);
      cls = classify_boundary(v, inst.o1, inst.o2);
    } catch (const std::exception& ex) {
      add("construction", idx, false, ex.what());
      continue;
    }
    PolygonalSet joint = inst.omega;
    for (const auto& r : inst.o1.rings) joint.rings.push_back(r);
    for (const auto& r : inst.o2.rings) joint.rings.push_back(r);
    const double tol = 4.0 * snap_scale(joint);
    const auto eo1 = directed_edges(inst.o1);
    const auto eo2 = directed_edges(inst.o2);
    const auto eg0 = directed_edges(g0);

    auto on_any = [&](Vec2 a, Vec2 b, const std::vector<SourceEdge>& src) {
      double dd;
      for (const auto& se : src)
        if (edge_on_edge(a, b, se, tol, &dd)) return true;
      return false;
    };

    // 1. the visible boundary reaches obstacle 1 away from obstacle 2
    {
      double len = 0.0;
      for (const auto& se : eg0)
        if (on_any(se.a, se.b, eo1) && !on_any(se.a, se.b, eo2))
          len += dist(se.a, se.b);
      add("g0-meets-o1-off-o2", idx, len > 0.0,
          "shared length " + std::to_string(len));
    }

    // 2. every v edge off the o2 boundary lies on both the o1 and g0
    //    boundaries, and such edges exist
    {
      double len_off_o2 = 0.0;
      bool all_on_o1_and_g0 = true;
      for (const auto& se : directed_edges(v)) {
        if (on_any(se.a, se.b, eo2)) continue;
        len_off_o2 += dist(se.a, se.b);
        if (!on_any(se.a, se.b, eo1) || !on_any(se.a, se.b, eg0))
          all_on_o1_and_g0 = false;
      }
      add("v-boundary-off-o2-on-o1-and-g0", idx,
          len_off_o2 > 0.0 && all_on_o1_and_g0,
          "length off o2 " + std::to_string(len_off_o2));
    }

    // 3. connected subset with boundary inside the superset boundary equals
    //    the superset (exercised with subset == superset == g0, pushed
    //    through the overlay engine rather than compared syntactically)
    {
      bool boundary_inside = true;
      for (const auto& se : eg0)
        if (!on_any(se.a, se.b, eg0)) boundary_inside = false;
      const double diff = area(boolean_op(g0, g0, BoolOp::kDifference));
      add("matching-boundary-forces-equality", idx,
          boundary_inside && diff <= tol * std::max(perimeter(g0), 1.0),
          "area gap " + std::to_string(diff));
    }

    // 4. v and g0 have disjoint interiors, so shared edges carry opposite
    //    normals
    {
      bool ok = true;
      double shared = 0.0;
      for (const auto& sv : directed_edges(v)) {
        for (const auto& sg : eg0) {
          double dd;
          if (edge_on_edge(sv.a, sv.b, sg, tol, &dd)) {
            shared += dist(sv.a, sv.b);
            if (dd > 0.0) ok = false;  // same direction would mean same normal
          }
        }
      }
      const double overlap = area(boolean_op(v, g0, BoolOp::kIntersection));
      add("disjoint-sets-opposite-normals", idx,
          ok && shared > 0.0 && overlap <= tol * perimeter(v),
          "shared length " + std::to_string(shared));
    }
  }
  return report;
}

}  // namespace siglab
