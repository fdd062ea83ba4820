#include "siglab/arrangement.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

namespace siglab {
namespace {

struct VKey {
  double x, y;
  bool operator<(const VKey& o) const {
    return x != o.x ? x < o.x : y < o.y;
  }
  bool operator==(const VKey& o) const { return x == o.x && y == o.y; }
};

VKey key_of(Vec2 v) { return {v.x, v.y}; }

struct RawSegment {
  Vec2 a, b;
  Arrangement::Contribution contrib;  // dir filled in later, +1 means a->b
};

}  // namespace

class ArrangementBuilder {
 public:
  ArrangementBuilder(Arrangement& arr, const std::vector<const PolygonalSet*>& inputs)
      : arr_(arr), inputs_(inputs) {}

  void run() {
    arr_.n_inputs_ = static_cast<int>(inputs_.size());
    if (arr_.n_inputs_ > Arrangement::kMaxInputs)
      throw GeometryError("arrangement supports at most 4 inputs");
    compute_pitch();
    collect_segments();
    if (segments_.empty()) {
      arr_.pitch_ = pitch_;
      return;  // empty arrangement: no faces, every query returns empty
    }
    split_segments();
    dedup_edges();
    build_vertices();
    trace_cycles();
    assign_holes();
    propagate_winding();
    build_faces();
    check_snap_distortion();
    arr_.pitch_ = pitch_;
  }

 private:
  Arrangement& arr_;
  const std::vector<const PolygonalSet*>& inputs_;
  double pitch_ = 0.0;

  std::vector<RawSegment> segments_;           // snapped, pre-split
  std::vector<std::vector<Vec2>> split_points_;  // per segment

  // vertex graph
  std::map<VKey, int> vertex_ids_;
  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> out_half_;  // per vertex, outgoing half-edges by angle

  // cycles
  std::vector<int> half_cycle_;      // half-edge -> cycle id
  std::vector<double> cycle_area_;
  std::vector<int> cycle_host_;      // same-face link target (-2 unbounded, -1 none)
  std::vector<std::array<int, Arrangement::kMaxInputs>> cycle_winding_;

  Vec2 snap(Vec2 v) const {
    return {std::round(v.x / pitch_) * pitch_, std::round(v.y / pitch_) * pitch_};
  }

  void compute_pitch() {
    double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    bool any = false;
    for (const auto* s : inputs_)
      for (const auto& ring : s->rings)
        for (const auto& p : ring.pts) {
          any = true;
          lo_x = std::min(lo_x, p.x);
          lo_y = std::min(lo_y, p.y);
          hi_x = std::max(hi_x, p.x);
          hi_y = std::max(hi_y, p.y);
        }
    if (!any) {
      pitch_ = 1e-9;
      return;
    }
    const double diam = std::hypot(hi_x - lo_x, hi_y - lo_y);
    pitch_ = 1e-9 * std::max(diam, 1e-6);
  }

  void collect_segments() {
    for (int i = 0; i < static_cast<int>(inputs_.size()); ++i) {
      for (const auto& ring : inputs_[i]->rings) {
        const int n = static_cast<int>(ring.pts.size());
        for (int j = 0; j < n; ++j) {
          RawSegment seg;
          seg.a = snap(ring.pts[j]);
          seg.b = snap(ring.pts[(j + 1) % n]);
          if (key_of(seg.a) == key_of(seg.b)) continue;  // collapsed by snapping
          seg.contrib.input = i;
          seg.contrib.prov = ring.prov.empty() ? EdgeProvenance{} : ring.prov[j];
          segments_.push_back(seg);
        }
      }
    }
  }

  // Collects, for every segment, the points where other segments cross it or
  // where another segment's endpoint lies on it (T junction within pitch).
  void split_segments() {
    const int n = static_cast<int>(segments_.size());
    split_points_.assign(n, {});
    const double tol = 1.5 * pitch_;
    for (int i = 0; i < n; ++i) {
      const Vec2 a = segments_[i].a, b = segments_[i].b;
      const double lo_x = std::min(a.x, b.x) - tol, hi_x = std::max(a.x, b.x) + tol;
      const double lo_y = std::min(a.y, b.y) - tol, hi_y = std::max(a.y, b.y) + tol;
      const Vec2 r = b - a;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const Vec2 c = segments_[j].a, d = segments_[j].b;
        if (std::max(c.x, d.x) < lo_x || std::min(c.x, d.x) > hi_x ||
            std::max(c.y, d.y) < lo_y || std::min(c.y, d.y) > hi_y)
          continue;
        // endpoints of j on segment i
        for (const Vec2 p : {c, d}) {
          if (dist_point_segment(p, a, b) <= tol &&
              !(key_of(p) == key_of(a)) && !(key_of(p) == key_of(b)))
            split_points_[i].push_back(p);
        }
        if (j < i) continue;  // proper crossings are symmetric, do each pair once
        const Vec2 s = d - c;
        const double denom = cross(r, s);
        const double scale = norm(r) * norm(s);
        if (std::abs(denom) <= 1e-14 * scale) continue;  // near parallel
        const double t = cross(c - a, s) / denom;
        const double u = cross(c - a, r) / denom;
        const double slack_t = tol / std::max(norm(r), pitch_);
        const double slack_u = tol / std::max(norm(s), pitch_);
        if (t < -slack_t || t > 1.0 + slack_t || u < -slack_u || u > 1.0 + slack_u)
          continue;
        const Vec2 p = snap(a + t * r);
        if (!(key_of(p) == key_of(a)) && !(key_of(p) == key_of(b)))
          split_points_[i].push_back(p);
        if (!(key_of(p) == key_of(c)) && !(key_of(p) == key_of(d)))
          split_points_[j].push_back(p);
      }
    }
  }

  void dedup_edges() {
    std::map<std::pair<VKey, VKey>, int> edge_ids;
    const int n = static_cast<int>(segments_.size());
    for (int i = 0; i < n; ++i) {
      const Vec2 a = segments_[i].a, b = segments_[i].b;
      // order split points along the segment
      auto& sp = split_points_[i];
      const Vec2 r = b - a;
      const double len2 = norm2(r);
      std::vector<std::pair<double, Vec2>> ordered;
      ordered.reserve(sp.size() + 2);
      ordered.push_back({0.0, a});
      for (const Vec2& p : sp) ordered.push_back({dot(p - a, r) / len2, p});
      ordered.push_back({1.0, b});
      std::sort(ordered.begin(), ordered.end(),
                [](const auto& l, const auto& rr) { return l.first < rr.first; });
      for (size_t k = 0; k + 1 < ordered.size(); ++k) {
        const Vec2 p = ordered[k].second, q = ordered[k + 1].second;
        if (key_of(p) == key_of(q)) continue;
        const bool forward = key_of(p) < key_of(q);
        const Vec2 ca = forward ? p : q, cb = forward ? q : p;
        auto [it, inserted] = edge_ids.try_emplace({key_of(ca), key_of(cb)},
                                                   static_cast<int>(arr_.edges_.size()));
        if (inserted) {
          Arrangement::Edge e;
          e.a = ca;
          e.b = cb;
          arr_.edges_.push_back(e);
        }
        Arrangement::Edge& e = arr_.edges_[it->second];
        Arrangement::Contribution c = segments_[i].contrib;
        c.dir = forward ? +1 : -1;
        e.contributions.push_back(c);
        e.winding_delta[c.input] += c.dir;
      }
    }
  }

  int vertex_id(Vec2 v) {
    auto [it, inserted] = vertex_ids_.try_emplace(key_of(v),
                                                  static_cast<int>(vertices_.size()));
    if (inserted) vertices_.push_back(v);
    return it->second;
  }

  // Half-edge h = 2*e (a->b) or 2*e+1 (b->a).
  int tail_of(int h) const { return (h & 1) ? vtx_b_[h / 2] : vtx_a_[h / 2]; }
  int head_of(int h) const { return tail_of(h ^ 1); }
  Vec2 dir_of(int h) const {
    const auto& e = arr_.edges_[h / 2];
    return (h & 1) ? e.a - e.b : e.b - e.a;
  }

  std::vector<int> vtx_a_, vtx_b_;

  void build_vertices() {
    const int ne = static_cast<int>(arr_.edges_.size());
    vtx_a_.resize(ne);
    vtx_b_.resize(ne);
    for (int e = 0; e < ne; ++e) {
      vtx_a_[e] = vertex_id(arr_.edges_[e].a);
      vtx_b_[e] = vertex_id(arr_.edges_[e].b);
      if (vtx_a_[e] == vtx_b_[e])
        throw GeometryError("degenerate edge after snapping");
    }
    out_half_.assign(vertices_.size(), {});
    for (int e = 0; e < ne; ++e) {
      out_half_[vtx_a_[e]].push_back(2 * e);
      out_half_[vtx_b_[e]].push_back(2 * e + 1);
    }
    for (auto& list : out_half_) {
      std::sort(list.begin(), list.end(), [&](int h1, int h2) {
        const Vec2 d1 = dir_of(h1), d2 = dir_of(h2);
        const double a1 = std::atan2(d1.y, d1.x), a2 = std::atan2(d2.y, d2.x);
        if (a1 != a2) return a1 < a2;
        return h1 < h2;
      });
    }
  }

  // next half-edge in the face cycle with the region on the left: at the head
  // of h take the outgoing half-edge clockwise-adjacent to the twin of h.
  int next_half(int h) const {
    const int v = head_of(h);
    const auto& list = out_half_[v];
    const int twin = h ^ 1;
    const int m = static_cast<int>(list.size());
    for (int k = 0; k < m; ++k)
      if (list[k] == twin) return list[(k - 1 + m) % m];
    assert(false && "twin not found in outgoing list");
    return -1;
  }

  void trace_cycles() {
    const int nh = 2 * static_cast<int>(arr_.edges_.size());
    half_cycle_.assign(nh, -1);
    arr_.cycle_halfedges_.clear();
    for (int h0 = 0; h0 < nh; ++h0) {
      if (half_cycle_[h0] != -1) continue;
      const int cyc = static_cast<int>(arr_.cycle_halfedges_.size());
      arr_.cycle_halfedges_.push_back({});
      double area2 = 0.0;
      int h = h0;
      do {
        half_cycle_[h] = cyc;
        arr_.cycle_halfedges_[cyc].push_back(h);
        const Vec2 p = vertices_[tail_of(h)], q = vertices_[head_of(h)];
        area2 += cross(p, q);
        h = next_half(h);
        if (arr_.cycle_halfedges_[cyc].size() > static_cast<size_t>(nh))
          throw GeometryError("cycle tracing failed to close");
      } while (h != h0);
      cycle_area_.push_back(0.5 * area2);
    }
    const int ne = static_cast<int>(arr_.edges_.size());
    for (int e = 0; e < ne; ++e) {
      arr_.edges_[e].cycle_left = half_cycle_[2 * e];
      arr_.edges_[e].cycle_right = half_cycle_[2 * e + 1];
    }
  }

  // Attaches every negative (clockwise) cycle to the cycle bounding the same
  // face, found by casting a ray in -x from its leftmost vertex.  Cycles whose
  // ray escapes belong to the unbounded face.
  void assign_holes() {
    const int nc = static_cast<int>(arr_.cycle_halfedges_.size());
    cycle_host_.assign(nc, -1);
    for (int c = 0; c < nc; ++c) {
      if (cycle_area_[c] > 0.0) continue;
      Vec2 v{std::numeric_limits<double>::max(), 0.0};
      for (int h : arr_.cycle_halfedges_[c]) {
        const Vec2 p = vertices_[tail_of(h)];
        if (p.x < v.x || (p.x == v.x && p.y < v.y)) v = p;
      }
      int best_edge = -1;
      double best_x = -std::numeric_limits<double>::max();
      const int ne = static_cast<int>(arr_.edges_.size());
      for (int e = 0; e < ne; ++e) {
        const Vec2 a = arr_.edges_[e].a, b = arr_.edges_[e].b;
        if (a.y == b.y) continue;
        const Vec2 lo = a.y < b.y ? a : b, hi = a.y < b.y ? b : a;
        if (!(lo.y <= v.y && v.y < hi.y)) continue;
        const double xc = a.x + (b.x - a.x) * (v.y - a.y) / (b.y - a.y);
        if (xc >= v.x) continue;
        if (xc > best_x) {
          best_x = xc;
          best_edge = e;
        }
      }
      if (best_edge < 0) {
        cycle_host_[c] = -2;  // unbounded
        continue;
      }
      const auto& e = arr_.edges_[best_edge];
      // the half-edge whose left side faces +x is the one pointing downward
      const int h = (e.a.y > e.b.y) ? 2 * best_edge : 2 * best_edge + 1;
      cycle_host_[c] = half_cycle_[h];
    }
  }

  void propagate_winding() {
    const int nc = static_cast<int>(arr_.cycle_halfedges_.size());
    cycle_winding_.assign(nc, {});
    std::vector<bool> seen(nc, false);
    std::deque<int> queue;

    std::vector<std::vector<int>> host_children(nc);
    for (int c = 0; c < nc; ++c) {
      if (cycle_host_[c] == -2) {
        seen[c] = true;
        queue.push_back(c);
      } else if (cycle_host_[c] >= 0) {
        host_children[cycle_host_[c]].push_back(c);
      }
    }
    if (queue.empty() && nc > 0)
      throw GeometryError("no unbounded cycle found");

    auto visit = [&](int c, const std::array<int, Arrangement::kMaxInputs>& w) {
      if (seen[c]) {
        if (cycle_winding_[c] != w)
          throw GeometryError("inconsistent winding propagation");
        return;
      }
      seen[c] = true;
      cycle_winding_[c] = w;
      queue.push_back(c);
    };

    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop_front();
      const auto& w = cycle_winding_[c];
      // same-face links: host and children share the winding vector
      if (cycle_host_[c] >= 0) visit(cycle_host_[c], w);
      for (int child : host_children[c]) visit(child, w);
      // edge crossings
      for (int h : arr_.cycle_halfedges_[c]) {
        const int e = h / 2;
        auto wx = w;
        // crossing from the left of a->b to the right subtracts the delta
        const int sign = (h & 1) ? +1 : -1;
        for (int i = 0; i < arr_.n_inputs_; ++i)
          wx[i] += sign * arr_.edges_[e].winding_delta[i];
        visit(half_cycle_[h ^ 1], wx);
      }
    }
    for (int c = 0; c < nc; ++c)
      if (!seen[c]) throw GeometryError("disconnected cycle during winding pass");
  }

  struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
  };

  void build_faces() {
    const int nc = static_cast<int>(arr_.cycle_halfedges_.size());
    UnionFind uf(nc + 1);
    const int unbounded = nc;
    for (int c = 0; c < nc; ++c) {
      if (cycle_host_[c] == -2) uf.unite(c, unbounded);
      else if (cycle_host_[c] >= 0) uf.unite(c, cycle_host_[c]);
    }
    std::map<int, int> root_to_face;
    arr_.cycle_face_.assign(nc, -1);
    // deterministic face ids: scan cycles in index order
    for (int c = 0; c < nc; ++c) {
      const int root = uf.find(c);
      auto [it, inserted] = root_to_face.try_emplace(root,
                                                     static_cast<int>(arr_.faces_.size()));
      if (inserted) {
        Arrangement::Face f;
        f.winding.assign(arr_.n_inputs_, 0);
        arr_.faces_.push_back(f);
      }
      Arrangement::Face& f = arr_.faces_[it->second];
      f.cycles.push_back(c);
      f.area += cycle_area_[c];
      arr_.cycle_face_[c] = it->second;
    }
    const int unbounded_root = uf.find(unbounded);
    for (auto& [root, fid] : root_to_face) {
      Arrangement::Face& f = arr_.faces_[fid];
      f.unbounded = (root == unbounded_root);
      const auto& w = cycle_winding_[f.cycles.front()];
      for (int c : f.cycles)
        if (cycle_winding_[c] != w)
          throw GeometryError("face cycles disagree on winding");
      for (int i = 0; i < arr_.n_inputs_; ++i) f.winding[i] = w[i];
      int positive = 0;
      for (int c : f.cycles)
        if (cycle_area_[c] > 0.0) ++positive;
      if (!f.unbounded && positive != 1)
        throw GeometryError("face does not have exactly one outer cycle");
    }
    for (auto& e : arr_.edges_) {
      e.face_left = arr_.cycle_face_[e.cycle_left];
      e.face_right = arr_.cycle_face_[e.cycle_right];
    }
  }

  void check_snap_distortion() {
    for (int i = 0; i < arr_.n_inputs_; ++i) {
      double raw = 0.0, perim = 0.0;
      for (const auto& ring : inputs_[i]->rings) {
        raw += signed_area(ring);
        const int n = static_cast<int>(ring.pts.size());
        for (int j = 0; j < n; ++j) perim += dist(ring.pts[j], ring.pts[(j + 1) % n]);
      }
      double snapped = 0.0;
      for (const auto& f : arr_.faces_)
        if (!f.unbounded && f.winding[i] != 0) snapped += f.area;
      if (std::abs(snapped - raw) > 10.0 * pitch_ * std::max(perim, 1.0))
        throw GeometryError("snapping changed input area beyond tolerance");
    }
  }
};

void Arrangement::build(const std::vector<const PolygonalSet*>& inputs) {
  edges_.clear();
  faces_.clear();
  cycle_face_.clear();
  cycle_halfedges_.clear();
  ArrangementBuilder(*this, inputs).run();
}

std::vector<std::vector<int>> Arrangement::components(const Predicate& pred) const {
  const int nf = face_count();
  std::vector<bool> in(nf, false);
  std::vector<bool> flags;
  for (int f = 0; f < nf; ++f) {
    if (faces_[f].unbounded) continue;
    flags.assign(n_inputs_, false);
    for (int i = 0; i < n_inputs_; ++i) flags[i] = faces_[f].winding[i] != 0;
    in[f] = pred(flags);
  }
  // union faces across edges interior to the selection
  std::vector<int> parent(nf);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges_) {
    if (e.face_left >= 0 && e.face_right >= 0 && in[e.face_left] && in[e.face_right])
      parent[find(e.face_left)] = find(e.face_right);
  }
  std::map<int, std::vector<int>> groups;
  for (int f = 0; f < nf; ++f)
    if (in[f]) groups[find(f)].push_back(f);

  std::vector<std::vector<int>> result;
  for (auto& [root, faces] : groups) result.push_back(std::move(faces));
  std::sort(result.begin(), result.end(), [&](const auto& l, const auto& r) {
    double al = 0.0, ar = 0.0;
    for (int f : l) al += faces_[f].area;
    for (int f : r) ar += faces_[f].area;
    if (al != ar) return al > ar;
    return l.front() < r.front();
  });
  return result;
}

std::vector<int> Arrangement::boundary_edges(const std::vector<int>& faces) const {
  std::vector<bool> in(face_count(), false);
  for (int f : faces) in[f] = true;
  std::vector<int> result;
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const bool l = edges_[e].face_left >= 0 && in[edges_[e].face_left];
    const bool r = edges_[e].face_right >= 0 && in[edges_[e].face_right];
    if (l != r) result.push_back(e);
  }
  return result;
}

PolygonalSet Arrangement::region_from_faces(const std::vector<int>& faces) const {
  PolygonalSet out;
  const std::vector<int> bedges = boundary_edges(faces);
  if (bedges.empty()) return out;
  std::vector<bool> in(face_count(), false);
  for (int f : faces) in[f] = true;

  // directed boundary half-edges with the region on the left
  struct Directed {
    Vec2 a, b;
    int edge;
    std::int8_t out_dir;  // +1 canonical a->b, -1 reversed
  };
  std::map<VKey, std::vector<int>> outgoing;
  std::vector<Directed> dirs;
  for (int e : bedges) {
    const auto& ed = edges_[e];
    const bool left_in = ed.face_left >= 0 && in[ed.face_left];
    Directed d;
    d.edge = e;
    if (left_in) {
      d.a = ed.a, d.b = ed.b, d.out_dir = +1;
    } else {
      d.a = ed.b, d.b = ed.a, d.out_dir = -1;
    }
    outgoing[key_of(d.a)].push_back(static_cast<int>(dirs.size()));
    dirs.push_back(d);
  }
  for (auto& [k, list] : outgoing) {
    std::sort(list.begin(), list.end(), [&](int i, int j) {
      const Vec2 d1 = dirs[i].b - dirs[i].a, d2 = dirs[j].b - dirs[j].a;
      const double a1 = std::atan2(d1.y, d1.x), a2 = std::atan2(d2.y, d2.x);
      if (a1 != a2) return a1 < a2;
      return i < j;
    });
  }

  auto pick_provenance = [&](const Directed& d) {
    const auto& contribs = edges_[d.edge].contributions;
    EdgeProvenance best;
    bool have = false;
    for (const auto& c : contribs) {
      EdgeProvenance cand;
      cand.source = c.prov.source;
      cand.orientation =
          static_cast<std::int8_t>(d.out_dir * c.dir * c.prov.orientation);
      if (!have || static_cast<int>(cand.source) < static_cast<int>(best.source) ||
          (cand.source == best.source && cand.orientation > best.orientation)) {
        best = cand;
        have = true;
      }
    }
    return best;
  };

  std::vector<bool> used(dirs.size(), false);
  std::vector<Ring> rings;
  for (size_t start = 0; start < dirs.size(); ++start) {
    if (used[start]) continue;
    Ring ring;
    int cur = static_cast<int>(start);
    while (true) {
      if (used[cur]) {
        if (cur != static_cast<int>(start))
          throw GeometryError("boundary tracing merged into another ring");
        break;
      }
      used[cur] = true;
      ring.pts.push_back(dirs[cur].a);
      ring.prov.push_back(pick_provenance(dirs[cur]));
      // continue from the head: pick the boundary edge clockwise-adjacent to
      // the reversed direction (same rule as face tracing)
      const VKey hk = key_of(dirs[cur].b);
      auto it = outgoing.find(hk);
      if (it == outgoing.end())
        throw GeometryError("boundary tracing left the edge set");
      const auto& list = it->second;
      const Vec2 back = dirs[cur].a - dirs[cur].b;
      const double back_angle = std::atan2(back.y, back.x);
      // find the largest angle strictly below back_angle, wrapping around
      int next = -1;
      double best = -std::numeric_limits<double>::max();
      int wrap = -1;
      double wrap_best = -std::numeric_limits<double>::max();
      for (int cand : list) {
        const Vec2 d = dirs[cand].b - dirs[cand].a;
        const double ang = std::atan2(d.y, d.x);
        if (ang < back_angle && ang > best) {
          best = ang;
          next = cand;
        }
        if (ang > wrap_best) {
          wrap_best = ang;
          wrap = cand;
        }
      }
      if (next < 0) next = wrap;
      if (next < 0) throw GeometryError("boundary tracing dead end");
      cur = next;
    }
    // rotate so the ring starts at its lexicographically smallest vertex
    size_t min_idx = 0;
    for (size_t k = 1; k < ring.pts.size(); ++k)
      if (key_of(ring.pts[k]) < key_of(ring.pts[min_idx])) min_idx = k;
    std::rotate(ring.pts.begin(), ring.pts.begin() + min_idx, ring.pts.end());
    std::rotate(ring.prov.begin(), ring.prov.begin() + min_idx, ring.prov.end());
    rings.push_back(std::move(ring));
  }
  std::sort(rings.begin(), rings.end(), [](const Ring& l, const Ring& r) {
    const VKey kl = key_of(l.pts.front()), kr = key_of(r.pts.front());
    if (!(kl == kr)) return kl < kr;
    if (l.pts.size() != r.pts.size()) return l.pts.size() < r.pts.size();
    return key_of(l.pts[1]) < key_of(r.pts[1]);
  });
  out.rings = std::move(rings);
  return out;
}

}  // namespace siglab
