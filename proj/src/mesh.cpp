#include "mazecap/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mazecap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kWeldTol = 1e-9;

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).cross(c - a);
}

inline std::uint64_t ekey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

// point dedup on a quantized grid, tolerance kWeldTol
struct Welder {
    std::vector<Vec2>& pts;
    std::unordered_map<std::uint64_t, std::vector<int>> grid;

    explicit Welder(std::vector<Vec2>& p) : pts(p) {}

    static std::uint64_t cell(long long qx, long long qy) {
        return static_cast<std::uint64_t>(qx) * 0x9E3779B97F4A7C15ull ^
               static_cast<std::uint64_t>(qy) * 0xC2B2AE3D27D4EB4Full;
    }

    int add(const Vec2& p) {
        const long long qx = llround(p.x / kWeldTol), qy = llround(p.y / kWeldTol);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(cell(qx + dx, qy + dy));
                if (it == grid.end()) continue;
                for (int id : it->second)
                    if (pts[id].dist(p) <= kWeldTol) return id;
            }
        const int id = static_cast<int>(pts.size());
        pts.push_back(p);
        grid[cell(qx, qy)].push_back(id);
        return id;
    }
};

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > p.y) != (b.y > p.y) &&
            p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
            in = !in;
    }
    return in;
}

// parameter of q on the primitive, or -1 if q is not on it
double param_on(const ArcSegment& seg, const Vec2& q, double tol) {
    if (!seg.is_arc()) {
        const Vec2 d = seg.p1 - seg.p0;
        const double L2 = d.norm2();
        if (L2 <= 0.0) return -1.0;
        const double t = (q - seg.p0).dot(d) / L2;
        if (t < -1e-9 || t > 1.0 + 1e-9) return -1.0;
        return (seg.p0 + d * t).dist(q) <= tol ? t : -1.0;
    }
    const Vec2 r = q - seg.center;
    if (std::abs(r.norm() - seg.radius) > tol) return -1.0;
    const double s = seg.sweep();
    if (s == 0.0) return -1.0;
    const double ang = std::atan2(r.y, r.x);
    for (int k = -2; k <= 2; ++k) {
        const double t = (ang + 2.0 * kPi * k - seg.angle_start) / s;
        if (t >= -1e-9 && t <= 1.0 + 1e-9 &&
            seg.at(std::clamp(t, 0.0, 1.0)).dist(q) <= tol)
            return t;
    }
    return -1.0;
}

double tri_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * orient(a, b, c);
}

double min_angle_deg2(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double m = std::min(
        {std::acos(std::clamp(((b - a).dot(c - a)) / (lc * lb), -1.0, 1.0)),
         std::acos(std::clamp(((a - b).dot(c - b)) / (lc * la), -1.0, 1.0)),
         std::acos(std::clamp(((a - c).dot(b - c)) / (lb * la), -1.0, 1.0))});
    return m * 180.0 / kPi;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    return {(a.norm2() * (b.y - c.y) + b.norm2() * (c.y - a.y) +
             c.norm2() * (a.y - b.y)) /
                d,
            (a.norm2() * (c.x - b.x) + b.norm2() * (a.x - c.x) +
             c.norm2() * (b.x - a.x)) /
                d};
}

double incircle_det(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double A = a.x - d.x, B = a.y - d.y, C = A * A + B * B;
    const double D = b.x - d.x, E = b.y - d.y, F = D * D + E * E;
    const double G = c.x - d.x, H = c.y - d.y, I = G * G + H * H;
    return A * (E * I - F * H) - B * (D * I - F * G) + C * (D * H - E * G);
}

// ===== incremental constrained Delaunay kernel =====
//
// Flip-based: points split the containing triangle (or edge) and are
// legalized with Lawson flips; constraint edges are recovered by flipping
// the edges that cross them. Flips never cross constrained edges, so region
// labels (outside / hole / domain) stay valid under every operation once
// computed; freshly created patches are relabeled from stable neighbors.

struct CInfo {
    EdgeTag tag = EdgeTag::Outer;
    int prim = -1;
    double ta = 0.0, tb = 0.0;  // params at the smaller / larger vertex index
    int depth = 0;              // split generations (cascade brake)
};

enum Region : int { kUnknown = 0, kOutside = 1, kHole = 2, kDomain = 3 };

struct DT {
    std::vector<Vec2> pts;
    std::vector<int> vtri;  // some alive triangle containing the vertex
    struct T {
        int v[3];  // ccw
        int n[3];  // neighbor opposite v[i], -1 if none
        int region = kUnknown;
        bool alive = true;
    };
    std::vector<T> tris;  // append-only; ids are stable
    std::unordered_map<std::uint64_t, CInfo> cons;
    int hint = 0;
    bool labeled = false;

    int nv() const { return static_cast<int>(pts.size()); }

    int add_point(const Vec2& p) {
        pts.push_back(p);
        vtri.push_back(-1);
        return nv() - 1;
    }

    int add_tri(int v0, int v1, int v2, int n0, int n1, int n2, int region) {
        const int id = static_cast<int>(tris.size());
        tris.push_back({{v0, v1, v2}, {n0, n1, n2}, region, true});
        vtri[v0] = vtri[v1] = vtri[v2] = id;
        return id;
    }

    void init_box(const Vec2& lo, const Vec2& hi) {
        const double d = std::max({hi.x - lo.x, hi.y - lo.y, 1.0}) * 4.0;
        add_point({lo.x - d, lo.y - d});
        add_point({hi.x + d, lo.y - d});
        add_point({hi.x + d, hi.y + d});
        add_point({lo.x - d, hi.y + d});
        add_tri(0, 1, 2, -1, 1, -1, kUnknown);
        add_tri(0, 2, 3, -1, -1, 0, kUnknown);
        hint = 0;
    }

    static double eps_or(const Vec2& a, const Vec2& b, const Vec2& c) {
        return 1e-13 * std::max({a.norm2(), b.norm2(), c.norm2(), 1.0});
    }

    int edge_index(const T& t, int a, int b) const {
        for (int i = 0; i < 3; ++i)
            if ((t.v[(i + 1) % 3] == a && t.v[(i + 2) % 3] == b) ||
                (t.v[(i + 1) % 3] == b && t.v[(i + 2) % 3] == a))
                return i;
        return -1;
    }

    int corner_index(const T& t, int v) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        return -1;
    }

    void set_neighbor(int tid, int a, int b, int nb) {
        if (tid < 0) return;
        const int i = edge_index(tris[tid], a, b);
        if (i >= 0) tris[tid].n[i] = nb;
    }

    int opposite_in(int t, int a, int b) const {
        const int i = edge_index(tris[t], a, b);
        if (i < 0) throw std::runtime_error("mesh: broken adjacency");
        return i;
    }

    // visit all alive triangles around vertex v
    template <class F>
    void for_star(int v, F&& f) const {
        const int t0 = vtri[v];
        if (t0 < 0 || !tris[t0].alive)
            throw std::runtime_error("mesh: stale vertex incidence");
        int t = t0;
        int guard = 0;
        while (true) {
            if (++guard > 1000000) throw std::runtime_error("mesh: star walk stalled");
            f(t);
            const int k = corner_index(tris[t], v);
            const int nxt = tris[t].n[(k + 2) % 3];
            if (nxt == t0) return;
            if (nxt < 0) break;
            t = nxt;
        }
        // open fan (box boundary): also rotate the other way from t0
        int s = t0;
        while (true) {
            if (++guard > 1000000) throw std::runtime_error("mesh: star walk stalled");
            const int k2 = corner_index(tris[s], v);
            const int prv = tris[s].n[(k2 + 1) % 3];
            if (prv < 0) return;
            f(prv);
            s = prv;
        }
    }

    bool edge_exists(int a, int b) const {
        bool found = false;
        for_star(a, [&](int t) {
            if (corner_index(tris[t], b) >= 0) found = true;
        });
        return found;
    }

    // p inside or on triangle t: classify against its edges. on_edge gets
    // the local edge index when p lies on an edge, -1 when interior, -2
    // when p duplicates vertex dup
    void classify_in(int t, const Vec2& p, int& on_edge, int& dup) const {
        const T& tr = tris[t];
        for (int i = 0; i < 3; ++i)
            if (pts[tr.v[i]].dist(p) <= kWeldTol) {
                dup = tr.v[i];
                on_edge = -2;
                return;
            }
        on_edge = -1;
        for (int i = 0; i < 3; ++i) {
            const Vec2& a = pts[tr.v[(i + 1) % 3]];
            const Vec2& b = pts[tr.v[(i + 2) % 3]];
            if (std::abs(orient(a, b, p)) <= eps_or(a, b, p)) on_edge = i;
        }
    }

    bool contains(int t, const Vec2& p) const {
        for (int i = 0; i < 3; ++i) {
            const Vec2& a = pts[tris[t].v[(i + 1) % 3]];
            const Vec2& b = pts[tris[t].v[(i + 2) % 3]];
            if (orient(a, b, p) < -eps_or(a, b, p)) return false;
        }
        return true;
    }

    // remembering orientation walk with a linear-scan fallback for the rare
    // cases where float wobble makes the walk cycle near slivers
    int locate(const Vec2& p, int& on_edge, int& dup) {
        int t = hint;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) {
            t = -1;
            for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
                if (tris[i].alive) {
                    t = i;
                    break;
                }
            if (t < 0) throw std::runtime_error("mesh: empty triangulation");
        }
        const int cap = static_cast<int>(tris.size()) + 64;
        int from = -1;
        for (int step = 0; step < cap; ++step) {
            const T& tr = tris[t];
            int next = -1, back = -1;
            for (int i = 0; i < 3; ++i) {
                const Vec2& a = pts[tr.v[(i + 1) % 3]];
                const Vec2& b = pts[tr.v[(i + 2) % 3]];
                if (orient(a, b, p) < -eps_or(a, b, p)) {
                    if (tr.n[i] == from)
                        back = i;
                    else if (next < 0)
                        next = i;
                }
            }
            if (next < 0 && back >= 0) next = back;
            if (next >= 0 && tr.n[next] >= 0) {
                from = t;
                t = tr.n[next];
                continue;
            }
            if (next >= 0) break;  // hull edge in the way: fall back to a scan
            classify_in(t, p, on_edge, dup);
            hint = t;
            return t;
        }
        for (int i = static_cast<int>(tris.size()) - 1; i >= 0; --i)
            if (tris[i].alive && contains(i, p)) {
                classify_in(i, p, on_edge, dup);
                hint = i;
                return i;
            }
        throw std::runtime_error("mesh: point location failed");
    }

    bool should_flip(int t, int i) const {
        const int nb = tris[t].n[i];
        if (nb < 0) return false;
        const int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        if (cons.count(ekey(a, b))) return false;
        const int j = opposite_in(nb, a, b);
        const Vec2& x = pts[tris[nb].v[j]];
        const double det =
            incircle_det(pts[tris[t].v[0]], pts[tris[t].v[1]], pts[tris[t].v[2]], x);
        const double s = std::max(
            {(pts[tris[t].v[0]] - x).norm2(), (pts[tris[t].v[1]] - x).norm2(),
             (pts[tris[t].v[2]] - x).norm2(), 1e-30});
        return det > 1e-12 * s * s;
    }

    // flip the edge opposite corner i of triangle t; each returned triangle
    // has its re-test edge at local index 0
    std::pair<int, int> flip(int t, int i) {
        const int nb = tris[t].n[i];
        const int w = tris[t].v[i];
        const int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        const int j = opposite_in(nb, a, b);
        const int x = tris[nb].v[j];
        const int region = tris[t].region;  // both sides equal across unconstrained
        const int n_wa = tris[t].n[(i + 2) % 3], n_bw = tris[t].n[(i + 1) % 3];
        const int n_ax = tris[nb].n[(j + 1) % 3], n_xb = tris[nb].n[(j + 2) % 3];
        tris[t].alive = tris[nb].alive = false;
        const int base = static_cast<int>(tris.size());
        add_tri(w, a, x, n_ax, base + 1, n_wa, region);
        add_tri(w, x, b, n_xb, n_bw, base, region);
        set_neighbor(n_wa, w, a, base);
        set_neighbor(n_ax, a, x, base);
        set_neighbor(n_xb, x, b, base + 1);
        set_neighbor(n_bw, b, w, base + 1);
        hint = base;
        return {base, base + 1};
    }

    void legalize(std::vector<std::pair<int, int>>& stack) {
        int guard = 0;
        while (!stack.empty()) {
            if (++guard > 2000000) throw std::runtime_error("mesh: flip cascade");
            auto [t, i] = stack.back();
            stack.pop_back();
            if (t < 0 || !tris[t].alive) continue;
            if (!should_flip(t, i)) continue;
            auto [t1, t2] = flip(t, i);
            stack.push_back({t1, 0});
            stack.push_back({t2, 0});
        }
    }

    void add_con(int a, int b, EdgeTag tag, int prim, double ta, double tb, int depth) {
        CInfo ci;
        ci.tag = tag;
        ci.prim = prim;
        ci.depth = depth;
        if (a < b) {
            ci.ta = ta;
            ci.tb = tb;
        } else {
            ci.ta = tb;
            ci.tb = ta;
        }
        cons[ekey(a, b)] = ci;
    }

    // insert p; returns the vertex id (existing id if p duplicates a vertex).
    // If p lands on a constrained edge: with hit != nullptr the edge key is
    // reported and -1 returned; otherwise the constraint is split at p.
    int insert_point(const Vec2& p, std::uint64_t* hit = nullptr) {
        int on_edge = -1, dup = -1;
        const int t = locate(p, on_edge, dup);
        return finish_insert(t, p, on_edge, dup, hit);
    }

    // insert p known to lie inside or on triangle t0 (walk-free); returns -2
    // if p turns out not to be in t0 after all
    int insert_point_at(int t0, const Vec2& p, std::uint64_t* hit = nullptr) {
        if (!contains(t0, p)) return -2;
        int on_edge = -1, dup = -1;
        classify_in(t0, p, on_edge, dup);
        return finish_insert(t0, p, on_edge, dup, hit);
    }

    int finish_insert(int t, const Vec2& p, int on_edge, int dup, std::uint64_t* hit) {
        if (on_edge == -2) return dup;
        std::vector<std::pair<int, int>> stack;
        int w;
        if (on_edge < 0) {
            w = split_tri(t, p, stack);
        } else {
            const int a = tris[t].v[(on_edge + 1) % 3];
            const int b = tris[t].v[(on_edge + 2) % 3];
            const auto key = ekey(a, b);
            const auto it = cons.find(key);
            if (it != cons.end()) {
                if (hit) {
                    *hit = key;
                    return -1;
                }
                const CInfo info = it->second;
                cons.erase(it);
                w = split_edge(t, on_edge, p, stack);
                const int lo = std::min(a, b), hi2 = std::max(a, b);
                const double frac =
                    pts[lo].dist(p) / std::max(pts[lo].dist(pts[hi2]), 1e-300);
                const double tm = info.ta + frac * (info.tb - info.ta);
                add_con(lo, w, info.tag, info.prim, info.ta, tm, info.depth + 1);
                add_con(w, hi2, info.tag, info.prim, tm, info.tb, info.depth + 1);
            } else {
                w = split_edge(t, on_edge, p, stack);
            }
        }
        legalize(stack);
        return w;
    }

    int split_tri(int t, const Vec2& p, std::vector<std::pair<int, int>>& stack) {
        const int w = add_point(p);
        const int a = tris[t].v[0], b = tris[t].v[1], c = tris[t].v[2];
        const int na = tris[t].n[0], nb = tris[t].n[1], nc = tris[t].n[2];
        const int region = tris[t].region;
        tris[t].alive = false;
        const int base = static_cast<int>(tris.size());
        add_tri(a, b, w, base + 1, base + 2, nc, region);
        add_tri(b, c, w, base + 2, base, na, region);
        add_tri(c, a, w, base, base + 1, nb, region);
        set_neighbor(nc, a, b, base);
        set_neighbor(na, b, c, base + 1);
        set_neighbor(nb, c, a, base + 2);
        stack.push_back({base, 2});
        stack.push_back({base + 1, 2});
        stack.push_back({base + 2, 2});
        hint = base;
        return w;
    }

    // split (unconstrained) edge i of t at p
    int split_edge(int t, int i, const Vec2& p, std::vector<std::pair<int, int>>& stack) {
        const int nb = tris[t].n[i];
        const int w = add_point(p);
        const int c1 = tris[t].v[i];
        const int a = tris[t].v[(i + 1) % 3], b = tris[t].v[(i + 2) % 3];
        const int r1 = tris[t].region;
        const int n_c1a = tris[t].n[(i + 2) % 3];
        const int n_bc1 = tris[t].n[(i + 1) % 3];
        tris[t].alive = false;
        const int t0 = static_cast<int>(tris.size());
        add_tri(c1, a, w, -1, t0 + 1, n_c1a, r1);
        add_tri(c1, w, b, -1, n_bc1, t0, r1);
        set_neighbor(n_c1a, c1, a, t0);
        set_neighbor(n_bc1, b, c1, t0 + 1);
        stack.push_back({t0, 2});
        stack.push_back({t0 + 1, 1});
        if (nb >= 0) {
            const int j = opposite_in(nb, a, b);
            const int c2 = tris[nb].v[j];
            const int r2 = tris[nb].region;
            const int n_ac2 = tris[nb].n[(j + 1) % 3];
            const int n_c2b = tris[nb].n[(j + 2) % 3];
            tris[nb].alive = false;
            const int t2 = static_cast<int>(tris.size());
            add_tri(a, c2, w, t2 + 1, t0, n_ac2, r2);
            add_tri(c2, b, w, t0 + 1, t2, n_c2b, r2);
            set_neighbor(n_ac2, a, c2, t2);
            set_neighbor(n_c2b, c2, b, t2 + 1);
            tris[t0].n[0] = t2;
            tris[t0 + 1].n[0] = t2 + 1;
            stack.push_back({t2, 2});
            stack.push_back({t2 + 1, 2});
        }
        hint = t0;
        return w;
    }

    // triangulate the pseudo-polygon left after digging the cavity: chain
    // runs from lo to hi strictly on the right of lo->hi, recursing on the
    // Delaunay apex. Triangles come out ccw as (lo, apex, hi).
    void fill_pocket(int lo, int hi, const std::vector<int>& chain,
                     std::vector<std::array<int, 3>>& out) {
        if (chain.empty()) return;
        std::size_t ci = 0;
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (incircle_det(pts[lo], pts[chain[ci]], pts[hi], pts[chain[i]]) > 0.0)
                ci = i;
        const std::vector<int> left(chain.begin(), chain.begin() + ci);
        const std::vector<int> right(chain.begin() + ci + 1, chain.end());
        fill_pocket(lo, chain[ci], left, out);
        fill_pocket(chain[ci], hi, right, out);
        out.push_back({lo, chain[ci], hi});
    }

    // force edge (a,b) into the triangulation and mark it constrained.
    // A vertex lying exactly on segment (a,b) splits the constraint there.
    // Missing edges are recovered by digging the crossed triangle strip and
    // retriangulating the two side pockets.
    void insert_constraint(int a, int b, EdgeTag tag, int prim, double ta, double tb,
                           int depth = 0) {
        if (a == b) throw std::invalid_argument("mesh: degenerate constraint");
        if (edge_exists(a, b)) {
            add_con(a, b, tag, prim, ta, tb, depth);
            return;
        }
        const Vec2 pa = pts[a];
        const Vec2 pb = pts[b];
        const double ab = pa.dist(pb);
        // a vertex in the star of a sitting on the segment splits it here;
        // on-segment vertices further along are found during the march
        int split_at = -1;
        for_star(a, [&](int t) {
            for (int i = 0; i < 3; ++i) {
                const int mm = tris[t].v[i];
                if (mm == a || mm == b || split_at >= 0) continue;
                const Vec2& pm = pts[mm];
                if (std::abs(orient(pa, pb, pm)) > 1e-12 * ab * ab) continue;
                const double s = (pm - pa).dot(pb - pa) / (ab * ab);
                if (s > 1e-12 && s < 1.0 - 1e-12) split_at = mm;
            }
        });
        if (split_at >= 0) {
            const double s = pa.dist(pts[split_at]) / ab;
            const double tm = ta + s * (tb - ta);
            insert_constraint(a, split_at, tag, prim, ta, tm, depth);
            insert_constraint(split_at, b, tag, prim, tm, tb, depth);
            return;
        }
        // wedge triangle at a whose far edge crosses a->b;
        // ccw triangle (a,u,v): u sits right of ray a->b, v left
        int ct = -1, ce = -1;
        for_star(a, [&](int t) {
            if (ct >= 0) return;
            const int k = corner_index(tris[t], a);
            const int u = tris[t].v[(k + 1) % 3], v = tris[t].v[(k + 2) % 3];
            if (orient(pa, pb, pts[u]) < 0.0 && orient(pa, pb, pts[v]) > 0.0 &&
                orient(pts[u], pts[v], pa) > 0.0 && orient(pts[u], pts[v], pb) < 0.0) {
                ct = t;
                ce = k;
            }
        });
        if (ct < 0) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "mesh: constraint walk failed at (%.17g,%.17g)->(%.17g,%.17g)",
                          pa.x, pa.y, pb.x, pb.y);
            throw std::runtime_error(buf);
        }
        // march the strip crossed by the segment, collecting both side chains
        std::vector<int> strip{ct};
        std::vector<int> lower{tris[ct].v[(ce + 1) % 3]};  // right of a->b
        std::vector<int> upper{tris[ct].v[(ce + 2) % 3]};  // left of a->b
        int t = ct, e = ce;
        int u = lower[0], v = upper[0];
        int march = 0;
        while (true) {
            if (++march > 200000)
                throw std::runtime_error("mesh: constraint march stalled");
            if (cons.count(ekey(u, v)))
                throw std::invalid_argument("mesh: crossing constraints");
            const int nb = tris[t].n[e];
            if (nb < 0) throw std::runtime_error("mesh: constraint escaped hull");
            const int j = opposite_in(nb, u, v);
            const int x = tris[nb].v[j];
            strip.push_back(nb);
            if (x == b) break;
            const double ox = orient(pa, pb, pts[x]);
            if (ox == 0.0) {
                // segment passes exactly through vertex x: split there
                // (nothing has been modified yet)
                const double s = pa.dist(pts[x]) / ab;
                const double tm = ta + s * (tb - ta);
                insert_constraint(a, x, tag, prim, ta, tm, depth);
                insert_constraint(x, b, tag, prim, tm, tb, depth);
                return;
            }
            t = nb;
            if (ox > 0.0) {
                upper.push_back(x);
                v = x;
            } else {
                lower.push_back(x);
                u = x;
            }
            e = edge_index(tris[t], u, v);
            if (e < 0) throw std::runtime_error("mesh: constraint march lost");
        }
        // outside adjacency across the cavity perimeter, then dig
        const int region = tris[ct].region;
        std::unordered_set<int> instrip(strip.begin(), strip.end());
        std::unordered_map<std::uint64_t, int> outside;
        for (int s : strip)
            for (int i = 0; i < 3; ++i) {
                const int nbi = tris[s].n[i];
                if (nbi >= 0 && instrip.count(nbi)) continue;
                outside[ekey(tris[s].v[(i + 1) % 3], tris[s].v[(i + 2) % 3])] = nbi;
            }
        for (int s : strip) tris[s].alive = false;

        std::vector<std::array<int, 3>> newt;
        fill_pocket(a, b, lower, newt);
        const std::vector<int> upper_rev(upper.rbegin(), upper.rend());
        fill_pocket(b, a, upper_rev, newt);

        const int base = static_cast<int>(tris.size());
        for (const auto& tv : newt) add_tri(tv[0], tv[1], tv[2], -1, -1, -1, region);
        // stitch: shared edges pair up inside the cavity, the rest attach to
        // the surviving perimeter neighbors
        std::unordered_map<std::uint64_t, std::pair<int, int>> half;
        for (int k = 0; k < static_cast<int>(newt.size()); ++k) {
            const int tid = base + k;
            for (int i = 0; i < 3; ++i) {
                const auto key = ekey(tris[tid].v[(i + 1) % 3], tris[tid].v[(i + 2) % 3]);
                const auto it = half.find(key);
                if (it == half.end()) {
                    half[key] = {tid, i};
                } else {
                    tris[tid].n[i] = it->second.first;
                    tris[it->second.first].n[it->second.second] = tid;
                }
            }
        }
        for (int k = 0; k < static_cast<int>(newt.size()); ++k) {
            const int tid = base + k;
            for (int i = 0; i < 3; ++i) {
                if (tris[tid].n[i] >= 0) continue;
                const int ea = tris[tid].v[(i + 1) % 3], eb = tris[tid].v[(i + 2) % 3];
                const auto it = outside.find(ekey(ea, eb));
                if (it == outside.end()) continue;
                tris[tid].n[i] = it->second;
                set_neighbor(it->second, ea, eb, tid);
            }
        }
        hint = base;
        add_con(a, b, tag, prim, ta, tb, depth);
        std::vector<std::pair<int, int>> restore;
        for (int k = 0; k < static_cast<int>(newt.size()); ++k)
            for (int i = 0; i < 3; ++i) restore.push_back({base + k, i});
        legalize(restore);
    }

    void classify(const std::vector<Vec2>& holes) {
        for (auto& t : tris)
            if (t.alive) t.region = kUnknown;
        // closed boundary loops separate nested regions: crossing an outer
        // loop toggles outside/domain, crossing a compact-region loop toggles
        // domain/hole. Wall and compact-curve slits are never crossed (both
        // sides are reachable around their ends).
        std::vector<int> queue;
        for (int t = 0; t < static_cast<int>(tris.size()); ++t)
            if (tris[t].alive &&
                (tris[t].v[0] < 4 || tris[t].v[1] < 4 || tris[t].v[2] < 4) &&
                tris[t].region == kUnknown) {
                tris[t].region = kOutside;
                queue.push_back(t);
            }
        while (!queue.empty()) {
            const int t = queue.back();
            queue.pop_back();
            const int label = tris[t].region;
            for (int i = 0; i < 3; ++i) {
                const int nb = tris[t].n[i];
                if (nb < 0 || !tris[nb].alive || tris[nb].region != kUnknown) continue;
                const int a2 = tris[t].v[(i + 1) % 3], b2 = tris[t].v[(i + 2) % 3];
                const auto it = cons.find(ekey(a2, b2));
                int next = label;
                if (it != cons.end()) {
                    switch (it->second.tag) {
                        case EdgeTag::Wall:
                        case EdgeTag::Compact: continue;
                        case EdgeTag::Outer:
                            next = (label == kOutside) ? kDomain : kOutside;
                            break;
                        case EdgeTag::CompactRegion:
                            next = (label == kHole) ? kDomain : kHole;
                            break;
                    }
                }
                tris[nb].region = next;
                queue.push_back(nb);
            }
        }
        // hole seeds back up any pocket the sweep could not reach
        for (const Vec2& h : holes) {
            int oe = -1, dup = -1;
            std::vector<int> seeds = {locate(h, oe, dup)};
            while (!seeds.empty()) {
                const int t = seeds.back();
                seeds.pop_back();
                if (t < 0 || !tris[t].alive || tris[t].region != kUnknown) continue;
                tris[t].region = kHole;
                for (int i = 0; i < 3; ++i) {
                    const int a2 = tris[t].v[(i + 1) % 3], b2 = tris[t].v[(i + 2) % 3];
                    if (cons.count(ekey(a2, b2))) continue;
                    seeds.push_back(tris[t].n[i]);
                }
            }
        }
        for (auto& t : tris)
            if (t.alive && t.region == kUnknown) t.region = kDomain;
        labeled = true;
    }

    // relabel triangles with id >= first by propagation across unconstrained
    // edges from stable neighbors (the region geometry shifts slightly when
    // boundary splits snap to the true curve)
    void relabel_from(int first) {
        if (!labeled) return;
        for (int t = first; t < static_cast<int>(tris.size()); ++t)
            if (tris[t].alive) tris[t].region = kUnknown;
        for (int round = 0; round < 64; ++round) {
            bool changed = false;
            for (int t = first; t < static_cast<int>(tris.size()); ++t) {
                if (!tris[t].alive || tris[t].region != kUnknown) continue;
                for (int i = 0; i < 3; ++i) {
                    const int a2 = tris[t].v[(i + 1) % 3], b2 = tris[t].v[(i + 2) % 3];
                    if (cons.count(ekey(a2, b2))) continue;
                    const int nb = tris[t].n[i];
                    if (nb >= 0 && tris[nb].alive && tris[nb].region != kUnknown) {
                        tris[t].region = tris[nb].region;
                        changed = true;
                        break;
                    }
                }
            }
            if (!changed) break;
        }
        for (int t = first; t < static_cast<int>(tris.size()); ++t)
            if (tris[t].alive && tris[t].region == kUnknown)
                tris[t].region =
                    (tris[t].v[0] < 4 || tris[t].v[1] < 4 || tris[t].v[2] < 4)
                        ? kOutside
                        : kDomain;
    }
};

}  // namespace

// ===== discretize_boundary =====

Pslg discretize_boundary(const CondenserSpec& spec, double chord_tol) {
    const ValidationReport v = validate_spec(spec);
    if (!v.valid)
        throw std::invalid_argument(
            "discretize_boundary: invalid spec: " +
            (v.errors.empty() ? std::string("unspecified") : v.errors.front()));
    if (!(chord_tol > 0.0) || chord_tol > 0.5 * v.clearance)
        throw std::invalid_argument(
            "discretize_boundary: chord_tol must be in (0, clearance/2]");

    Pslg out;
    Welder weld(out.points);

    // open chain endpoints may land mid-primitive on another chain (wall
    // roots on the outer boundary, radial ends on circles); force vertices
    // there so every junction is an exact PSLG vertex
    std::vector<Vec2> junctions;
    auto add_junctions = [&](const Chain& c) {
        if (c.closed || c.segments.empty()) return;
        junctions.push_back(c.start());
        junctions.push_back(c.end());
    };
    for (const Chain& c : spec.walls) add_junctions(c);
    // compact pieces may T into one another mid-piece, so every piece
    // endpoint is a junction candidate
    if (spec.compact.kind == CompactSet::Kind::Curve)
        for (const ArcSegment& s : spec.compact.curve.segments) {
            junctions.push_back(s.start());
            junctions.push_back(s.end());
        }
    // singular points must become mesh vertices (tangency cusps sit
    // mid-primitive on both touching circles)
    for (const SingularPoint& sp : singular_points(spec)) junctions.push_back(sp.p);

    auto discretize_chain = [&](const Chain& chain, EdgeTag tag,
                                std::vector<int>* loop_pts) {
        for (const ArcSegment& seg : chain.segments) {
            const int prim = static_cast<int>(out.prims.size());
            out.prims.push_back(seg);
            std::vector<double> cuts = {0.0, 1.0};
            for (const Vec2& q : junctions) {
                const double tq = param_on(seg, q, 10.0 * kGeomTol);
                if (tq > 1e-7 && tq < 1.0 - 1e-7) cuts.push_back(tq);
            }
            std::sort(cuts.begin(), cuts.end());
            int prev = weld.add(seg.at(0.0));
            if (loop_pts && loop_pts->empty()) loop_pts->push_back(prev);
            double tprev = 0.0;
            for (size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
                const double u = cuts[ci], w = cuts[ci + 1];
                int nsub = 1;
                if (seg.is_arc()) {
                    const double sweep = std::abs(seg.sweep()) * (w - u);
                    double dmax = kPi / 3.0;
                    if (chord_tol < seg.radius)
                        dmax = std::min(
                            dmax, 2.0 * std::acos(1.0 - chord_tol / seg.radius));
                    nsub = std::max(1, static_cast<int>(std::ceil(sweep / dmax)));
                }
                for (int i = 1; i <= nsub; ++i) {
                    const double t = u + (w - u) * i / nsub;
                    const int id = weld.add(seg.at(t));
                    if (id != prev) {
                        out.edges.push_back({prev, id, tag, prim, tprev, t});
                        if (loop_pts) loop_pts->push_back(id);
                    }
                    prev = id;
                    tprev = t;
                }
            }
        }
    };

    for (const Chain& c : spec.outer_loops) discretize_chain(c, EdgeTag::Outer, nullptr);
    for (const Chain& c : spec.walls) discretize_chain(c, EdgeTag::Wall, nullptr);
    if (spec.compact.kind == CompactSet::Kind::Curve) {
        if (!spec.compact.curve.segments.empty())
            discretize_chain(spec.compact.curve, EdgeTag::Compact, nullptr);
    } else {
        for (const Chain& loop : spec.compact.region) {
            std::vector<int> ids;
            discretize_chain(loop, EdgeTag::CompactRegion, &ids);
            std::vector<Vec2> poly;
            poly.reserve(ids.size());
            for (int id : ids) poly.push_back(out.points[id]);
            Vec2 seed{0.0, 0.0};
            for (const Vec2& p : poly) seed = seed + p;
            seed = seed / static_cast<double>(poly.size());
            if (!point_in_polygon(poly, seed)) {
                bool found = false;
                for (size_t i = 0; i < poly.size() && !found; ++i) {
                    const Vec2 cand = (seed + poly[i]) / 2.0;
                    if (point_in_polygon(poly, cand)) {
                        seed = cand;
                        found = true;
                    }
                }
                if (!found)
                    throw std::runtime_error(
                        "discretize_boundary: no interior seed for region loop");
            }
            out.holes.push_back(seed);
        }
    }
    return out;
}

// ===== triangulate =====

namespace {

struct Refiner {
    DT& dt;
    const std::vector<ArcSegment>& prims;
    double max_area;
    std::unordered_set<int> given_up;
    static constexpr int kBudget = 400000;
    static constexpr int kMaxDepth = 12;

    bool encroached(int a, int b) const {
        const Vec2& pa = dt.pts[a];
        const Vec2& pb = dt.pts[b];
        bool enc = false;
        dt.for_star(a, [&](int t) {
            if (enc) return;
            const int i = dt.edge_index(dt.tris[t], a, b);
            if (i < 0) return;
            const int w = dt.tris[t].v[i];
            if (w < 4) return;
            const Vec2& pw = dt.pts[w];
            if ((pa - pw).dot(pb - pw) < -1e-12 * (pa - pw).norm() * (pb - pw).norm())
                enc = true;
        });
        return enc;
    }

    void split_segment(std::uint64_t key, bool& progress) {
        const auto it = dt.cons.find(key);
        if (it == dt.cons.end()) return;
        const CInfo info = it->second;
        if (info.depth >= kMaxDepth) return;
        const int lo = static_cast<int>(key >> 32);
        const int hi = static_cast<int>(key & 0xffffffffu);
        const double tm = 0.5 * (info.ta + info.tb);
        Vec2 p;
        if (info.prim >= 0)
            p = prims[info.prim].at(tm);
        else
            p = (dt.pts[lo] + dt.pts[hi]) / 2.0;
        if (dt.nv() >= kBudget)
            throw std::runtime_error("triangulate: refinement budget exceeded");
        dt.cons.erase(key);
        // start the walk at a flank of the split edge (arc midpoints sit a
        // sagitta off the chord, nearly always inside a flank triangle)
        dt.for_star(lo, [&](int t) {
            if (dt.edge_index(dt.tris[t], lo, hi) >= 0) dt.hint = t;
        });
        const int first = static_cast<int>(dt.tris.size());
        const int w = dt.insert_point(p);
        if (w == lo || w == hi) {  // split point collapsed onto an endpoint
            dt.add_con(lo, hi, info.tag, info.prim, info.ta, info.tb, kMaxDepth);
            return;
        }
        dt.insert_constraint(lo, w, info.tag, info.prim, info.ta, tm, info.depth + 1);
        dt.insert_constraint(w, hi, info.tag, info.prim, tm, info.tb, info.depth + 1);
        dt.relabel_from(first);
        progress = true;
    }

    bool pass() {
        bool progress = false;
        std::vector<std::uint64_t> keys;
        keys.reserve(dt.cons.size());
        for (const auto& [k, ci] : dt.cons)
            if (ci.depth < kMaxDepth) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        for (const auto k : keys) {
            if (!dt.cons.count(k)) continue;
            const int a = static_cast<int>(k >> 32);
            const int b = static_cast<int>(k & 0xffffffffu);
            if (encroached(a, b)) split_segment(k, progress);
        }
        const int count = static_cast<int>(dt.tris.size());
        for (int t = 0; t < count; ++t) {
            if (!dt.tris[t].alive || dt.tris[t].region != kDomain) continue;
            if (given_up.count(t)) continue;
            const Vec2& a = dt.pts[dt.tris[t].v[0]];
            const Vec2& b = dt.pts[dt.tris[t].v[1]];
            const Vec2& c = dt.pts[dt.tris[t].v[2]];
            if (tri_area2(a, b, c) <= max_area && min_angle_deg2(a, b, c) >= 20.0)
                continue;
            if (dt.nv() >= kBudget)
                throw std::runtime_error("triangulate: refinement budget exceeded");
            const Vec2 cc = circumcenter(a, b, c);
            const Vec2 g = (a + b + c) / 3.0;
            // march toward the circumcenter; a constrained edge in the way
            // gets split instead (the center lies beyond the boundary)
            int cur = t;
            std::uint64_t blocked = 0;
            bool lost = false;
            for (int step = 0;; ++step) {
                if (step > 20000) {
                    lost = true;
                    break;
                }
                const DT::T& tr = dt.tris[cur];
                int exit_e = -1;
                for (int i = 0; i < 3; ++i) {
                    const Vec2& u = dt.pts[tr.v[(i + 1) % 3]];
                    const Vec2& vv = dt.pts[tr.v[(i + 2) % 3]];
                    if (orient(u, vv, cc) < 0.0 && orient(g, cc, u) >= 0.0 &&
                        orient(g, cc, vv) <= 0.0) {
                        exit_e = i;
                        break;
                    }
                }
                if (exit_e < 0) break;  // arrived
                const int u = tr.v[(exit_e + 1) % 3], vv = tr.v[(exit_e + 2) % 3];
                if (dt.cons.count(ekey(u, vv))) {
                    blocked = ekey(u, vv);
                    break;
                }
                const int nb = tr.n[exit_e];
                if (nb < 0) {
                    lost = true;
                    break;
                }
                cur = nb;
            }
            if (blocked) {
                if (dt.cons.count(blocked) && dt.cons.at(blocked).depth < kMaxDepth)
                    split_segment(blocked, progress);
                else
                    given_up.insert(t);
                continue;
            }
            if (lost) {
                given_up.insert(t);
                continue;
            }
            // a center that would encroach a segment must not go in: split
            // the segment instead, otherwise slivers cascade along it
            std::uint64_t enc = 0;
            for (const auto& [k2, ci2] : dt.cons) {
                const Vec2& pu = dt.pts[static_cast<int>(k2 >> 32)];
                const Vec2& pv = dt.pts[static_cast<int>(k2 & 0xffffffffu)];
                if ((pu - cc).dot(pv - cc) < 0.0) {
                    enc = k2;
                    break;
                }
            }
            if (enc) {
                if (dt.cons.at(enc).depth < kMaxDepth)
                    split_segment(enc, progress);
                else
                    given_up.insert(t);
                continue;
            }
            std::uint64_t hit = 0;
            const int before = dt.nv();
            const int w = dt.insert_point_at(cur, cc, &hit);
            if (w == -2) {
                given_up.insert(t);  // walk/arithmetic disagreement, leave it
                continue;
            }
            if (w < 0) {
                if (dt.cons.count(hit) && dt.cons.at(hit).depth < kMaxDepth)
                    split_segment(hit, progress);
                else
                    given_up.insert(t);
                continue;
            }
            if (dt.nv() == before) {
                given_up.insert(t);  // duplicate vertex, nothing to gain
                continue;
            }
            progress = true;
        }
        return progress;
    }
};

struct UnionFind {
    std::vector<int> p;
    int make() {
        p.push_back(static_cast<int>(p.size()));
        return static_cast<int>(p.size()) - 1;
    }
    int find(int s) {
        while (p[s] != s) s = p[s] = p[p[s]];
        return s;
    }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

Mesh triangulate(const Pslg& pslg, double max_area) {
    if (!(max_area > 0.0))
        throw std::invalid_argument("triangulate: max_area must be > 0");
    if (pslg.points.empty()) throw std::invalid_argument("triangulate: empty input");

    Vec2 lo = pslg.points.front(), hi = lo;
    for (const Vec2& p : pslg.points) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    DT dt;
    dt.init_box(lo, hi);

    std::vector<int> vid(pslg.points.size());
    for (size_t i = 0; i < pslg.points.size(); ++i)
        vid[i] = dt.insert_point(pslg.points[i]);
    for (const PslgEdge& e : pslg.edges)
        dt.insert_constraint(vid[e.a], vid[e.b], e.tag, e.prim, e.ta, e.tb);

    dt.classify(pslg.holes);

    Refiner rf{dt, pslg.prims, max_area, {}};
    for (int round = 0;; ++round) {
        if (round > 500) throw std::runtime_error("triangulate: refinement stalled");
        if (!rf.pass()) break;
    }

    // ----- extraction with slit cutting -----
    Mesh mesh;
    mesh.prims = pslg.prims;
    std::vector<int> domain_tris;
    for (int t = 0; t < static_cast<int>(dt.tris.size()); ++t)
        if (dt.tris[t].alive && dt.tris[t].region == kDomain) domain_tris.push_back(t);

    // fan components per vertex: incident domain triangles joined across
    // shared non-wall edges; wall edges separate the two slit sheets
    auto vt_key = [](int v, int t) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) |
               static_cast<std::uint32_t>(t);
    };
    UnionFind uf;
    std::unordered_map<std::uint64_t, int> slot;
    auto get_slot = [&](int v, int t) {
        const auto k = vt_key(v, t);
        auto it = slot.find(k);
        if (it != slot.end()) return it->second;
        const int s = uf.make();
        slot[k] = s;
        return s;
    };
    for (int t : domain_tris)
        for (int i = 0; i < 3; ++i) get_slot(dt.tris[t].v[i], t);
    for (int t : domain_tris) {
        for (int i = 0; i < 3; ++i) {
            const int nb = dt.tris[t].n[i];
            if (nb < 0 || !dt.tris[nb].alive || dt.tris[nb].region != kDomain) continue;
            const int a = dt.tris[t].v[(i + 1) % 3], b = dt.tris[t].v[(i + 2) % 3];
            const auto it = dt.cons.find(ekey(a, b));
            if (it != dt.cons.end() && it->second.tag == EdgeTag::Wall) continue;
            uf.unite(get_slot(a, t), get_slot(a, nb));
            uf.unite(get_slot(b, t), get_slot(b, nb));
        }
    }
    std::unordered_map<int, int> root_vertex;
    std::unordered_map<std::uint64_t, int> out_vertex;  // (v,t) -> mesh vertex
    // deterministic output numbering: vertices in domain-triangle order
    for (int t : domain_tris) {
        for (int i = 0; i < 3; ++i) {
            const int v2 = dt.tris[t].v[i];
            const int r = uf.find(slot.at(vt_key(v2, t)));
            auto it = root_vertex.find(r);
            int nvid;
            if (it == root_vertex.end()) {
                nvid = static_cast<int>(mesh.vertices.size());
                mesh.vertices.push_back(dt.pts[v2]);
                mesh.vtags.push_back(VertexTag::Interior);
                root_vertex[r] = nvid;
            } else {
                nvid = it->second;
            }
            out_vertex[vt_key(v2, t)] = nvid;
        }
    }

    std::unordered_set<std::uint64_t> emitted;
    for (int t : domain_tris) {
        std::array<int, 3> tv{};
        for (int i = 0; i < 3; ++i) tv[i] = out_vertex.at(vt_key(dt.tris[t].v[i], t));
        mesh.triangles.push_back(tv);
        for (int i = 0; i < 3; ++i) {
            const int a = dt.tris[t].v[(i + 1) % 3], b = dt.tris[t].v[(i + 2) % 3];
            const auto it = dt.cons.find(ekey(a, b));
            if (it == dt.cons.end()) continue;
            const int na = out_vertex.at(vt_key(a, t));
            const int nb2 = out_vertex.at(vt_key(b, t));
            if (!emitted.insert(ekey(na, nb2)).second) continue;
            const double pa = (a < b) ? it->second.ta : it->second.tb;
            const double pb = (a < b) ? it->second.tb : it->second.ta;
            MeshConstraint mc;
            mc.tag = it->second.tag;
            mc.prim = it->second.prim;
            if (na <= nb2) {
                mc.a = na;
                mc.b = nb2;
                mc.ta = pa;
                mc.tb = pb;
            } else {
                mc.a = nb2;
                mc.b = na;
                mc.ta = pb;
                mc.tb = pa;
            }
            mesh.constraints.push_back(mc);
            const bool dirichlet0 =
                it->second.tag == EdgeTag::Outer || it->second.tag == EdgeTag::Wall;
            mesh.vtags[na] = dirichlet0 ? VertexTag::Outer : VertexTag::Compact;
            mesh.vtags[nb2] = dirichlet0 ? VertexTag::Outer : VertexTag::Compact;
        }
    }
    mesh.refine_level = 0;
    return mesh;
}

// ===== mesh-level helpers =====

namespace {

struct ConMap {
    std::unordered_map<std::uint64_t, int> idx;
    explicit ConMap(const Mesh& m) {
        for (int i = 0; i < static_cast<int>(m.constraints.size()); ++i)
            idx[ekey(m.constraints[i].a, m.constraints[i].b)] = i;
    }
    const MeshConstraint* find(const Mesh& m, int a, int b) const {
        const auto it = idx.find(ekey(a, b));
        return it == idx.end() ? nullptr : &m.constraints[it->second];
    }
};

// Lawson sweep restoring the constrained Delaunay property on a Mesh; keeps
// order-1 stiffness matrices diagonally dominant (discrete maximum principle)
void delaunay_cleanup(Mesh& m) {
    std::unordered_set<std::uint64_t> constrained;
    for (const auto& c : m.constraints) constrained.insert(ekey(c.a, c.b));
    for (int pass = 0; pass < 100; ++pass) {
        std::unordered_map<std::uint64_t, std::array<int, 2>> edge_tris;
        for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
            for (int i = 0; i < 3; ++i) {
                const auto k =
                    ekey(m.triangles[t][(i + 1) % 3], m.triangles[t][(i + 2) % 3]);
                auto it = edge_tris.find(k);
                if (it == edge_tris.end())
                    edge_tris[k] = {t, -1};
                else
                    it->second[1] = t;
            }
        bool flipped = false;
        for (const auto& [k, ts] : edge_tris) {
            if (ts[1] < 0 || constrained.count(k)) continue;
            const int a = static_cast<int>(k >> 32);
            const int b = static_cast<int>(k & 0xffffffffu);
            auto has_edge = [&](int t) {
                int cnt = 0;
                for (int v : m.triangles[t])
                    if (v == a || v == b) ++cnt;
                return cnt == 2;
            };
            if (!has_edge(ts[0]) || !has_edge(ts[1])) continue;  // stale entry
            auto opp = [&](int t) {
                for (int v : m.triangles[t])
                    if (v != a && v != b) return v;
                return -1;
            };
            const int w = opp(ts[0]), x = opp(ts[1]);
            if (w < 0 || x < 0 || w == x) continue;
            const Vec2 &pa = m.vertices[a], &pb = m.vertices[b];
            const Vec2 &pw = m.vertices[w], &px = m.vertices[x];
            const double det = incircle_det(pa, pb, pw, px);
            const double s = std::max(
                {(pa - px).norm2(), (pb - px).norm2(), (pw - px).norm2(), 1e-30});
            const double viol = orient(pa, pb, pw) > 0.0 ? det : -det;
            if (viol <= 1e-12 * s * s) continue;
            if (orient(pw, px, pa) * orient(pw, px, pb) >= 0.0) continue;
            m.triangles[ts[0]] = orient(pw, px, pa) > 0.0
                                     ? std::array<int, 3>{w, x, a}
                                     : std::array<int, 3>{w, a, x};
            m.triangles[ts[1]] = orient(pw, px, pb) > 0.0
                                     ? std::array<int, 3>{w, x, b}
                                     : std::array<int, 3>{w, b, x};
            flipped = true;
        }
        if (!flipped) break;
    }
}

}  // namespace

// ===== refine_corners =====

Mesh refine_corners(const Mesh& mesh, const std::vector<Vec2>& corners, double q,
                    int levels) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("refine_corners: q must be in (0,1)");
    if (levels < 0) throw std::invalid_argument("refine_corners: levels must be >= 0");
    Mesh m = mesh;
    if (levels == 0 || corners.empty()) return m;

    std::vector<int> cids;  // slit roots may have several sheet copies
    for (const Vec2& c : corners)
        for (int v = 0; v < static_cast<int>(m.vertices.size()); ++v)
            if (m.vertices[v].dist(c) <= 1e-9) cids.push_back(v);
    if (cids.empty())
        throw std::invalid_argument("refine_corners: corner is not a mesh vertex");
    std::sort(cids.begin(), cids.end());
    cids.erase(std::unique(cids.begin(), cids.end()), cids.end());

    for (int level = 0; level < levels; ++level) {
        for (const int c : cids) {
            ConMap cm(m);
            std::vector<int> inc;
            for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
                if (m.triangles[t][0] == c || m.triangles[t][1] == c ||
                    m.triangles[t][2] == c)
                    inc.push_back(t);
            if (inc.empty()) continue;
            std::unordered_map<int, int> mid;  // ring vertex -> inserted vertex
            std::vector<MeshConstraint> new_cons;
            std::unordered_set<std::uint64_t> dropped;
            auto get_mid = [&](int v) {
                auto it = mid.find(v);
                if (it != mid.end()) return it->second;
                const MeshConstraint* con = cm.find(m, c, v);
                const int w = static_cast<int>(m.vertices.size());
                Vec2 p = m.vertices[c] + (m.vertices[v] - m.vertices[c]) * q;
                VertexTag tag = VertexTag::Interior;
                if (con) {
                    const double tc = (con->a == c) ? con->ta : con->tb;
                    const double tv = (con->a == c) ? con->tb : con->ta;
                    const double tm = tc + q * (tv - tc);
                    if (con->prim >= 0) p = m.prims[con->prim].at(tm);
                    MeshConstraint c1 = *con, c2 = *con;
                    c1.a = c;
                    c1.b = w;
                    c1.ta = tc;
                    c1.tb = tm;
                    c2.a = w;
                    c2.b = v;
                    c2.ta = tm;
                    c2.tb = tv;
                    new_cons.push_back(c1);
                    new_cons.push_back(c2);
                    dropped.insert(ekey(c, v));
                    tag = (con->tag == EdgeTag::Outer || con->tag == EdgeTag::Wall)
                              ? VertexTag::Outer
                              : VertexTag::Compact;
                }
                m.vertices.push_back(p);
                m.vtags.push_back(tag);
                mid[v] = w;
                return w;
            };
            for (const int t : inc) {
                std::array<int, 3> tv = m.triangles[t];
                int ci = 0;
                while (tv[ci] != c) ++ci;
                const int a = tv[(ci + 1) % 3], b = tv[(ci + 2) % 3];
                const int ma = get_mid(a), mb = get_mid(b);
                m.triangles[t] = {c, ma, mb};
                m.triangles.push_back({ma, a, b});
                m.triangles.push_back({ma, b, mb});
            }
            if (!dropped.empty() || !new_cons.empty()) {
                std::vector<MeshConstraint> kept;
                kept.reserve(m.constraints.size() + new_cons.size());
                for (const auto& con : m.constraints)
                    if (!dropped.count(ekey(con.a, con.b))) kept.push_back(con);
                for (auto& con : new_cons) {
                    if (con.a > con.b) {
                        std::swap(con.a, con.b);
                        std::swap(con.ta, con.tb);
                    }
                    kept.push_back(con);
                }
                m.constraints = std::move(kept);
            }
        }
    }
    delaunay_cleanup(m);
    return m;
}

// ===== refine_uniform =====

Mesh refine_uniform(const Mesh& mesh) {
    Mesh m;
    m.prims = mesh.prims;
    m.vertices = mesh.vertices;
    m.vtags = mesh.vtags;
    m.refine_level = mesh.refine_level + 1;

    ConMap cm(mesh);
    std::unordered_map<std::uint64_t, int> midpoint;
    auto get_mid = [&](int a, int b) {
        const auto k = ekey(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        const MeshConstraint* con = cm.find(mesh, a, b);
        Vec2 p;
        VertexTag tag = VertexTag::Interior;
        if (con && con->prim >= 0)
            p = mesh.prims[con->prim].at(0.5 * (con->ta + con->tb));
        else
            p = (mesh.vertices[a] + mesh.vertices[b]) / 2.0;
        if (con)
            tag = (con->tag == EdgeTag::Outer || con->tag == EdgeTag::Wall)
                      ? VertexTag::Outer
                      : VertexTag::Compact;
        const int w = static_cast<int>(m.vertices.size());
        m.vertices.push_back(p);
        m.vtags.push_back(tag);
        midpoint[k] = w;
        return w;
    };

    for (const auto& t : mesh.triangles) {
        const int ab = get_mid(t[0], t[1]);
        const int bc = get_mid(t[1], t[2]);
        const int ca = get_mid(t[2], t[0]);
        m.triangles.push_back({t[0], ab, ca});
        m.triangles.push_back({t[1], bc, ab});
        m.triangles.push_back({t[2], ca, bc});
        m.triangles.push_back({ab, bc, ca});
    }
    for (const auto& con : mesh.constraints) {
        const int w = get_mid(con.a, con.b);
        const double tm = 0.5 * (con.ta + con.tb);
        MeshConstraint c1 = con, c2 = con;
        c1.b = w;
        c1.tb = tm;
        c2.a = w;
        c2.ta = tm;
        for (auto* c : {&c1, &c2}) {
            if (c->a > c->b) {
                std::swap(c->a, c->b);
                std::swap(c->ta, c->tb);
            }
            m.constraints.push_back(*c);
        }
    }
    return m;
}

// ===== checks =====

double triangle_area(const Mesh& mesh, int t) {
    const auto& tr = mesh.triangles[t];
    return tri_area2(mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]);
}

double triangle_min_angle_deg(const Mesh& mesh, int t) {
    const auto& tr = mesh.triangles[t];
    return min_angle_deg2(mesh.vertices[tr[0]], mesh.vertices[tr[1]],
                          mesh.vertices[tr[2]]);
}

std::vector<std::string> check_mesh(const Mesh& mesh) {
    std::vector<std::string> errs;
    const int nv = static_cast<int>(mesh.vertices.size());
    if (mesh.vtags.size() != mesh.vertices.size())
        errs.push_back("vertex tag array size mismatch");
    std::unordered_map<std::uint64_t, int> edge_use;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tr = mesh.triangles[t];
        bool bad_idx = false;
        for (int i = 0; i < 3; ++i)
            if (tr[i] < 0 || tr[i] >= nv) bad_idx = true;
        if (bad_idx) {
            errs.push_back("triangle " + std::to_string(t) + ": index out of range");
            continue;
        }
        if (!(triangle_area(mesh, t) > 0.0))
            errs.push_back("triangle " + std::to_string(t) +
                           ": nonpositive or degenerate area");
        for (int i = 0; i < 3; ++i) ++edge_use[ekey(tr[i], tr[(i + 1) % 3])];
    }
    std::unordered_set<std::uint64_t> constrained;
    for (const auto& c : mesh.constraints) {
        if (c.a < 0 || c.a >= nv || c.b < 0 || c.b >= nv) {
            errs.push_back("constraint index out of range");
            continue;
        }
        constrained.insert(ekey(c.a, c.b));
        if (!edge_use.count(ekey(c.a, c.b)))
            errs.push_back("constraint edge is not a mesh edge");
    }
    for (const auto& [k, uses] : edge_use) {
        if (uses > 2)
            errs.push_back("edge shared by more than two triangles");
        else if (uses == 1 && !constrained.count(k))
            errs.push_back("boundary edge without constraint (crack)");
    }
    return errs;
}

// ===== IO =====

namespace {

const char* vtag_word(VertexTag t) {
    switch (t) {
        case VertexTag::Interior: return "interior";
        case VertexTag::Outer: return "outer";
        case VertexTag::Compact: return "compact";
    }
    return "interior";
}

const char* etag_word(EdgeTag t) {
    switch (t) {
        case EdgeTag::Outer: return "outer";
        case EdgeTag::Wall: return "wall";
        case EdgeTag::Compact:
        case EdgeTag::CompactRegion: return "compact";
    }
    return "outer";
}

}  // namespace

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
    out << "mazecap-mesh 1\n";
    out << mesh.vertices.size() << ' ' << mesh.triangles.size() << ' '
        << mesh.constraints.size() << ' ' << mesh.refine_level << '\n';
    char buf[80];
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g", mesh.vertices[i].x,
                      mesh.vertices[i].y);
        out << buf << ' ' << vtag_word(mesh.vtags[i]) << '\n';
    }
    for (const auto& t : mesh.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& c : mesh.constraints)
        out << c.a << ' ' << c.b << ' ' << etag_word(c.tag) << '\n';
    if (!out) throw std::runtime_error("save_mesh: write failed");
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "mazecap-mesh" || version != 1)
        throw std::runtime_error("load_mesh: unsupported format");
    size_t nv = 0, nt = 0, nc = 0;
    int level = 0;
    in >> nv >> nt >> nc >> level;
    Mesh m;
    m.refine_level = level;
    m.vertices.resize(nv);
    m.vtags.resize(nv);
    for (size_t i = 0; i < nv; ++i) {
        std::string w;
        in >> m.vertices[i].x >> m.vertices[i].y >> w;
        if (w == "interior")
            m.vtags[i] = VertexTag::Interior;
        else if (w == "outer")
            m.vtags[i] = VertexTag::Outer;
        else if (w == "compact")
            m.vtags[i] = VertexTag::Compact;
        else
            throw std::runtime_error("load_mesh: bad vertex tag");
    }
    m.triangles.resize(nt);
    for (size_t i = 0; i < nt; ++i)
        in >> m.triangles[i][0] >> m.triangles[i][1] >> m.triangles[i][2];
    m.constraints.resize(nc);
    for (size_t i = 0; i < nc; ++i) {
        std::string w;
        in >> m.constraints[i].a >> m.constraints[i].b >> w;
        if (w == "outer")
            m.constraints[i].tag = EdgeTag::Outer;
        else if (w == "wall")
            m.constraints[i].tag = EdgeTag::Wall;
        else if (w == "compact")
            m.constraints[i].tag = EdgeTag::Compact;
        else
            throw std::runtime_error("load_mesh: bad edge tag");
        m.constraints[i].prim = -1;
    }
    if (!in) throw std::runtime_error("load_mesh: truncated file");
    return m;
}

}  // namespace mazecap
