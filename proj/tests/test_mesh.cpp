#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mazecap/geometry.hpp"
#include "mazecap/mesh.hpp"

using namespace mazecap;

namespace {

constexpr double kPi = std::numbers::pi;

CondenserSpec square_with_slit() {
    CondenserSpec s;
    s.family = Family::Custom;
    s.custom_name = "square_slit";
    Chain outer;
    outer.closed = true;
    outer.segments = {
        ArcSegment::segment({0.0, 0.0}, {1.0, 0.0}),
        ArcSegment::segment({1.0, 0.0}, {1.0, 1.0}),
        ArcSegment::segment({1.0, 1.0}, {0.0, 1.0}),
        ArcSegment::segment({0.0, 1.0}, {0.0, 0.0}),
    };
    s.outer_loops = {outer};
    s.compact.kind = CompactSet::Kind::Curve;
    s.compact.curve.closed = false;
    s.compact.curve.segments = {ArcSegment::segment({0.4, 0.5}, {0.6, 0.5})};
    return s;
}

// Euler characteristic of the mesh as a simplicial complex
int euler_char(const Mesh& m) {
    std::set<std::uint64_t> edges;
    for (const auto& t : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            std::uint64_t a = t[i], b = t[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert((a << 32) | b);
        }
    }
    return static_cast<int>(m.vertices.size()) - static_cast<int>(edges.size()) +
           static_cast<int>(m.triangles.size());
}

double mesh_area(const Mesh& m) {
    double s = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) s += triangle_area(m, t);
    return s;
}

// vertex ids within tol of p
std::vector<int> vertices_at(const Mesh& m, const Vec2& p, double tol = 1e-9) {
    std::vector<int> out;
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        if (m.vertices[i].dist(p) <= tol) out.push_back(static_cast<int>(i));
    return out;
}

Mesh default_mesh(const CondenserSpec& spec) {
    ValidationReport rep = validate_spec(spec);
    REQUIRE(rep.valid);
    double d = rep.clearance;
    Pslg p = discretize_boundary(spec, d / 20.0);
    return triangulate(p, d * d / 3.0);
}

} // namespace

TEST_CASE("boundary discretization of straight mazes ignores chord tolerance") {
    CondenserSpec spec = build_square_maze(7);
    Pslg a = discretize_boundary(spec, 1e-3);
    Pslg b = discretize_boundary(spec, 1e-5);
    CHECK(a.points.size() == b.points.size());
    CHECK(a.edges.size() == b.edges.size());

    // wall roots sit on the outer square and must be welded into it:
    // each chain endpoint appears exactly once among the pslg points
    for (const Chain& w : spec.walls) {
        for (const Vec2& q : {w.start(), w.end()}) {
            int hits = 0;
            for (const Vec2& p : a.points)
                if (p.dist(q) <= 1e-9) ++hits;
            CHECK(hits == 1);
        }
    }

    CHECK_THROWS_AS(discretize_boundary(spec, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(discretize_boundary(spec, 0.0), std::invalid_argument);
}

TEST_CASE("arc discretization respects the sagitta bound") {
    CondenserSpec spec = build_circular_maze(5);
    double tol = 1e-3;
    Pslg p = discretize_boundary(spec, tol);
    int arcs = 0;
    for (const PslgEdge& e : p.edges) {
        const ArcSegment& prim = p.prims[e.prim];
        if (!prim.is_arc()) continue;
        ++arcs;
        Vec2 mid = (p.points[e.a] + p.points[e.b]) / 2.0;
        double d = mid.dist(prim.center);
        CHECK(d <= prim.radius + 1e-12);
        CHECK(d >= prim.radius - tol * 1.0001);
    }
    CHECK(arcs > 100);
}

TEST_CASE("region compact sets produce one hole seed per loop") {
    CondenserSpec spec = build_tangent_disks(6, 0.6, 0.06);
    ValidationReport rep = validate_spec(spec);
    REQUIRE(rep.valid);
    Pslg p = discretize_boundary(spec, 1e-3);
    REQUIRE(p.holes.size() == 6);
    double r = 0.6 * std::sin(kPi / 6.0);
    for (const Vec2& h : p.holes) {
        // each seed lies strictly inside one of the disks
        bool inside = false;
        for (int j = 0; j < 6; ++j) {
            Vec2 c = polar(0.6, 2.0 * kPi * j / 6.0);
            if (h.dist(c) < r) inside = true;
        }
        CHECK(inside);
    }
}

TEST_CASE("triangulating a square with a slit") {
    CondenserSpec spec = square_with_slit();
    Pslg p = discretize_boundary(spec, 0.05);
    Mesh m = triangulate(p, 0.5);
    CHECK(m.triangles.size() >= 2);
    CHECK(check_mesh(m).empty());
    CHECK(mesh_area(m) == doctest::Approx(1.0).epsilon(1e-9));

    // the slit is a crack: interior would-be-duplicate endpoints are the
    // tips here, which stay single; boundary tags split outer vs compact
    bool has_outer = false, has_compact = false;
    for (VertexTag t : m.vtags) {
        if (t == VertexTag::Outer) has_outer = true;
        if (t == VertexTag::Compact) has_compact = true;
    }
    CHECK(has_outer);
    CHECK(has_compact);

    // potential side consistency: every constraint is an edge of some triangle
    std::set<std::uint64_t> edges;
    for (const auto& t : m.triangles)
        for (int i = 0; i < 3; ++i) {
            std::uint64_t a = t[i], b = t[(i + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert((a << 32) | b);
        }
    for (const MeshConstraint& c : m.constraints) {
        std::uint64_t a = c.a, b = c.b;
        if (a > b) std::swap(a, b);
        CHECK(edges.count((a << 32) | b) == 1);
    }
}

TEST_CASE("maze triangulations are conforming") {
    struct Row {
        CondenserSpec spec;
        double area; // expected domain area, <0 to skip the check
    };
    std::vector<Row> rows;
    rows.push_back({build_square_maze(7), 1.0});
    rows.push_back({build_circular_maze(5), kPi});
    rows.push_back({build_spiked_annulus(10), kPi * (1.0 - 0.25 * 0.25)});

    for (const Row& row : rows) {
        CAPTURE(row.spec.custom_name);
        CAPTURE(static_cast<int>(row.spec.family));
        Mesh m = default_mesh(row.spec);
        CHECK(check_mesh(m).empty());
        if (row.area > 0.0)
            CHECK(mesh_area(m) == doctest::Approx(row.area).epsilon(0.01));
        // every singular point is a mesh vertex
        for (const SingularPoint& sp : singular_points(row.spec))
            CHECK(!vertices_at(m, sp.p).empty());
    }
}

TEST_CASE("euler characteristic per family") {
    CHECK(euler_char(default_mesh(build_square_maze(7))) == 1);
    CHECK(euler_char(default_mesh(build_circular_maze(5))) == 1);
    CHECK(euler_char(default_mesh(build_spiked_annulus(10))) == 0);
    // cut disks: 6 separated holes in a disk
    CHECK(euler_char(default_mesh(build_tangent_disks(6, 0.6, 0.06))) == -5);
    // tangent disks pinch off a center island: two components, the outer one
    // carrying the fused necklace as a single hole (1 + 0)
    CHECK(euler_char(default_mesh(build_tangent_disks(6, 0.6))) == 1);
}

TEST_CASE("slit walls are opened into two sheets") {
    CondenserSpec spec = build_square_maze(7);
    Mesh m = default_mesh(spec);

    std::vector<SingularPoint> sing = singular_points(spec);
    int tips = 0, roots = 0;
    for (const SingularPoint& sp : sing) {
        if (sp.kind == SingularPoint::Kind::SlitTip) {
            ++tips;
            CHECK(vertices_at(m, sp.p).size() == 1);
        }
        if (sp.kind == SingularPoint::Kind::SlitRoot) {
            ++roots;
            CHECK(vertices_at(m, sp.p).size() == 2);
        }
    }
    CHECK(tips == 6);
    CHECK(roots == 6);

    // every duplicated coordinate lies on a wall
    std::map<std::pair<long long, long long>, std::vector<int>> bucket;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        auto key = std::make_pair(llround(m.vertices[i].x * 1e9),
                                  llround(m.vertices[i].y * 1e9));
        bucket[key].push_back(static_cast<int>(i));
    }
    int doubled = 0;
    for (const auto& [key, ids] : bucket) {
        if (ids.size() < 2) continue;
        ++doubled;
        CHECK(ids.size() == 2);
        double dw = 1e9;
        for (const Chain& w : spec.walls)
            for (const ArcSegment& seg : w.segments)
                dw = std::min(dw, point_to_primitive(seg, m.vertices[ids[0]]));
        CHECK(dw <= 1e-9);
    }
    CHECK(doubled > 6); // interior wall samples double up too, not just roots
}

TEST_CASE("corner grading shrinks incident edges geometrically") {
    CondenserSpec spec = build_square_maze(3);
    Mesh m0 = default_mesh(spec);

    std::vector<Vec2> corners;
    for (const SingularPoint& sp : singular_points(spec)) corners.push_back(sp.p);

    Mesh same = refine_corners(m0, corners, 0.15, 0);
    CHECK(same.vertices.size() == m0.vertices.size());
    CHECK(same.triangles.size() == m0.triangles.size());

    int levels = 8;
    Mesh g = refine_corners(m0, corners, 0.15, levels);
    CHECK(check_mesh(g).empty());

    // at a slit tip the constrained incident edge length scales by exactly
    // q per level (straight walls, parameter interpolation)
    Vec2 tip;
    bool found = false;
    for (const SingularPoint& sp : singular_points(spec))
        if (sp.kind == SingularPoint::Kind::SlitTip) {
            tip = sp.p;
            found = true;
            break;
        }
    REQUIRE(found);

    auto min_con_edge = [&](const Mesh& m) {
        std::vector<int> ids = vertices_at(m, tip);
        REQUIRE(!ids.empty());
        double best = 1e9;
        for (const MeshConstraint& c : m.constraints)
            for (int id : ids)
                if (c.a == id || c.b == id)
                    best = std::min(best, m.vertices[c.a].dist(m.vertices[c.b]));
        return best;
    };
    double before = min_con_edge(m0);
    double after = min_con_edge(g);
    double expect = before * std::pow(0.15, levels);
    CHECK(after == doctest::Approx(expect).epsilon(1e-6));

    CHECK_THROWS_AS(refine_corners(m0, corners, 1.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(refine_corners(m0, {Vec2{55.0, 55.0}}, 0.2, 2), std::invalid_argument);
}

TEST_CASE("uniform refinement nests and snaps to arcs") {
    CondenserSpec spec = build_annulus(0.25, 1.0);
    Mesh m = default_mesh(spec);
    int chi = euler_char(m);
    Mesh r = refine_uniform(m);

    CHECK(r.triangles.size() == 4 * m.triangles.size());
    CHECK(r.constraints.size() == 2 * m.constraints.size());
    CHECK(r.refine_level == m.refine_level + 1);
    CHECK(euler_char(r) == chi);
    CHECK(check_mesh(r).empty());

    // old vertices come first, bit for bit
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        CHECK(r.vertices[i].x == m.vertices[i].x);
        CHECK(r.vertices[i].y == m.vertices[i].y);
    }

    // every boundary vertex sits on its circle, including new midpoints
    for (std::size_t i = 0; i < r.vertices.size(); ++i) {
        if (r.vtags[i] == VertexTag::Outer)
            CHECK(std::abs(r.vertices[i].norm() - 1.0) <= 1e-12);
        if (r.vtags[i] == VertexTag::Compact)
            CHECK(std::abs(r.vertices[i].norm() - 0.25) <= 1e-12);
    }
}

TEST_CASE("discrete clearance survives meshing") {
    CondenserSpec spec = build_circular_maze(5);
    ValidationReport rep = validate_spec(spec);
    REQUIRE(rep.valid);
    double tol = 0.005;
    Pslg p = discretize_boundary(spec, tol);
    Mesh m = triangulate(p, rep.clearance * rep.clearance / 3.0);

    double dmin = 1e9;
    for (std::size_t i = 0; i < m.vertices.size(); ++i) {
        if (m.vtags[i] != VertexTag::Compact) continue;
        for (std::size_t j = 0; j < m.vertices.size(); ++j) {
            if (m.vtags[j] != VertexTag::Outer) continue;
            dmin = std::min(dmin, m.vertices[i].dist(m.vertices[j]));
        }
    }
    CHECK(dmin >= rep.clearance - 2.0001 * tol);
}

TEST_CASE("triangle quality away from singular corners") {
    CondenserSpec spec = build_square_maze(7);
    ValidationReport rep = validate_spec(spec);
    double max_area = rep.clearance * rep.clearance / 3.0;
    Pslg p = discretize_boundary(spec, rep.clearance / 20.0);
    Mesh m = triangulate(p, max_area);

    std::vector<Vec2> sing;
    for (const SingularPoint& sp : singular_points(spec)) sing.push_back(sp.p);

    int bad_angle_far = 0, oversize = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        if (triangle_area(m, t) > max_area * 1.0001) ++oversize;
        if (triangle_min_angle_deg(m, t) < 19.999) {
            Vec2 g = (m.vertices[m.triangles[t][0]] + m.vertices[m.triangles[t][1]] +
                      m.vertices[m.triangles[t][2]]) /
                     3.0;
            double d = 1e9;
            for (const Vec2& s : sing) d = std::min(d, g.dist(s));
            if (d > 2.0 * rep.clearance) ++bad_angle_far;
        }
    }
    CHECK(oversize == 0);
    CHECK(bad_angle_far == 0);
}

TEST_CASE("mesh io round trips byte for byte") {
    CondenserSpec spec = build_square_maze(3);
    Mesh m = default_mesh(spec);

    std::string f1 = "mesh_io_a.txt", f2 = "mesh_io_b.txt";
    save_mesh(m, f1);
    Mesh l = load_mesh(f1);
    save_mesh(l, f2);

    std::ifstream a(f1), b(f2);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    REQUIRE(sa.str().size() > 0);
    CHECK(sa.str() == sb.str());

    CHECK(l.vertices.size() == m.vertices.size());
    CHECK(l.triangles.size() == m.triangles.size());
    CHECK(l.constraints.size() == m.constraints.size());
    CHECK(l.refine_level == m.refine_level);
    CHECK(check_mesh(l).empty());

    // loaded meshes lose their primitive links: refinement midpoints are
    // plain chord midpoints from then on, even where the original had arcs
    Mesh r = refine_uniform(l);
    std::set<std::pair<long long, long long>> midset;
    for (const auto& t : l.triangles) {
        for (int i = 0; i < 3; ++i) {
            Vec2 mid = (l.vertices[t[i]] + l.vertices[t[(i + 1) % 3]]) / 2.0;
            midset.insert({llround(mid.x * 1e12), llround(mid.y * 1e12)});
        }
    }
    for (std::size_t i = l.vertices.size(); i < r.vertices.size(); ++i) {
        auto key = std::make_pair(llround(r.vertices[i].x * 1e12),
                                  llround(r.vertices[i].y * 1e12));
        CHECK(midset.count(key) == 1);
    }

    std::remove(f1.c_str());
    std::remove(f2.c_str());
}
