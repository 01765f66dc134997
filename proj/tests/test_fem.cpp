#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mazecap/fem.hpp"
#include "mazecap/geometry.hpp"
#include "mazecap/mesh.hpp"

using namespace mazecap;

namespace {

// single reference triangle (0,0) (1,0) (0,1), all nodes free
Mesh reference_triangle() {
    Mesh m;
    m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.vtags = {VertexTag::Interior, VertexTag::Interior, VertexTag::Interior};
    m.triangles = {{0, 1, 2}};
    return m;
}

// n x n grid of the unit square, u = 0 at x = 0 and u = 1 at x = 1
Mesh grid_square(int n) {
    Mesh m;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            m.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
            m.vtags.push_back(i == 0   ? VertexTag::Outer
                              : i == n ? VertexTag::Compact
                                       : VertexTag::Interior);
        }
    const auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

double csr_at(const FemSystem& s, int r, int c) {
    for (int ii = s.row_ptr[r]; ii < s.row_ptr[r + 1]; ++ii)
        if (s.col[ii] == c) return s.val[ii];
    return 0.0;
}

PotentialField field_from(const FemSystem& sys, double (*f)(Vec2)) {
    PotentialField u;
    u.order = sys.order;
    u.values.resize(sys.nodes);
    for (int k = 0; k < sys.nodes; ++k) u.values[k] = f(sys.node_pos[k]);
    return u;
}

}  // namespace

TEST_CASE("reference element stiffness") {
    const Mesh tri = reference_triangle();

    const FemSystem p1 = assemble(tri, 1);
    CHECK(p1.free_count == 3);
    const double want[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int r = 0; r < 3; ++r) {
        double row_sum = 0.0;
        for (int c = 0; c < 3; ++c) {
            CHECK(csr_at(p1, r, c) == want[r][c]);
            row_sum += csr_at(p1, r, c);
        }
        CHECK(row_sum == 0.0);  // gradient of the constant function
    }

    const FemSystem p2 = assemble(tri, 2);
    CHECK(p2.nodes == 6);
    CHECK(p2.free_count == 6);
    for (int r = 0; r < 6; ++r) {
        double row_sum = 0.0;
        for (int c = 0; c < 6; ++c) {
            row_sum += csr_at(p2, r, c);
            CHECK(csr_at(p2, r, c) == csr_at(p2, c, r));
        }
        CHECK(std::abs(row_sum) <= 1e-14);
    }
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        double x[6], q = 0.0;
        for (double& v : x) v = U(rng);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c) q += x[r] * csr_at(p2, r, c) * x[c];
        CHECK(q >= -1e-12);  // positive semidefinite (constants in the kernel)
    }
}

TEST_CASE("quadrature energy is exact for polynomial fields") {
    const Mesh tri = reference_triangle();

    const FemSystem p1 = assemble(tri, 1);
    const PotentialField lin = field_from(p1, [](Vec2 p) { return p.x + 2.0 * p.y; });
    CHECK(dirichlet_energy(tri, lin) == doctest::Approx(2.5).epsilon(1e-13));
    CHECK(energy_from_system(p1, lin) == doctest::Approx(2.5).epsilon(1e-13));

    const FemSystem p2 = assemble(tri, 2);
    const PotentialField quad = field_from(p2, [](Vec2 p) { return p.x * p.x; });
    // grad = (2x, 0), integral of 4x^2 over the triangle = 1/3
    CHECK(dirichlet_energy(tri, quad) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(energy_from_system(p2, quad) == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("one dof system solves exactly") {
    FemSystem sys;
    sys.order = 1;
    sys.nodes = 1;
    sys.node_pos = {{0.0, 0.0}};
    sys.dirichlet = {0.0};
    sys.dof = {0};
    sys.free_count = 1;
    sys.row_ptr = {0, 1};
    sys.col = {0};
    sys.val = {2.0};
    sys.load = {6.0};
    const PotentialField u = solve_potential(sys);
    CHECK(u.values[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(u.cg_iterations == 1);
}

TEST_CASE("unit square capacitor carries unit energy") {
    const Mesh grid = grid_square(4);
    const FemSystem sys = assemble(grid, 1);
    CHECK(sys.free_count == 3 * 5);
    const PotentialField u = solve_potential(sys);
    for (int v = 0; v < static_cast<int>(grid.vertices.size()); ++v) {
        if (grid.vtags[v] == VertexTag::Outer) CHECK(u.values[v] == 0.0);
        if (grid.vtags[v] == VertexTag::Compact) CHECK(u.values[v] == 1.0);
        CHECK(u.values[v] == doctest::Approx(grid.vertices[v].x).epsilon(1e-10));
    }
    CHECK(dirichlet_energy(grid, u) == doctest::Approx(1.0).epsilon(1e-12));

    // order 2 resolves the same field on two triangles with edge constraints
    Mesh sq;
    sq.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    sq.vtags = {VertexTag::Outer, VertexTag::Compact, VertexTag::Compact,
                VertexTag::Outer};
    sq.triangles = {{0, 1, 2}, {0, 2, 3}};
    sq.constraints.push_back({3, 0, EdgeTag::Outer, -1, 0.0, 0.0});
    sq.constraints.push_back({1, 2, EdgeTag::Compact, -1, 0.0, 0.0});
    const FemSystem s2 = assemble(sq, 2);
    const PotentialField u2 = solve_potential(s2);
    for (int k = 0; k < s2.nodes; ++k)
        CHECK(u2.values[k] == doctest::Approx(s2.node_pos[k].x).epsilon(1e-10));
    CHECK(dirichlet_energy(sq, u2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("energy routes and serial reference agree on a maze") {
    const CondenserSpec spec = build_square_maze(3);
    const CapacityOptions opt{2, 0, 8.0, 1.0, 0.0};
    const Mesh mesh = capacity_mesh(spec, opt);

    const FemSystem sys = assemble(mesh, 2);
    const FemSystem ref = assemble_reference(mesh, 2);
    CHECK(sys.val == ref.val);
    CHECK(sys.load == ref.load);
    CHECK(sys.lift_energy == ref.lift_energy);

    // symmetry of the reduced block
    for (int r = 0; r < sys.free_count; ++r)
        for (int ii = sys.row_ptr[r]; ii < sys.row_ptr[r + 1]; ++ii) {
            const double a = sys.val[ii], b = csr_at(sys, sys.col[ii], r);
            CHECK(std::abs(a - b) <= 1e-14 * std::max(std::abs(a), 1.0));
        }

    const PotentialField u = solve_potential(sys);
    const PotentialField v = solve_potential(sys);
    CHECK(u.values == v.values);  // deterministic solve
    CHECK(u.cg_iterations == v.cg_iterations);

    const double eq = dirichlet_energy(mesh, u);
    const double es = dirichlet_energy_reference(mesh, u);
    const double em = energy_from_system(sys, u);
    CHECK(eq == es);
    CHECK(std::abs(eq - em) <= 1e-10 * eq);
    CHECK(eq > 0.0);
}

TEST_CASE("capacity decreases along nested refinements and element order") {
    const CondenserSpec spec = build_square_maze(3);
    const CapacityOptions opt{2, 2, 8.0, 1.0, 0.0};
    const CapacityResult res = compute_capacity(spec, opt);
    REQUIRE(res.levels.size() == 3);
    CHECK(res.converged);
    CHECK(res.dofs == res.levels.back().dofs);
    for (std::size_t i = 1; i < res.levels.size(); ++i) {
        CHECK(res.levels[i].dofs > res.levels[i - 1].dofs);
        // straight-sided domain: the P2 spaces nest exactly
        CHECK(res.levels[i].capacity <=
              res.levels[i - 1].capacity * (1.0 + 1e-12));
    }
    CHECK(res.value > 0.0);
    CHECK(res.est_rel_error < 0.05);
    CHECK(std::abs(res.value - res.levels.back().capacity) <
          0.02 * res.value);

    // order 1 on the same base mesh bounds the order-2 value from above
    const Mesh mesh = capacity_mesh(spec, opt);
    const FemSystem s1 = assemble(mesh, 1);
    const FemSystem s2 = assemble(mesh, 2);
    const double c1 = dirichlet_energy(mesh, solve_potential(s1));
    const double c2 = dirichlet_energy(mesh, solve_potential(s2));
    CHECK(c2 <= c1 * (1.0 + 1e-12));

    // generous target stops the level loop early
    CapacityOptions quick = opt;
    quick.target_rel_err = 0.5;
    const CapacityResult early = compute_capacity(spec, quick);
    CHECK(early.levels.size() == 2);
    CHECK(early.converged);
}

TEST_CASE("discrete maximum principle for order one") {
    const CondenserSpec spec = build_square_maze(3);
    const Mesh mesh = capacity_mesh(spec, {1, 0, 8.0, 1.0, 0.0});
    const FemSystem sys = assemble(mesh, 1);
    const PotentialField u = solve_potential(sys);
    for (const double v : u.values) {
        CHECK(v >= -1e-8);
        CHECK(v <= 1.0 + 1e-8);
    }
}

TEST_CASE("annulus capacity matches the classical ring formula") {
    const CondenserSpec ring = build_annulus(0.25, 1.0);
    const CapacityOptions opt{2, 4, 40.0, 10.0, 0.0};
    const CapacityResult res = compute_capacity(ring, opt);
    const double exact = 2.0 * std::numbers::pi / std::log(4.0);
    CHECK(std::abs(res.value - exact) <= 1e-4 * exact);
    CHECK(res.est_rel_error <= 1e-3);
}

TEST_CASE("capacity is invariant under rigid rotation") {
    const CondenserSpec spec = build_spiked_annulus(10);
    const CondenserSpec turned =
        rotate_spec(spec, 2.0 * std::numbers::pi / 10.0);
    const CapacityOptions opt{2, 0, 8.0, 1.0, 0.0};
    const double a = compute_capacity(spec, opt).value;
    const double b = compute_capacity(turned, opt).value;
    CHECK(std::abs(a - b) <= 1e-8 * a);
}

TEST_CASE("fem input validation") {
    const Mesh tri = reference_triangle();
    CHECK_THROWS_AS((void)assemble(tri, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)assemble(Mesh{}, 1), std::invalid_argument);

    Mesh flat = tri;
    flat.vertices[2] = flat.vertices[1];  // degenerate triangle
    CHECK_THROWS_AS((void)assemble(flat, 1), std::invalid_argument);

    const FemSystem sys = assemble(tri, 1);
    CHECK_THROWS_AS((void)solve_potential(sys, 0.0), std::invalid_argument);
    PotentialField bad;
    bad.order = 1;
    bad.values = {0.0, 1.0};  // wrong node count
    CHECK_THROWS_AS((void)energy_from_system(sys, bad), std::invalid_argument);
    CHECK_THROWS_AS((void)dirichlet_energy(tri, bad), std::invalid_argument);

    const CondenserSpec spec = build_square_maze(3);
    CHECK_THROWS_AS((void)capacity_mesh(spec, {2, 0, 1.0, 1.0, 0.0}),
                    std::invalid_argument);
}
