#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "mazecap/conformal.hpp"
#include "mazecap/geometry.hpp"

using namespace mazecap;

namespace {
constexpr double kPi = std::numbers::pi;
const double kThetas[] = {kPi / 24, kPi / 12, kPi / 6};
} // namespace

TEST_CASE("moebius coefficients anchor v, conj v and the pole") {
    for (double theta : kThetas) {
        CAPTURE(theta);
        const ArcTriangle tri = arc_triangle(theta);
        const MoebiusMap h = moebius_coeffs(tri.v);

        CHECK(std::abs(h(tri.v) - Cplx(1.0, 0.0)) <= 1e-12);
        CHECK(std::abs(h(std::conj(tri.v)) + Cplx(1.0, 0.0)) <= 1e-12);
        // conjugate-symmetric input: b real, c purely imaginary
        CHECK(std::abs(h.b.imag()) <= 1e-14 * std::abs(h.b.real()));
        CHECK(std::abs(h.c.real()) <= 1e-14 * std::abs(h.c.imag()));
        // pole at the cusp
        CHECK(std::abs(h(Cplx(1.0 + 1e-9, 0.0))) > 1e7);
    }
}

TEST_CASE("degenerate moebius inputs are rejected") {
    CHECK_THROWS_AS((void)moebius_coeffs(Cplx(2.0, 0.0)), std::domain_error);
    CHECK_THROWS_AS((void)moebius_coeffs(Cplx(1.0, 0.7)), std::domain_error);
    CHECK_NOTHROW((void)moebius_coeffs(Cplx(1.5, 0.7)));
}

TEST_CASE("side images land on the derived lines") {
    for (double theta : kThetas) {
        CAPTURE(theta);
        const ArcTriangle tri = arc_triangle(theta);
        const TriangleMapDiagnostics d = verify_triangle_map(tri, 100);

        CHECK(d.vertex_dev <= 1e-12);
        CHECK(d.s1_line_dev <= 1e-10);
        CHECK(d.s2_line_dev <= 1e-10);
        CHECK(d.s3_line_dev <= 1e-10);
        CHECK(d.s3_range_excess <= 1e-12);
        CHECK(d.s3_image_im <= 1e-10);
        CHECK(d.cr_residual <= 1e-6);
        // S1 starts and S2 ends at the cusp
        CHECK(d.pole_hits == 2);
    }
    CHECK_THROWS_AS((void)verify_triangle_map(arc_triangle(kPi / 6), 2),
                    std::invalid_argument);
}

TEST_CASE("composite map: vertices, cusp, and side values") {
    const ArcTriangle tri = arc_triangle(kPi / 6);

    ExtCplx at_v = map_triangle_to_halfplane(tri, tri.v);
    CHECK(!at_v.infinite);
    CHECK(std::abs(at_v.value - Cplx(1.0, 0.0)) <= 1e-12);
    ExtCplx at_vbar = map_triangle_to_halfplane(tri, std::conj(tri.v));
    CHECK(std::abs(at_vbar.value + Cplx(1.0, 0.0)) <= 1e-12);

    CHECK(map_triangle_to_halfplane(tri, Cplx(1.0, 0.0)).infinite);

    // outer side midpoint is the real point w + |v - w|; it maps to f(0) = 0
    const Vec2 mid = tri.s3.at(0.5);
    CHECK(std::abs(mid.y) <= 1e-12);
    ExtCplx at_mid = map_triangle_to_halfplane(tri, Cplx(mid.x, mid.y));
    CHECK(std::abs(at_mid.value) <= 1e-12);

    // S1 interior: h has Re = 1, so the image is real with |f| >= 1
    const Vec2 s1p = tri.s1.at(0.5);
    ExtCplx im1 = map_triangle_to_halfplane(tri, Cplx(s1p.x, s1p.y));
    CHECK(std::abs(im1.value.imag()) <= 1e-10 * std::abs(im1.value.real()));
    CHECK(im1.value.real() >= 1.0);

    CHECK_THROWS_AS((void)map_triangle_to_halfplane(tri, Cplx(0.0, 0.0)),
                    std::domain_error);
}

TEST_CASE("interior points map into the open upper half-plane") {
    for (double theta : kThetas) {
        CAPTURE(theta);
        const ArcTriangle tri = arc_triangle(theta);
        const Cplx one(1.0, 0.0);
        const Cplx vbar = std::conj(tri.v);
        int tested = 0;
        for (int a = 1; a <= 9; ++a)
            for (int b = 1; a + b <= 10; ++b) {
                const Cplx z =
                    one + (tri.v - one) * (0.1 * a) + (vbar - one) * (0.1 * b);
                if (!triangle_contains(tri, z)) continue;
                ExtCplx w = map_triangle_to_halfplane(tri, z);
                REQUIRE(!w.infinite);
                CHECK(w.value.imag() > 0.0);
                ++tested;
            }
        CHECK(tested >= 10);
    }
}
