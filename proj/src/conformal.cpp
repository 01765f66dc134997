#include "mazecap/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mazecap {
namespace {

constexpr double kPi = std::numbers::pi;

Cplx cplx(const Vec2& p) { return {p.x, p.y}; }

// f maps the strip {-1 < Re < 1, Im > 0} onto the upper half-plane.
Cplx strip_map(const Cplx& zeta) { return std::sin(kPi * zeta / 2.0); }

} // namespace

MoebiusMap moebius_coeffs(const Cplx& v) {
    const Cplx vbar = std::conj(v);
    if (v == vbar)
        throw std::domain_error("moebius_coeffs: v is real (degenerate)");
    const Cplx den = v + vbar - 2.0;
    if (den == 0.0)
        throw std::domain_error("moebius_coeffs: Re v = 1 (degenerate)");
    MoebiusMap h;
    h.b = (v + vbar - 2.0 * v * vbar) / den;
    h.c = (v - vbar) / den;
    if (!std::isfinite(h.b.real()) || !std::isfinite(h.b.imag()) ||
        !std::isfinite(h.c.real()) || !std::isfinite(h.c.imag()))
        throw std::domain_error("moebius_coeffs: coefficients overflow");
    return h;
}

ExtCplx map_triangle_to_halfplane(const ArcTriangle& tri, const Cplx& z) {
    if (!triangle_contains(tri, z))
        throw std::domain_error("map_triangle_to_halfplane: point outside the triangle");
    if (std::abs(z - Cplx(1.0, 0.0)) < 1e-14) return {Cplx{}, true};
    const MoebiusMap h = moebius_coeffs(tri.v);
    return {strip_map(h(z)), false};
}

TriangleMapDiagnostics verify_triangle_map(const ArcTriangle& tri, int samples) {
    if (samples < 3)
        throw std::invalid_argument("verify_triangle_map: samples must be >= 3");
    const MoebiusMap h = moebius_coeffs(tri.v);

    TriangleMapDiagnostics d;
    d.theta = tri.theta;
    d.samples = samples;
    d.vertex_dev = std::max(std::abs(h(tri.v) - Cplx(1.0, 0.0)),
                            std::abs(h(std::conj(tri.v)) + Cplx(1.0, 0.0)));

    const ArcSegment* sides[3] = {&tri.s1, &tri.s2, &tri.s3};
    for (int side = 0; side < 3; ++side) {
        for (int i = 0; i < samples; ++i) {
            const double t = double(i) / double(samples - 1);
            const Cplx z = cplx(sides[side]->at(t));
            if (std::abs(z - Cplx(1.0, 0.0)) < 1e-14) {
                ++d.pole_hits;
                continue;
            }
            const Cplx w = h(z);
            if (side == 0) {
                d.s1_line_dev = std::max(d.s1_line_dev, std::abs(w.real() - 1.0));
            } else if (side == 1) {
                d.s2_line_dev = std::max(d.s2_line_dev, std::abs(w.real() + 1.0));
            } else {
                d.s3_line_dev = std::max(d.s3_line_dev, std::abs(w.imag()));
                d.s3_range_excess =
                    std::max(d.s3_range_excess, std::abs(w.real()) - 1.0);
                d.s3_image_im =
                    std::max(d.s3_image_im, std::abs(strip_map(w).imag()));
            }
        }
    }
    d.s3_range_excess = std::max(d.s3_range_excess, 0.0);

    // Cauchy-Riemann residual of F = f o h on an interior grid: holomorphy
    // means dF/dy = i dF/dx; central differences, normalized by |F'|.
    const Cplx one(1.0, 0.0);
    const Cplx vbar = std::conj(tri.v);
    const double step = 1e-6;
    for (int a = 1; a <= 4; ++a)
        for (int b = 1; a + b <= 5; ++b) {
            const double ta = 0.18 * a, tb = 0.18 * b;
            const Cplx z = one + (tri.v - one) * ta + (vbar - one) * tb;
            auto F = [&](const Cplx& p) { return strip_map(h(p)); };
            const Cplx dx = (F(z + step) - F(z - step)) / (2.0 * step);
            const Cplx dy =
                (F(z + Cplx(0.0, step)) - F(z - Cplx(0.0, step))) / (2.0 * step);
            const double res = std::abs(dy - Cplx(0.0, 1.0) * dx) /
                               (1.0 + std::abs(dx));
            d.cr_residual = std::max(d.cr_residual, res);
        }
    return d;
}

} // namespace mazecap
