// Conformal map of the circular-arc triangle onto the upper half-plane:
// Moebius factor h, strip map f(z) = sin(pi z / 2), composite f o h.
#pragma once

#include <complex>

#include "mazecap/geometry.hpp"

namespace mazecap {

// h(z) = (z + b) / (cz - c). Pole at z = 1 (the cusp vertex); h(v) = 1 and
// h(conj v) = -1 by construction. For conjugate-symmetric triangles b is
// real and c purely imaginary.
struct MoebiusMap {
    Cplx b, c;

    Cplx operator()(const Cplx& z) const { return (z + b) / (c * z - c); }
};

// b = (v + vbar - 2 v vbar) / (v + vbar - 2), c = (v - vbar) / (v + vbar - 2).
// Throws std::domain_error for degenerate v (real, or Re v = 1, where the
// three anchor points collapse).
MoebiusMap moebius_coeffs(const Cplx& v);

// Extended complex value: h has a genuine pole at the cusp, so images near
// z = 1 are reported as the point at infinity instead of large floats.
struct ExtCplx {
    Cplx value;
    bool infinite = false;
};

// f(h(z)) with f(zeta) = sin(pi zeta / 2). Interior points map into the open
// upper half-plane; the side through the cusp maps onto rays of the real
// axis and the outer side onto (-1, 1). Throws std::domain_error when z is
// outside the closed triangle; |z - 1| < 1e-14 returns the infinity marker.
ExtCplx map_triangle_to_halfplane(const ArcTriangle& tri, const Cplx& z);

// Dense-sampling diagnostics of the mapping claims. Deviations are maxima
// over the sampled finite images.
struct TriangleMapDiagnostics {
    double theta = 0.0;
    int samples = 0;
    double s1_line_dev = 0.0;   // |Re h - 1| on S1
    double s2_line_dev = 0.0;   // |Re h + 1| on S2
    double s3_line_dev = 0.0;   // |Im h| on S3
    double s3_range_excess = 0.0;  // max(0, |Re h| - 1) on S3
    double s3_image_im = 0.0;      // |Im f(h(z))| on S3
    double vertex_dev = 0.0;       // max of |h(v) - 1|, |h(conj v) + 1|
    double cr_residual = 0.0;      // finite-difference Cauchy-Riemann check
    int pole_hits = 0;             // side samples landing on the cusp
};

// Samples each side at `samples` evenly spaced parameters, endpoints
// included (the cusp endpoint counts as a pole hit), plus an interior grid
// for the Cauchy-Riemann residual. Requires samples >= 3.
TriangleMapDiagnostics verify_triangle_map(const ArcTriangle& tri, int samples);

} // namespace mazecap
