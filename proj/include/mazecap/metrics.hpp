#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mazecap/geometry.hpp"

namespace mazecap {

// Poincare distance in the upper half-plane: cosh(rho) = 1 + |x-y|^2/(2 x2 y2).
// Throws std::domain_error unless both second coordinates are positive.
double hyperbolic_distance_halfplane(const Vec2& x, const Vec2& y);

// Poincare distance in the unit disk via
// sinh^2(rho/2) = |x-y|^2 / ((1-|x|^2)(1-|y|^2)).
// Throws std::domain_error unless both points are strictly inside the disk.
double hyperbolic_distance_disk(const Vec2& x, const Vec2& y);

// Same distance via tanh(rho/2) = |x-y| / |1 - x*conj(y)|; kept as an
// independent cross-check of the sinh form.
double hyperbolic_distance_disk_tanh(const Vec2& x, const Vec2& y);

// Quasihyperbolic length of a chain strictly inside the domain of `spec`:
// the line integral of 1/d(z, boundary) along the chain, evaluated by
// adaptive Gauss quadrature to relative tolerance `tol`. Throws
// std::domain_error if the chain touches or leaves the domain.
//
// Piece integrals run in parallel; the sum is accumulated in chain order, so
// the parallel and serial versions return bitwise-identical results.
double qh_length_numeric(const Chain& chain, const CondenserSpec& spec,
                         double tol = 1e-10);
double qh_length_numeric_serial(const Chain& chain, const CondenserSpec& spec,
                                double tol = 1e-10);

struct QhReport {
    std::string family;
    std::vector<std::pair<std::string, double>> params;
    double closed_form_length = 0.0;
    double closed_form_perimeter = 0.0;  // exactly 2 * closed_form_length
    double numeric_length = 0.0;         // independent quadrature oracle
    double rel_discrepancy = 0.0;        // |numeric - closed| / closed
};

// Closed-form quasihyperbolic lengths of the chain K for the three maze
// families, with the closed form checked against numeric quadrature.
//
// The square maze closed form is exact for the full geometry, so its oracle
// integrates the built chain against the built spec. The circular maze and
// spiked annulus closed forms are sums of per-piece integrals in which each
// piece sees only its two nearest boundary features (flanking line through
// the origin for radial pieces, concentric circles for arcs); the oracle
// integrates each piece against exactly that reduced boundary.
QhReport qh_square_maze(int m);
QhReport qh_circular_maze(int m);
QhReport qh_spiked_annulus(int M);

// area(domain) / clearance^2, the capacity-driving shape quotient.
// Throws std::invalid_argument if the spec fails validation.
double domain_quotient(const CondenserSpec& spec);

}  // namespace mazecap
