#pragma once

#include <vector>

#include "mazecap/geometry.hpp"
#include "mazecap/mesh.hpp"

namespace mazecap {

// Linear system for the Dirichlet energy minimizer on a mesh: u = 0 on the
// outer boundary and walls, u = 1 on the compact set, P1 or P2 elements.
struct FemSystem {
    int order = 2;
    int nodes = 0;             // vertices, plus one node per edge for P2
    std::vector<Vec2> node_pos;
    std::vector<double> dirichlet;  // lift: boundary value at fixed nodes, else 0
    std::vector<int> dof;           // node -> free dof index, -1 when fixed
    int free_count = 0;

    // free-free stiffness block (csr) and the lift load -A_fc g
    std::vector<int> row_ptr, col;
    std::vector<double> val;
    std::vector<double> load;
    double lift_energy = 0.0;  // g^T A g of the lift alone
};

FemSystem assemble(const Mesh& mesh, int order = 2);
// serial kernels, bit-identical to the parallel path
FemSystem assemble_reference(const Mesh& mesh, int order = 2);

struct PotentialField {
    int order = 2;
    std::vector<double> values;  // one per node, boundary values included
    int cg_iterations = 0;
};

// conjugate gradients with incomplete Cholesky; throws on non-convergence
// (message carries the iteration count) and on indefinite systems
PotentialField solve_potential(const FemSystem& sys, double rel_tol = 1e-12);

// Dirichlet energy by element quadrature; the matrix route x^T A x is
// energy_from_system. The two agree to roundoff and are checked against
// each other in the capacity pipeline.
double dirichlet_energy(const Mesh& mesh, const PotentialField& u);
double dirichlet_energy_reference(const Mesh& mesh, const PotentialField& u);
double energy_from_system(const FemSystem& sys, const PotentialField& u);

struct CapacityOptions {
    int order = 2;
    int refinements = 3;        // level budget: uniform refinements after the base
    double chord_div = 20.0;    // chord tolerance = clearance / chord_div
    double area_div = 3.0;      // max area = clearance^2 / area_div
    double target_rel_err = 0.0;  // > 0: stop early once the estimate reaches it
};

struct CapacityLevel {
    int level = 0;
    int dofs = 0;
    double capacity = 0.0;
    double assemble_seconds = 0.0;
    double solve_seconds = 0.0;
    double energy_seconds = 0.0;
};

struct CapacityResult {
    double value = 0.0;          // Aitken extrapolation of the level values
    double est_rel_error = 0.0;  // |value - finest| / value; inf for a single level
    int dofs = 0;                // finest level
    bool converged = true;       // false when target_rel_err was set and missed
    std::vector<CapacityLevel> levels;
};

// corner-graded base mesh of the condenser (the capacity pipeline input)
Mesh capacity_mesh(const CondenserSpec& spec, const CapacityOptions& opt = {});

CapacityResult compute_capacity(const CondenserSpec& spec,
                                const CapacityOptions& opt = {});

// ----- parameter studies -----

// Least-squares slope of log(y) against log(x). Throws std::invalid_argument
// on fewer than two points, nonpositive data, or zero spread in x.
double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

struct RatePoint {
    int param = 0;          // m (mazes) or M (spiked annulus)
    double x = 0.0;         // 1/(2m)
    double capacity = 0.0;
    double est_rel_error = 0.0;
    int dofs = 0;
    double qh_length = 0.0;
    double qh_perimeter = 0.0;
    double qh_rel_error = 0.0;  // |capacity - perimeter| / capacity
};

struct RateFit {
    Family family = Family::SquareMaze;
    std::vector<RatePoint> points;          // sorted by param
    double capacity_slope = 0.0;   // log capacity vs log(1/(2m)); ~ -2
    double qh_error_slope = 0.0;   // log qh_rel_error vs log(1/(2m))
};

// Capacity and QH-perimeter error across a parameter sweep for the three
// maze families. Requires >= 3 parameter values.
RateFit convergence_study(Family family, const std::vector<int>& values,
                          const CapacityOptions& opt = {});

struct DefeaturePoint {
    double cut_radius = 0.0;
    double capacity = 0.0;
    double est_rel_error = 0.0;
    double reduction = 0.0;  // (baseline - capacity) / baseline
};

// Tangent-disk capacities under increasing cut radii; the s = 0 baseline is
// always computed. Requires strictly increasing nonnegative radii below the
// disk radius rho * sin(pi/n).
std::vector<DefeaturePoint> defeature_study(int n, double rho,
                                            const std::vector<double>& cut_radii,
                                            const CapacityOptions& opt = {});

} // namespace mazecap
