#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mazecap/geometry.hpp"

namespace mazecap {

enum class EdgeTag : std::uint8_t {
    Outer,          // outer domain loop
    Wall,           // slit wall (domain on both sides, cut into two sheets)
    Compact,        // compact 1D chain (domain on both sides, continuous)
    CompactRegion,  // boundary loop of a 2D compact region (hole in the mesh)
};

enum class VertexTag : std::uint8_t { Interior, Outer, Compact };

// Straight-line graph fed to the triangulator. Every edge remembers the
// boundary primitive and parameter range it discretizes so later refinement
// can put new points back on the true arc.
struct PslgEdge {
    int a = -1, b = -1;
    EdgeTag tag = EdgeTag::Outer;
    int prim = -1;         // index into prims, -1 if synthetic
    double ta = 0.0, tb = 0.0;
};

struct Pslg {
    std::vector<Vec2> points;
    std::vector<PslgEdge> edges;
    std::vector<Vec2> holes;  // one seed strictly inside each compact region
    std::vector<ArcSegment> prims;
};

struct MeshConstraint {
    int a = -1, b = -1;
    EdgeTag tag = EdgeTag::Outer;
    int prim = -1;
    double ta = 0.0, tb = 0.0;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<VertexTag> vtags;             // parallel to vertices
    std::vector<std::array<int, 3>> triangles;  // ccw
    std::vector<MeshConstraint> constraints;
    std::vector<ArcSegment> prims;            // for snap-back refinement
    int refine_level = 0;
};

// Polyline approximation of the boundary: arcs subdivided so the chord
// deviation stays under chord_tol, junction points welded, wall slits kept
// as single interior edges (they are cut into two-sided sheets later).
// Throws std::invalid_argument for invalid specs or chord_tol > clearance/2.
Pslg discretize_boundary(const CondenserSpec& spec, double chord_tol);

// Constrained Delaunay triangulation of the domain with Ruppert-style
// refinement: all domain triangles have area <= max_area and minimum angle
// >= 20 degrees away from sharp input corners (tangency cusps). Wall slits
// come out as duplicated vertex sheets so fields may jump across them.
Mesh triangulate(const Pslg& pslg, double max_area);

// Geometric grading: L nested layers of ring re-triangulation around each
// corner (corner-incident edges shrink by factor q per layer). Corners must
// coincide with mesh vertices. Finishes with a constrained Delaunay flip
// cleanup so the graded mesh keeps the discrete maximum principle.
Mesh refine_corners(const Mesh& mesh, const std::vector<Vec2>& corners, double q,
                    int levels);

// Red refinement: every triangle split into four by edge midpoints; midpoints
// of constraint edges are snapped back onto their source arcs. Meshes loaded
// from disk lose the arc bindings and refine with straight midpoints.
Mesh refine_uniform(const Mesh& mesh);

// Structural invariants: positive orientation, area > 1e-16, conforming edge
// use (an edge borders at most two triangles and one-sided edges are
// constrained), constraint indices in range. Returns human-readable
// violations; empty means valid.
std::vector<std::string> check_mesh(const Mesh& mesh);

double triangle_area(const Mesh& mesh, int t);
double triangle_min_angle_deg(const Mesh& mesh, int t);

// Versioned line-oriented format: "mazecap-mesh 1", counts+level line, vertex
// lines "x y tag", triangle lines "i j k", constraint lines "i j tag".
// Byte-exact round-trip; arc bindings are not persisted.
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace mazecap
