// Maze-like condenser geometries: four generator families, exact boundary
// distance queries, and the circular-arc triangle used by the conformal map.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mazecap {

inline constexpr double kGeomTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const;
    double dist(const Vec2& o) const { return (*this - o).norm(); }
};

Vec2 polar(double r, double angle);

// A chain piece: straight segment or circular arc.
// Arcs are parameterised by angle from angle_start to angle_end; the sweep
// angle_end - angle_start is signed (positive ccw, negative cw) and its
// magnitude lies in (0, 2*pi].
struct ArcSegment {
    enum class Kind : std::uint8_t { Segment, Arc };

    Kind kind = Kind::Segment;
    Vec2 p0, p1;           // segment endpoints (Kind::Segment)
    Vec2 center;           // arc center (Kind::Arc)
    double radius = 0.0;
    double angle_start = 0.0;
    double angle_end = 0.0;

    static ArcSegment segment(const Vec2& a, const Vec2& b);
    static ArcSegment arc(const Vec2& center, double radius, double angle_start,
                          double angle_end);

    bool is_arc() const { return kind == Kind::Arc; }
    double sweep() const { return angle_end - angle_start; }
    bool ccw() const { return sweep() > 0.0; }
    Vec2 start() const;
    Vec2 end() const;
    // point at parameter t in [0,1] (uniform in arclength for both kinds)
    Vec2 at(double t) const;
    double length() const;
};

struct Chain {
    std::vector<ArcSegment> segments;
    bool closed = false;

    Vec2 start() const { return segments.front().start(); }
    Vec2 end() const { return segments.back().end(); }
    double length() const;
};

// Compact set K: either a 1D curve (open chain) or a 2D region given by its
// closed boundary loops.
struct CompactSet {
    enum class Kind : std::uint8_t { Curve, Region };
    Kind kind = Kind::Curve;
    Chain curve;                 // Kind::Curve
    std::vector<Chain> region;   // Kind::Region: boundary loops, ccw
};

enum class Family : std::uint8_t {
    SquareMaze,
    CircularMaze,
    SpikedAnnulus,
    TangentDisks,
    Custom,
};

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct CondenserSpec {
    Family family = Family::Custom;
    std::string custom_name;               // used when family == Custom
    std::vector<std::pair<std::string, double>> params;

    std::vector<Chain> outer_loops;        // closed boundary loops of the domain
    std::vector<Chain> walls;              // open slit chains (part of the outer boundary)
    CompactSet compact;

    double param(const std::string& key) const;
};

struct ValidationReport {
    bool valid = true;
    double clearance = 0.0;                // d(K, outer boundary)
    std::vector<std::string> errors;
};

// Points where the potential is singular; used to drive corner-graded meshing.
struct SingularPoint {
    enum class Kind : std::uint8_t {
        SlitTip,       // free end of a wall slit (opening 2*pi, r^{1/2})
        SlitRoot,      // wall endpoint attached to another boundary piece
        ChainEnd,      // free end of a compact curve (r^{1/2})
        ChainCorner,   // corner of the compact curve (r^{2/3})
        Cusp,          // tangency cusp between compact disks
        CutCorner,     // corner where a cutting circle meets a disk boundary
    };
    Vec2 p;
    Kind kind = Kind::SlitTip;
};

// ----- generators -----

// Unit square with m-1 alternating horizontal spikes; K is the serpentine
// chain of m runs at heights (2k-1)/(2m) with clearance exactly 1/(2m).
CondenserSpec build_square_maze(int m);

// Unit disk with m-1 gapped circle walls joined by radial walls into a spiral;
// K threads the corridors at radii (m-k)/m + 1/(2m).
CondenserSpec build_circular_maze(int m);

// Gap widths alpha[k] and gap start angles theta[k] (1-based, k <= m-1)
// of the circular maze; shared by the generator and the closed-form length.
void circular_maze_angles(int m, std::vector<double>& alpha, std::vector<double>& theta);

// Annulus r0 < |z| < r1 with M alternating inner/outer radial spikes; K is the
// arc/radial thread between them. Defaults follow the reference tables.
CondenserSpec build_spiked_annulus(int M, double r0 = 0.25, double r1 = 1.0,
                                   double l0 = 0.5, double l1 = 0.5);

// Unit disk containing n mutually tangent disks of radius rho*sin(pi/n) on the
// circle |z| = rho; cut radius s >= 0 removes disks B(t_j, s) at the tangency
// points (defeaturing).
CondenserSpec build_tangent_disks(int n, double rho, double cut_radius = 0.0);

// Plain annulus benchmark condenser (capacity 2*pi/log(r1/r0)).
CondenserSpec build_annulus(double r0, double r1);

// ----- queries -----

// Exact distance from p to the nearest outer-boundary primitive (walls
// included, compact excluded). Throws std::domain_error if p lies outside the
// domain or on the boundary.
double distance_to_boundary(const CondenserSpec& spec, const Vec2& p);

// Same minimum without the inside-domain check (used internally and by tests).
double distance_to_outer_primitives(const CondenserSpec& spec, const Vec2& p);

bool point_in_domain(const CondenserSpec& spec, const Vec2& p);

// Closure/self-intersection/clearance diagnostics. Never throws; problems are
// reported in the returned structure.
ValidationReport validate_spec(const CondenserSpec& spec);

std::vector<SingularPoint> singular_points(const CondenserSpec& spec);

// Signed area enclosed by the outer loops (walls contribute nothing).
double domain_area(const CondenserSpec& spec);

// Rigid rotation about the origin (capacity is invariant under it).
CondenserSpec rotate_spec(const CondenserSpec& spec, double angle);

// Minimum distance between two primitives (exact, not sampled).
double primitive_distance(const ArcSegment& a, const ArcSegment& b);
double point_to_primitive(const ArcSegment& s, const Vec2& p);

// ----- circular-arc triangle (conformal map input) -----

using Cplx = std::complex<double>;

// Triangle with a cusp at z=1 and right angles at v, conj(v); sides S1, S3 are
// stored as arcs (S2 is the conjugate of S1).
struct ArcTriangle {
    double theta = 0.0;
    Cplx u;        // center of S1: u = 1 + i*tan(theta)
    Cplx v;        // right-angle vertex
    Cplx w;        // center of S3 (real)
    double beta = 0.0;   // arg(v - w)
    ArcSegment s1; // from 1 to v on circle(u, Im u)
    ArcSegment s2; // from conj(v) to 1 (mirror of S1)
    ArcSegment s3; // from v through w+|v-w| to conj(v)
};

// theta in (0, pi/6]
ArcTriangle arc_triangle(double theta);

// Sub-arc of S1 near the cusp subtending theta2 = 2*atan(s / Im u); requires
// 0 < s < |v - w| / 3.
ArcSegment cut_subarc(double theta, double s);

bool triangle_contains(const ArcTriangle& tri, const Cplx& z, double tol = kGeomTol);

} // namespace mazecap
