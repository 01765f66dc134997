#include "mazecap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mazecap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// wrap to (-pi, pi]
double wrap_pm(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    if (r > kPi) r -= kTwoPi;
    return r;
}

} // namespace

double Vec2::norm() const { return std::hypot(x, y); }

Vec2 polar(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

ArcSegment ArcSegment::segment(const Vec2& a, const Vec2& b) {
    ArcSegment s;
    s.kind = Kind::Segment;
    s.p0 = a;
    s.p1 = b;
    return s;
}

ArcSegment ArcSegment::arc(const Vec2& center, double radius, double angle_start,
                           double angle_end) {
    ArcSegment s;
    s.kind = Kind::Arc;
    s.center = center;
    s.radius = radius;
    s.angle_start = angle_start;
    s.angle_end = angle_end;
    return s;
}

Vec2 ArcSegment::start() const {
    return is_arc() ? center + polar(radius, angle_start) : p0;
}

Vec2 ArcSegment::end() const {
    return is_arc() ? center + polar(radius, angle_end) : p1;
}

Vec2 ArcSegment::at(double t) const {
    if (is_arc()) return center + polar(radius, angle_start + t * sweep());
    return p0 + (p1 - p0) * t;
}

double ArcSegment::length() const {
    return is_arc() ? radius * std::abs(sweep()) : p0.dist(p1);
}

double Chain::length() const {
    double L = 0.0;
    for (const auto& s : segments) L += s.length();
    return L;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::SquareMaze: return "square_maze";
        case Family::CircularMaze: return "circular_maze";
        case Family::SpikedAnnulus: return "spiked_annulus";
        case Family::TangentDisks: return "tangent_disks";
        case Family::Custom: return "custom";
    }
    return "custom";
}

Family family_from_name(const std::string& name) {
    if (name == "square_maze") return Family::SquareMaze;
    if (name == "circular_maze") return Family::CircularMaze;
    if (name == "spiked_annulus") return Family::SpikedAnnulus;
    if (name == "tangent_disks") return Family::TangentDisks;
    if (name == "custom") return Family::Custom;
    throw std::invalid_argument("unknown family: " + name);
}

double CondenserSpec::param(const std::string& key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    throw std::invalid_argument("missing param: " + key);
}

// ===== generators =====

CondenserSpec build_square_maze(int m) {
    if (m < 3) throw std::invalid_argument("square maze requires m >= 3");
    const double h = 1.0 / m;
    CondenserSpec spec;
    spec.family = Family::SquareMaze;
    spec.params = {{"m", static_cast<double>(m)}};

    // outer square, ccw, split at spike roots
    Chain loop;
    loop.closed = true;
    auto seg = [&](Vec2 a, Vec2 b) { loop.segments.push_back(ArcSegment::segment(a, b)); };
    seg({0, 0}, {1, 0});
    {
        double y = 0.0;
        for (int k = 2; k <= m - 1; k += 2) {  // right-edge roots, ascending
            seg({1, y}, {1, k * h});
            y = k * h;
        }
        seg({1, y}, {1, 1});
    }
    seg({1, 1}, {0, 1});
    {
        double y = 1.0;
        int k0 = (m - 1) % 2 == 1 ? m - 1 : m - 2;  // odd roots, descending
        for (int k = k0; k >= 1; k -= 2) {
            seg({0, y}, {0, k * h});
            y = k * h;
        }
        seg({0, y}, {0, 0});
    }
    spec.outer_loops.push_back(loop);

    // spikes: odd k attach left, even k attach right, length 1 - 1/m
    for (int k = 1; k <= m - 1; ++k) {
        const double y = k * h;
        Chain wall;
        if (k % 2 == 1)
            wall.segments.push_back(ArcSegment::segment({0, y}, {1.0 - h, y}));
        else
            wall.segments.push_back(ArcSegment::segment({1, y}, {h, y}));
        spec.walls.push_back(wall);
    }

    // serpentine K: m runs at heights (2k-1)/(2m), connectors of length 1/m
    const double xl = 0.5 * h, xr = 1.0 - 0.5 * h;
    Chain K;
    for (int k = 1; k <= m; ++k) {
        const double y = (2 * k - 1) * 0.5 * h;
        const bool ltr = (k % 2 == 1);
        K.segments.push_back(ltr ? ArcSegment::segment({xl, y}, {xr, y})
                                 : ArcSegment::segment({xr, y}, {xl, y}));
        if (k < m) {
            const double x = ltr ? xr : xl;
            K.segments.push_back(ArcSegment::segment({x, y}, {x, y + h}));
        }
    }
    spec.compact.kind = CompactSet::Kind::Curve;
    spec.compact.curve = K;
    return spec;
}

// Gap half-angles alpha_k and gap start angles theta_k shared by the builder
// and the closed-form length.
void circular_maze_angles(int m, std::vector<double>& alpha, std::vector<double>& theta) {
    alpha.assign(m, 0.0);  // 1-based, alpha[k]
    theta.assign(m, 0.0);
    for (int k = 1; k <= m - 2; ++k) alpha[k] = 2.0 * std::asin(1.0 / (2.0 * (m - k) - 1.0));
    alpha[m - 1] = 2.0 * std::asin(0.5);
    theta[1] = alpha[1];
    for (int k = 2; k <= m - 1; ++k) theta[k] = theta[k - 1] + alpha[k];
}

CondenserSpec build_circular_maze(int m) {
    if (m < 3) throw std::invalid_argument("circular maze requires m >= 3");
    CondenserSpec spec;
    spec.family = Family::CircularMaze;
    spec.params = {{"m", static_cast<double>(m)}};

    std::vector<double> alpha, theta;
    circular_maze_angles(m, alpha, theta);
    auto rk = [&](int k) { return static_cast<double>(m - k) / m; };

    Chain disk;
    disk.closed = true;
    disk.segments.push_back(ArcSegment::arc({0, 0}, 1.0, 0.0, kTwoPi));
    spec.outer_loops.push_back(disk);

    for (int k = 1; k <= m - 1; ++k) {
        Chain arc_wall;
        arc_wall.segments.push_back(
            ArcSegment::arc({0, 0}, rk(k), theta[k] + alpha[k], theta[k] + kTwoPi));
        spec.walls.push_back(arc_wall);

        // radial wall from the gap's clockwise edge outward to the previous
        // circle (the unit circle for k=1); it splits ring k between the
        // doors at a_{k-1} and a_k, forcing the thread the long way around
        Chain radial;
        radial.segments.push_back(
            ArcSegment::segment(polar(rk(k), theta[k]), polar(rk(k - 1), theta[k])));
        spec.walls.push_back(radial);
    }

    // K: thread network. Thread arc k rides mid-corridor at R_k = r_k + 1/(2m)
    // and is interrupted only around the radial wall at theta_k; the
    // interruption half-width asin(1/(2(m-k)+1)) puts the free tips at
    // distance exactly 1/(2m) from that wall. Radial connectors drop through
    // the door centers a_k = theta_k + alpha_k/2 and land on the arcs away
    // from their tips (T junctions); the innermost connector pokes half-way
    // through the innermost door.
    const double half = 0.5 / m;
    auto Rk = [&](int k) { return rk(k) + half; };
    auto ak = [&](int k) { return theta[k] + 0.5 * alpha[k]; };

    Chain K;
    for (int k = 1; k <= m - 1; ++k) {
        const double w = std::asin(1.0 / (2.0 * (m - k) + 1.0));
        K.segments.push_back(
            ArcSegment::arc({0, 0}, Rk(k), theta[k] + w, theta[k] - w + kTwoPi));
    }
    for (int k = 1; k <= m - 2; ++k)
        K.segments.push_back(
            ArcSegment::segment(polar(Rk(k), ak(k)), polar(Rk(k + 1), ak(k))));
    K.segments.push_back(ArcSegment::segment(polar(Rk(m - 1), ak(m - 1)),
                                             polar(rk(m - 1), ak(m - 1))));
    spec.compact.kind = CompactSet::Kind::Curve;
    spec.compact.curve = K;
    return spec;
}

namespace {

// ccw (or cw) circle loop split at the given angles
Chain circle_loop(const Vec2& c, double R, std::vector<double> splits, bool ccw) {
    Chain loop;
    loop.closed = true;
    if (splits.empty()) {
        loop.segments.push_back(ccw ? ArcSegment::arc(c, R, 0.0, kTwoPi)
                                    : ArcSegment::arc(c, R, kTwoPi, 0.0));
        return loop;
    }
    for (double& a : splits) a = wrap_2pi(a);
    std::sort(splits.begin(), splits.end());
    const std::size_t n = splits.size();
    for (std::size_t i = 0; i < n; ++i) {
        double a0 = splits[i];
        double a1 = (i + 1 < n) ? splits[i + 1] : splits[0] + kTwoPi;
        loop.segments.push_back(ArcSegment::arc(c, R, a0, a1));
    }
    if (!ccw) {
        std::reverse(loop.segments.begin(), loop.segments.end());
        for (auto& s : loop.segments) std::swap(s.angle_start, s.angle_end);
    }
    return loop;
}

} // namespace

CondenserSpec build_spiked_annulus(int M, double r0, double r1, double l0, double l1) {
    if (M < 6 || M % 2 != 0) throw std::invalid_argument("spiked annulus requires even M >= 6");
    if (!(r0 > 0.0 && r0 < r1)) throw std::invalid_argument("spiked annulus requires 0 < r0 < r1");
    if (!(l0 > 0.0 && r0 + l0 < r1)) throw std::invalid_argument("inner spike length out of range");
    if (!(l1 > 0.0 && r1 - l1 > r0)) throw std::invalid_argument("outer spike length out of range");

    CondenserSpec spec;
    spec.family = Family::SpikedAnnulus;
    spec.params = {{"M", static_cast<double>(M)}, {"r0", r0}, {"r1", r1}, {"l0", l0}, {"l1", l1}};

    const double sector = kTwoPi / M;
    std::vector<double> inner_roots, outer_roots;
    for (int j = 0; j < M; ++j)
        (j % 2 == 0 ? inner_roots : outer_roots).push_back(j * sector);

    spec.outer_loops.push_back(circle_loop({0, 0}, r1, outer_roots, /*ccw=*/true));
    spec.outer_loops.push_back(circle_loop({0, 0}, r0, inner_roots, /*ccw=*/false));

    for (int j = 0; j < M; ++j) {
        const double phi = j * sector;
        Chain spike;
        if (j % 2 == 0)
            spike.segments.push_back(ArcSegment::segment(polar(r0, phi), polar(r0 + l0, phi)));
        else
            spike.segments.push_back(ArcSegment::segment(polar(r1, phi), polar(r1 - l1, phi)));
        spec.walls.push_back(spike);
    }

    // K: arcs midway between spike tips and circles, radial pieces centered
    // between adjacent spikes (half a sector from each).
    const double R0 = 0.5 * (r0 + (r1 - l1));
    const double R1 = 0.5 * ((r0 + l0) + r1);
    const double h = 0.5 * sector;

    Chain K;
    double a_prev = -h;  // midway between spikes M-1 and 0
    K.segments.push_back(ArcSegment::segment(polar(R0, a_prev), polar(R1, a_prev)));
    for (int j = 0; j <= M - 2; ++j) {
        const double phi = j * sector;
        const double R = (j % 2 == 0) ? R1 : R0;
        K.segments.push_back(ArcSegment::arc({0, 0}, R, phi - h, phi + h));
        const double a = phi + h;
        if (j % 2 == 0)
            K.segments.push_back(ArcSegment::segment(polar(R1, a), polar(R0, a)));
        else
            K.segments.push_back(ArcSegment::segment(polar(R0, a), polar(R1, a)));
    }
    spec.compact.kind = CompactSet::Kind::Curve;
    spec.compact.curve = K;
    return spec;
}

CondenserSpec build_tangent_disks(int n, double rho, double cut_radius) {
    if (n < 3) throw std::invalid_argument("tangent disks require n >= 3");
    const double r = rho * std::sin(kPi / n);
    if (!(rho > 0.0) || rho * (1.0 + std::sin(kPi / n)) >= 1.0)
        throw std::invalid_argument("tangent disks require rho*(1+sin(pi/n)) < 1");
    if (cut_radius < 0.0 || cut_radius >= r)
        throw std::invalid_argument("cut radius must satisfy 0 <= s < disk radius");

    CondenserSpec spec;
    spec.family = Family::TangentDisks;
    spec.params = {{"n", static_cast<double>(n)}, {"rho", rho}, {"s", cut_radius}};

    Chain disk;
    disk.closed = true;
    disk.segments.push_back(ArcSegment::arc({0, 0}, 1.0, 0.0, kTwoPi));
    spec.outer_loops.push_back(disk);

    spec.compact.kind = CompactSet::Kind::Region;
    const double s = cut_radius;
    auto center = [&](int j) { return polar(rho, kTwoPi * j / n); };
    auto tangency = [&](int j) { return polar(rho * std::cos(kPi / n), kPi * (2 * j + 1) / n); };
    // tangency angles as seen from disk j: tau(j, j) is t_j, tau(j, j-1) is t_{j-1}
    auto tau_next = [&](int j) { return kPi * (2 * j + 1) / n + kPi / 2; };
    auto tau_prev = [&](int j) { return kPi * (2 * j - 1) / n - kPi / 2; };

    if (s == 0.0) {
        for (int j = 0; j < n; ++j) {
            Chain loop;
            loop.closed = true;
            const double t0 = tau_prev(j), t1 = tau_next(j);
            loop.segments.push_back(ArcSegment::arc(center(j), r, t0, t1));
            loop.segments.push_back(ArcSegment::arc(center(j), r, t1, t0 + kTwoPi));
            spec.compact.region.push_back(loop);
        }
        return spec;
    }

    const double delta = 2.0 * std::asin(s / (2.0 * r));
    // angular room on the inner arc between the two notches
    const bool notches_merge = 2.0 * delta >= (kPi - kTwoPi / n) - 1e-12;

    auto cut_arc = [&](const Vec2& t, const Vec2& from, const Vec2& to) {
        const double a0 = std::atan2(from.y - t.y, from.x - t.x);
        const double a1 = std::atan2(to.y - t.y, to.x - t.x);
        return ArcSegment::arc(t, s, a0, a0 + wrap_pm(a1 - a0));
    };

    for (int j = 0; j < n; ++j) {
        const Vec2 c = center(j);
        const Vec2 tn = tangency(j), tp = tangency((j - 1 + n) % n);
        const double t0 = tau_prev(j), t1 = tau_next(j);
        Chain loop;
        loop.closed = true;
        // long arc facing the outer circle, trimmed by delta at both notches
        ArcSegment outer = ArcSegment::arc(c, r, t0 + delta, t1 - delta);
        if (notches_merge) {
            // the cut circles at t_{j-1} and t_j intersect inside the disk
            const Vec2 mid = (tp + tn) * 0.5;
            Vec2 d = tn - tp;
            const double L = d.norm();
            d = d / L;
            const Vec2 nrm{-d.y, d.x};
            const double hh = std::sqrt(std::max(0.0, s * s - 0.25 * L * L));
            const Vec2 pa = mid + nrm * hh, pb = mid - nrm * hh;
            const Vec2 P = (pa.dist(c) < pb.dist(c)) ? pa : pb;
            loop.segments.push_back(outer);
            loop.segments.push_back(cut_arc(tn, outer.end(), P));
            loop.segments.push_back(cut_arc(tp, P, outer.start()));
        } else {
            ArcSegment inner = ArcSegment::arc(c, r, t1 + delta, t0 + kTwoPi - delta);
            loop.segments.push_back(outer);
            loop.segments.push_back(cut_arc(tn, outer.end(), inner.start()));
            loop.segments.push_back(inner);
            loop.segments.push_back(cut_arc(tp, inner.end(), outer.start()));
        }
        spec.compact.region.push_back(loop);
    }
    return spec;
}

CondenserSpec build_annulus(double r0, double r1) {
    if (!(0.0 < r0 && r0 < r1)) throw std::invalid_argument("annulus requires 0 < r0 < r1");
    CondenserSpec spec;
    spec.family = Family::Custom;
    spec.custom_name = "annulus";
    spec.params = {{"r0", r0}, {"r1", r1}};
    Chain outer;
    outer.closed = true;
    outer.segments.push_back(ArcSegment::arc({0, 0}, r1, 0.0, kTwoPi));
    spec.outer_loops.push_back(outer);
    Chain hole;
    hole.closed = true;
    hole.segments.push_back(ArcSegment::arc({0, 0}, r0, 0.0, kTwoPi));
    spec.compact.kind = CompactSet::Kind::Region;
    spec.compact.region.push_back(hole);
    return spec;
}

// ===== distance queries =====

namespace {

bool arc_contains_angle(const ArcSegment& a, double phi) {
    const double sw = a.sweep();
    if (sw >= 0.0) return wrap_2pi(phi - a.angle_start) <= sw + 1e-14;
    return wrap_2pi(a.angle_start - phi) <= -sw + 1e-14;
}

double point_to_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    const Vec2 ab = b - a;
    const double L2 = ab.norm2();
    if (L2 == 0.0) return p.dist(a);
    double t = (p - a).dot(ab) / L2;
    t = std::clamp(t, 0.0, 1.0);
    return p.dist(a + ab * t);
}

double point_to_arc(const ArcSegment& s, const Vec2& p) {
    const Vec2 d = p - s.center;
    const double r = d.norm();
    if (r < 1e-300) return s.radius;
    const double phi = std::atan2(d.y, d.x);
    if (arc_contains_angle(s, phi)) return std::abs(r - s.radius);
    return std::min(p.dist(s.start()), p.dist(s.end()));
}

} // namespace

double point_to_primitive(const ArcSegment& s, const Vec2& p) {
    return s.is_arc() ? point_to_arc(s, p) : point_to_segment(s.p0, s.p1, p);
}

namespace {

// intersection points of circle (c, R) with segment [a, b]
int circle_segment_hits(const Vec2& c, double R, const Vec2& a, const Vec2& b, Vec2 out[2]) {
    const Vec2 d = b - a, f = a - c;
    const double A = d.norm2();
    if (A == 0.0) return 0;
    const double B = 2.0 * f.dot(d);
    const double C = f.norm2() - R * R;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    int cnt = 0;
    for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
        if (t >= -1e-14 && t <= 1.0 + 1e-14) out[cnt++] = a + d * t;
        if (disc == 0.0) break;
    }
    return cnt;
}

int circle_circle_hits(const Vec2& c0, double r0, const Vec2& c1, double r1, Vec2 out[2]) {
    const Vec2 d = c1 - c0;
    const double L = d.norm();
    if (L < 1e-300) return 0;  // concentric handled separately
    if (L > r0 + r1 || L < std::abs(r0 - r1)) return 0;
    const double a = (r0 * r0 - r1 * r1 + L * L) / (2.0 * L);
    const double h2 = r0 * r0 - a * a;
    const double h = std::sqrt(std::max(0.0, h2));
    const Vec2 m = c0 + d * (a / L);
    const Vec2 n{-d.y / L, d.x / L};
    out[0] = m + n * h;
    if (h <= 1e-15) return 1;
    out[1] = m - n * h;
    return 2;
}

double seg_seg_distance(const ArcSegment& s, const ArcSegment& t) {
    // proper transversal crossing: all four orientations clearly signed and
    // alternating; near-degenerate cases fall through to endpoint distances
    const Vec2 p = s.p0, r = s.p1 - s.p0, q = t.p0, u = t.p1 - t.p0;
    const double o1 = r.cross(q - p), o2 = r.cross(q + u - p);
    const double o3 = u.cross(p - q), o4 = u.cross(p + r - q);
    const double sr = r.norm(), su = u.norm();
    auto clear = [](double o, double scale) { return std::abs(o) > 1e-12 * scale; };
    if (clear(o1, sr * (q - p).norm()) && clear(o2, sr * (q + u - p).norm()) &&
        clear(o3, su * (p - q).norm()) && clear(o4, su * (p + r - q).norm()) &&
        (o1 > 0) != (o2 > 0) && (o3 > 0) != (o4 > 0))
        return 0.0;
    return std::min(std::min(point_to_segment(t.p0, t.p1, s.p0), point_to_segment(t.p0, t.p1, s.p1)),
                    std::min(point_to_segment(s.p0, s.p1, t.p0), point_to_segment(s.p0, s.p1, t.p1)));
}

double seg_arc_distance(const ArcSegment& seg, const ArcSegment& arc) {
    Vec2 hits[2];
    const int n = circle_segment_hits(arc.center, arc.radius, seg.p0, seg.p1, hits);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = hits[i] - arc.center;
        if (arc_contains_angle(arc, std::atan2(d.y, d.x))) return 0.0;
    }
    double best = std::min(point_to_arc(arc, seg.p0), point_to_arc(arc, seg.p1));
    best = std::min(best, point_to_segment(seg.p0, seg.p1, arc.start()));
    best = std::min(best, point_to_segment(seg.p0, seg.p1, arc.end()));
    // foot of the arc center on the segment: radial candidate
    const Vec2 ab = seg.p1 - seg.p0;
    const double L2 = ab.norm2();
    if (L2 > 0.0) {
        double tt = (arc.center - seg.p0).dot(ab) / L2;
        tt = std::clamp(tt, 0.0, 1.0);
        best = std::min(best, point_to_arc(arc, seg.p0 + ab * tt));
    }
    return best;
}

double arc_arc_distance(const ArcSegment& a, const ArcSegment& b) {
    const double cc = a.center.dist(b.center);
    if (cc < 1e-14) {
        // concentric: window overlap?
        auto window = [](const ArcSegment& s) {
            const double sw = s.sweep();
            return std::pair<double, double>{sw >= 0 ? wrap_2pi(s.angle_start) : wrap_2pi(s.angle_end),
                                             std::abs(sw)};
        };
        auto [w0, l0] = window(a);
        auto [w1, l1] = window(b);
        if (wrap_2pi(w1 - w0) <= l0 + 1e-14 || wrap_2pi(w0 - w1) <= l1 + 1e-14)
            return std::abs(a.radius - b.radius);
        return std::min(std::min(point_to_arc(b, a.start()), point_to_arc(b, a.end())),
                        std::min(point_to_arc(a, b.start()), point_to_arc(a, b.end())));
    }
    Vec2 hits[2];
    const int n = circle_circle_hits(a.center, a.radius, b.center, b.radius, hits);
    for (int i = 0; i < n; ++i) {
        const Vec2 da = hits[i] - a.center, db = hits[i] - b.center;
        if (arc_contains_angle(a, std::atan2(da.y, da.x)) &&
            arc_contains_angle(b, std::atan2(db.y, db.x)))
            return 0.0;
    }
    double best = std::min(std::min(point_to_arc(b, a.start()), point_to_arc(b, a.end())),
                           std::min(point_to_arc(a, b.start()), point_to_arc(a, b.end())));
    // radial alignment candidates along the center line
    const Vec2 u = (b.center - a.center) / cc;
    for (double sa : {1.0, -1.0}) {
        const Vec2 qa = a.center + u * (sa * a.radius);
        const Vec2 da = qa - a.center;
        if (!arc_contains_angle(a, std::atan2(da.y, da.x))) continue;
        best = std::min(best, point_to_arc(b, qa));
    }
    for (double sb : {1.0, -1.0}) {
        const Vec2 qb = b.center + u * (sb * b.radius);
        const Vec2 db = qb - b.center;
        if (!arc_contains_angle(b, std::atan2(db.y, db.x))) continue;
        best = std::min(best, point_to_arc(a, qb));
    }
    return best;
}

} // namespace

double primitive_distance(const ArcSegment& a, const ArcSegment& b) {
    if (!a.is_arc() && !b.is_arc()) return seg_seg_distance(a, b);
    if (!a.is_arc()) return seg_arc_distance(a, b);
    if (!b.is_arc()) return seg_arc_distance(b, a);
    return arc_arc_distance(a, b);
}

namespace {

template <typename F>
void for_each_outer_primitive(const CondenserSpec& spec, F&& f) {
    for (const auto& loop : spec.outer_loops)
        for (const auto& s : loop.segments) f(s);
    for (const auto& wall : spec.walls)
        for (const auto& s : wall.segments) f(s);
}

template <typename F>
void for_each_compact_primitive(const CondenserSpec& spec, F&& f) {
    if (spec.compact.kind == CompactSet::Kind::Curve) {
        for (const auto& s : spec.compact.curve.segments) f(s);
    } else {
        for (const auto& loop : spec.compact.region)
            for (const auto& s : loop.segments) f(s);
    }
}

// crossings of the rightward horizontal ray from p with one primitive
int ray_crossings(const ArcSegment& s, const Vec2& p) {
    if (!s.is_arc()) {
        const Vec2 a = s.p0, b = s.p1;
        if ((a.y > p.y) == (b.y > p.y)) return 0;
        const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        return x > p.x ? 1 : 0;
    }
    const double dy = p.y - s.center.y;
    if (std::abs(dy) > s.radius) return 0;
    const double dx = std::sqrt(std::max(0.0, s.radius * s.radius - dy * dy));
    int cnt = 0;
    for (double sx : {dx, -dx}) {
        const double x = s.center.x + sx;
        if (x <= p.x) continue;
        const double phi = std::atan2(dy, sx);
        if (!arc_contains_angle(s, phi)) continue;
        // crossing parity: count only if the arc actually traverses the line
        // y = p.y here; at a crossing point the tangent has nonzero y unless
        // tangent to the ray (sx == 0), which we treat as no crossing.
        if (std::abs(sx) < 1e-14) continue;
        ++cnt;
    }
    return cnt;
}

} // namespace

double distance_to_outer_primitives(const CondenserSpec& spec, const Vec2& p) {
    double best = std::numeric_limits<double>::infinity();
    for_each_outer_primitive(spec, [&](const ArcSegment& s) {
        best = std::min(best, point_to_primitive(s, p));
    });
    return best;
}

bool point_in_domain(const CondenserSpec& spec, const Vec2& p) {
    int crossings = 0;
    for (const auto& loop : spec.outer_loops)
        for (const auto& s : loop.segments) crossings += ray_crossings(s, p);
    if (crossings % 2 == 0) return false;
    for (const auto& wall : spec.walls)
        for (const auto& s : wall.segments)
            if (point_to_primitive(s, p) < kGeomTol) return false;
    return true;
}

double distance_to_boundary(const CondenserSpec& spec, const Vec2& p) {
    if (!point_in_domain(spec, p))
        throw std::domain_error("point lies outside the domain");
    return distance_to_outer_primitives(spec, p);
}

// ===== validation =====

namespace {

Vec2 tangent_at(const ArcSegment& s, bool at_end) {
    if (!s.is_arc()) {
        Vec2 d = s.p1 - s.p0;
        const double L = d.norm();
        return L > 0 ? d / L : Vec2{0, 0};
    }
    const double phi = at_end ? s.angle_end : s.angle_start;
    const double sgn = s.ccw() ? 1.0 : -1.0;
    return {-sgn * std::sin(phi), sgn * std::cos(phi)};
}

void check_chain(const Chain& c, const std::string& what, ValidationReport& rep) {
    if (c.segments.empty()) {
        rep.errors.push_back(what + ": empty chain");
        return;
    }
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
        const auto& s = c.segments[i];
        if (s.length() <= kGeomTol) rep.errors.push_back(what + ": zero-length piece");
        if (s.is_arc()) {
            if (s.radius <= 0.0) rep.errors.push_back(what + ": non-positive arc radius");
            const double sw = std::abs(s.sweep());
            if (sw <= 0.0 || sw > kTwoPi + 1e-9)
                rep.errors.push_back(what + ": arc sweep out of (0, 2pi]");
        }
        if (i + 1 < c.segments.size()) {
            if (s.end().dist(c.segments[i + 1].start()) > kGeomTol)
                rep.errors.push_back(what + ": discontinuous at piece " + std::to_string(i));
        }
    }
    if (c.closed && c.end().dist(c.start()) > kGeomTol)
        rep.errors.push_back(what + ": loop does not close");
    // self-intersection: non-adjacent pieces must stay apart
    const std::size_t n = c.segments.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 2; j < n; ++j) {
            if (c.closed && i == 0 && j == n - 1) continue;  // adjacent around the loop
            if (primitive_distance(c.segments[i], c.segments[j]) < kGeomTol) {
                rep.errors.push_back(what + ": self-intersection between pieces " +
                                     std::to_string(i) + " and " + std::to_string(j));
            }
        }
}

bool endpoint_touches(const ArcSegment& a, const ArcSegment& b) {
    for (const Vec2& p : {a.start(), a.end()})
        if (point_to_primitive(b, p) < 1e-9) return true;
    for (const Vec2& p : {b.start(), b.end()})
        if (point_to_primitive(a, p) < 1e-9) return true;
    return false;
}

// A compact curve is a connected network of pieces, not necessarily a single
// walk: an endpoint may weld to another endpoint or land mid-piece (a T
// junction, as in the circular maze where radial connectors meet the thread
// arcs away from their tips). Pieces must be sane, touch only at endpoints,
// and form one connected set.
void check_compact_network(const Chain& c, ValidationReport& rep) {
    const auto& segs = c.segments;
    if (segs.empty()) {
        rep.errors.push_back("compact curve: empty chain");
        return;
    }
    for (const auto& s : segs) {
        if (s.length() <= kGeomTol) rep.errors.push_back("compact curve: zero-length piece");
        if (s.is_arc()) {
            if (s.radius <= 0.0) rep.errors.push_back("compact curve: non-positive arc radius");
            const double sw = std::abs(s.sweep());
            if (sw <= 0.0 || sw > kTwoPi + 1e-9)
                rep.errors.push_back("compact curve: arc sweep out of (0, 2pi]");
        }
    }
    const std::size_t n = segs.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (primitive_distance(segs[i], segs[j]) >= kGeomTol) continue;
            if (!endpoint_touches(segs[i], segs[j])) {
                rep.errors.push_back("compact curve: pieces " + std::to_string(i) + " and " +
                                     std::to_string(j) + " cross away from junctions");
                continue;
            }
            parent[find(i)] = find(j);
        }
    for (std::size_t i = 0; i < n; ++i)
        if (find(i) != find(0)) {
            rep.errors.push_back("compact curve: pieces do not form a connected set");
            break;
        }
}

} // namespace

ValidationReport validate_spec(const CondenserSpec& spec) {
    ValidationReport rep;
    if (spec.outer_loops.empty()) rep.errors.push_back("no outer loops");
    int idx = 0;
    for (const auto& loop : spec.outer_loops) {
        if (!loop.closed) rep.errors.push_back("outer loop not marked closed");
        check_chain(loop, "outer loop " + std::to_string(idx++), rep);
    }
    idx = 0;
    for (const auto& wall : spec.walls) check_chain(wall, "wall " + std::to_string(idx++), rep);
    if (spec.compact.kind == CompactSet::Kind::Curve) {
        check_compact_network(spec.compact.curve, rep);
    } else {
        idx = 0;
        for (const auto& loop : spec.compact.region) {
            if (!loop.closed) rep.errors.push_back("compact loop not marked closed");
            check_chain(loop, "compact loop " + std::to_string(idx++), rep);
        }
    }

    // outer network: distinct chains may touch only where an endpoint lies on
    // the other chain (spike roots, junctions of the wall tree)
    std::vector<const Chain*> outer_chains;
    for (const auto& l : spec.outer_loops) outer_chains.push_back(&l);
    for (const auto& w : spec.walls) outer_chains.push_back(&w);
    for (std::size_t i = 0; i < outer_chains.size(); ++i)
        for (std::size_t j = i + 1; j < outer_chains.size(); ++j)
            for (const auto& sa : outer_chains[i]->segments)
                for (const auto& sb : outer_chains[j]->segments)
                    if (primitive_distance(sa, sb) < kGeomTol && !endpoint_touches(sa, sb))
                        rep.errors.push_back("outer chains cross away from junctions");

    // compact loops may touch each other only at shared endpoints (tangencies)
    if (spec.compact.kind == CompactSet::Kind::Region) {
        const auto& loops = spec.compact.region;
        for (std::size_t i = 0; i < loops.size(); ++i)
            for (std::size_t j = i + 1; j < loops.size(); ++j)
                for (const auto& sa : loops[i].segments)
                    for (const auto& sb : loops[j].segments)
                        if (primitive_distance(sa, sb) < kGeomTol && !endpoint_touches(sa, sb))
                            rep.errors.push_back("compact loops cross");
    }

    double clearance = std::numeric_limits<double>::infinity();
    for_each_compact_primitive(spec, [&](const ArcSegment& ck) {
        for_each_outer_primitive(spec, [&](const ArcSegment& so) {
            clearance = std::min(clearance, primitive_distance(ck, so));
        });
    });
    rep.clearance = clearance;
    if (!(clearance > kGeomTol)) rep.errors.push_back("compact set touches the outer boundary");

    rep.valid = rep.errors.empty();
    return rep;
}

std::vector<SingularPoint> singular_points(const CondenserSpec& spec) {
    std::vector<SingularPoint> out;
    auto attached = [&](const Vec2& p, const Chain* self) {
        bool hit = false;
        auto probe = [&](const Chain& c) {
            if (&c == self) return;
            for (const auto& s : c.segments)
                if (point_to_primitive(s, p) < 1e-9) hit = true;
        };
        for (const auto& l : spec.outer_loops) probe(l);
        for (const auto& w : spec.walls) probe(w);
        return hit;
    };
    for (const auto& wall : spec.walls) {
        for (const Vec2& p : {wall.start(), wall.end()}) {
            out.push_back({p, attached(p, &wall) ? SingularPoint::Kind::SlitRoot
                                                 : SingularPoint::Kind::SlitTip});
        }
    }
    if (spec.compact.kind == CompactSet::Kind::Curve) {
        // free piece ends are r^{1/2} points, welded endpoint pairs with a
        // tangent break are r^{2/3} corners, and ends landing mid-piece (T
        // junctions) stay regular: every sector such a junction cuts the
        // neighbourhood into has opening at most pi
        const auto& segs = spec.compact.curve.segments;
        const std::size_t n = segs.size();
        auto into = [&](std::size_t i, bool at_end) {
            const Vec2 t = tangent_at(segs[i], at_end);
            return at_end ? Vec2{-t.x, -t.y} : t;
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (const bool at_end : {false, true}) {
                const Vec2 p = at_end ? segs[i].end() : segs[i].start();
                bool mid_contact = false;
                std::size_t mate = n;
                bool mate_at_end = false;
                for (std::size_t j = 0; j < n && !mid_contact; ++j) {
                    if (j == i) continue;
                    if (point_to_primitive(segs[j], p) >= 1e-9) continue;
                    if (p.dist(segs[j].start()) < 1e-9) {
                        mate = j;
                        mate_at_end = false;
                    } else if (p.dist(segs[j].end()) < 1e-9) {
                        mate = j;
                        mate_at_end = true;
                    } else {
                        mid_contact = true;
                    }
                }
                if (mid_contact) continue;
                if (mate == n) {
                    out.push_back({p, SingularPoint::Kind::ChainEnd});
                    continue;
                }
                if (i > mate) continue;  // report each weld once
                const Vec2 a = into(i, at_end), b = into(mate, mate_at_end);
                if (std::abs(a.cross(b)) > 1e-9 || a.dot(b) > 0.0)
                    out.push_back({p, SingularPoint::Kind::ChainCorner});
            }
        }
    } else {
        const auto& loops = spec.compact.region;
        // loop corners (cut notches)
        for (const auto& loop : loops) {
            const std::size_t n = loop.segments.size();
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = loop.segments[i];
                const auto& b = loop.segments[(i + 1) % n];
                if (!loop.closed && i + 1 == n) break;
                const Vec2 t0 = tangent_at(a, true), t1 = tangent_at(b, false);
                if (std::abs(t0.cross(t1)) > 1e-9 || t0.dot(t1) < 0.0)
                    out.push_back({a.end(), SingularPoint::Kind::CutCorner});
            }
        }
        // tangency cusps: endpoints shared between two loops
        for (std::size_t i = 0; i < loops.size(); ++i)
            for (std::size_t j = i + 1; j < loops.size(); ++j)
                for (const auto& sa : loops[i].segments)
                    for (const Vec2& p : {sa.start(), sa.end()})
                        for (const auto& sb : loops[j].segments)
                            for (const Vec2& q : {sb.start(), sb.end()})
                                if (p.dist(q) < 1e-9)
                                    out.push_back({p, SingularPoint::Kind::Cusp});
    }
    // dedupe coincident entries
    std::vector<SingularPoint> uniq;
    for (const auto& sp : out) {
        bool dup = false;
        for (const auto& u : uniq)
            if (u.p.dist(sp.p) < 1e-9 && u.kind == sp.kind) dup = true;
        if (!dup) uniq.push_back(sp);
    }
    return uniq;
}

namespace {

double loop_area(const Chain& loop) {
    double area = 0.0;
    for (const auto& s : loop.segments) {
        if (s.is_arc()) {
            const Vec2 p0 = s.start(), p1 = s.end();
            area += 0.5 * (s.center.cross(p1 - p0) + s.radius * s.radius * s.sweep());
        } else {
            area += 0.5 * s.p0.cross(s.p1);
        }
    }
    return area;
}

} // namespace

double domain_area(const CondenserSpec& spec) {
    double area = 0.0;
    for (const auto& loop : spec.outer_loops) area += loop_area(loop);
    if (spec.compact.kind == CompactSet::Kind::Region)
        for (const auto& loop : spec.compact.region) area -= loop_area(loop);
    return area;
}

CondenserSpec rotate_spec(const CondenserSpec& spec, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    auto rot = [&](const Vec2& p) { return Vec2{c * p.x - s * p.y, s * p.x + c * p.y}; };
    auto rot_seg = [&](ArcSegment seg) {
        if (seg.is_arc()) {
            seg.center = rot(seg.center);
            seg.angle_start += angle;
            seg.angle_end += angle;
        } else {
            seg.p0 = rot(seg.p0);
            seg.p1 = rot(seg.p1);
        }
        return seg;
    };
    CondenserSpec out = spec;
    auto rot_chain = [&](Chain& ch) {
        for (auto& seg : ch.segments) seg = rot_seg(seg);
    };
    for (auto& l : out.outer_loops) rot_chain(l);
    for (auto& w : out.walls) rot_chain(w);
    rot_chain(out.compact.curve);
    for (auto& l : out.compact.region) rot_chain(l);
    return out;
}

// ===== circular-arc triangle =====

ArcTriangle arc_triangle(double theta) {
    if (!(theta > 0.0 && theta <= kPi / 6.0 + 1e-15))
        throw std::invalid_argument("arc triangle requires theta in (0, pi/6]");
    ArcTriangle tri;
    tri.theta = theta;
    const double ru = std::tan(theta);
    tri.u = Cplx(1.0, ru);
    tri.v = tri.u + std::polar(ru, theta);
    const double re_v = tri.v.real();
    tri.w = Cplx(std::norm(tri.v) / re_v, 0.0);
    const Cplx vw = tri.v - tri.w;
    tri.beta = std::arg(vw);

    tri.s1 = ArcSegment::arc({1.0, ru}, ru, 1.5 * kPi, kTwoPi + theta);
    tri.s2 = ArcSegment::arc({1.0, -ru}, ru, -(kTwoPi + theta), -1.5 * kPi);
    tri.s3 = ArcSegment::arc({tri.w.real(), 0.0}, std::abs(vw), kTwoPi + tri.beta,
                             kTwoPi - tri.beta);
    return tri;
}

ArcSegment cut_subarc(double theta, double s) {
    const ArcTriangle tri = arc_triangle(theta);
    const double limit = std::abs(tri.v - tri.w) / 3.0;
    if (!(s > 0.0 && s < limit))
        throw std::invalid_argument("cut radius must satisfy 0 < s < |v - w|/3");
    const double theta2 = 2.0 * std::atan(s / std::tan(theta));
    return ArcSegment::arc({1.0, std::tan(theta)}, std::tan(theta), 1.5 * kPi,
                           1.5 * kPi + theta2);
}

bool triangle_contains(const ArcTriangle& tri, const Cplx& z, double tol) {
    const double ru = std::tan(tri.theta);
    if (std::abs(z - tri.u) < ru - tol) return false;
    if (std::abs(z - std::conj(tri.u)) < ru - tol) return false;
    return std::abs(z - tri.w) <= std::abs(tri.v - tri.w) + tol;
}

} // namespace mazecap
