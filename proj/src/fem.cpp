#include "mazecap/fem.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mazecap {

namespace {

std::uint64_t ekey(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Node numbering: mesh vertices first, then (for P2) one node per edge in
// order of first appearance in the triangle list. The hash map is only used
// for lookup, so the numbering does not depend on hashing details.
struct NodeTable {
    int order = 2;
    int nodes = 0;
    std::vector<std::array<int, 6>> elem;       // per triangle; first 3 for P1
    std::vector<std::array<int, 2>> edge_ends;  // per edge node, its endpoints
};

NodeTable build_nodes(const Mesh& mesh, int order) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("fem: order must be 1 or 2");
    if (mesh.triangles.empty()) throw std::invalid_argument("fem: empty mesh");
    NodeTable nt;
    nt.order = order;
    nt.nodes = static_cast<int>(mesh.vertices.size());
    const int ntri = static_cast<int>(mesh.triangles.size());
    nt.elem.resize(ntri);
    for (int t = 0; t < ntri; ++t)
        for (int k = 0; k < 3; ++k) nt.elem[t][k] = mesh.triangles[t][k];
    if (order == 1) return nt;
    std::unordered_map<std::uint64_t, int> ids;
    ids.reserve(mesh.triangles.size() * 2);
    for (int t = 0; t < ntri; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            const auto [it, fresh] = ids.try_emplace(ekey(tri[k], tri[(k + 1) % 3]), nt.nodes);
            if (fresh) {
                nt.edge_ends.push_back({tri[k], tri[(k + 1) % 3]});
                ++nt.nodes;
            }
            nt.elem[t][3 + k] = it->second;
        }
    }
    return nt;
}

// Local stiffness, row-major ln x ln, node order v0 v1 v2 [e01 e12 e20].
// grad(lambda_i) = rot90(p_{i+2} - p_{i+1}) / (2A). P1 gradients are constant;
// P2 uses the three edge-midpoint quadrature points, which integrate the
// quadratic integrand grad(Ni).grad(Nj) exactly.
void element_stiffness(const Vec2& p0, const Vec2& p1, const Vec2& p2, int order,
                       double* K) {
    const double two_a = (p1 - p0).cross(p2 - p0);
    const Vec2 g[3] = {Vec2{p1.y - p2.y, p2.x - p1.x} / two_a,
                       Vec2{p2.y - p0.y, p0.x - p2.x} / two_a,
                       Vec2{p0.y - p1.y, p1.x - p0.x} / two_a};
    const double area = 0.5 * two_a;
    if (order == 1) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) K[i * 3 + j] = area * g[i].dot(g[j]);
        return;
    }
    std::fill(K, K + 36, 0.0);
    const double w = area / 3.0;
    for (int q = 0; q < 3; ++q) {
        double lam[3] = {0.0, 0.0, 0.0};
        lam[q] = 0.5;
        lam[(q + 1) % 3] = 0.5;
        Vec2 gn[6];
        for (int i = 0; i < 3; ++i) gn[i] = g[i] * (4.0 * lam[i] - 1.0);
        for (int e = 0; e < 3; ++e) {
            const int i = e, j = (e + 1) % 3;
            gn[3 + e] = (g[j] * lam[i] + g[i] * lam[j]) * 4.0;
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) K[i * 6 + j] += w * gn[i].dot(gn[j]);
    }
}

double element_energy(const Vec2& p0, const Vec2& p1, const Vec2& p2, int order,
                      const double* un) {
    const double two_a = (p1 - p0).cross(p2 - p0);
    const Vec2 g[3] = {Vec2{p1.y - p2.y, p2.x - p1.x} / two_a,
                       Vec2{p2.y - p0.y, p0.x - p2.x} / two_a,
                       Vec2{p0.y - p1.y, p1.x - p0.x} / two_a};
    const double area = 0.5 * two_a;
    if (order == 1) {
        const Vec2 du = g[0] * un[0] + g[1] * un[1] + g[2] * un[2];
        return area * du.norm2();
    }
    double e = 0.0;
    const double w = area / 3.0;
    for (int q = 0; q < 3; ++q) {
        double lam[3] = {0.0, 0.0, 0.0};
        lam[q] = 0.5;
        lam[(q + 1) % 3] = 0.5;
        Vec2 du{0.0, 0.0};
        for (int i = 0; i < 3; ++i) du = du + g[i] * ((4.0 * lam[i] - 1.0) * un[i]);
        for (int e2 = 0; e2 < 3; ++e2) {
            const int i = e2, j = (e2 + 1) % 3;
            du = du + (g[j] * lam[i] + g[i] * lam[j]) * (4.0 * un[3 + e2]);
        }
        e += w * du.norm2();
    }
    return e;
}

double boundary_value(EdgeTag tag) {
    return (tag == EdgeTag::Compact || tag == EdgeTag::CompactRegion) ? 1.0 : 0.0;
}

FemSystem assemble_impl(const Mesh& mesh, int order, bool parallel) {
    const NodeTable nt = build_nodes(mesh, order);
    const int nv = static_cast<int>(mesh.vertices.size());
    const int ntri = static_cast<int>(mesh.triangles.size());
    const int ln = (order == 1) ? 3 : 6;
    for (int t = 0; t < ntri; ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec2& a = mesh.vertices[tri[0]];
        if ((mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a) <= 1e-300)
            throw std::invalid_argument("fem: degenerate triangle");
    }

    FemSystem sys;
    sys.order = order;
    sys.nodes = nt.nodes;
    sys.node_pos.resize(nt.nodes);
    for (int v = 0; v < nv; ++v) sys.node_pos[v] = mesh.vertices[v];
    for (int e = 0; e < static_cast<int>(nt.edge_ends.size()); ++e)
        sys.node_pos[nv + e] = (mesh.vertices[nt.edge_ends[e][0]] +
                                mesh.vertices[nt.edge_ends[e][1]]) * 0.5;

    // Dirichlet data. Vertices are pinned by their tag; P2 mid-edge nodes are
    // pinned only when the edge itself is a boundary constraint. An interior
    // edge whose two endpoints happen to sit on the boundary stays free.
    sys.dirichlet.assign(nt.nodes, 0.0);
    std::vector<char> fixed(nt.nodes, 0);
    for (int v = 0; v < nv; ++v) {
        if (mesh.vtags[v] == VertexTag::Outer) fixed[v] = 1;
        if (mesh.vtags[v] == VertexTag::Compact) {
            fixed[v] = 1;
            sys.dirichlet[v] = 1.0;
        }
    }
    if (order == 2) {
        std::unordered_map<std::uint64_t, EdgeTag> con_tag;
        con_tag.reserve(mesh.constraints.size() * 2);
        for (const MeshConstraint& c : mesh.constraints) con_tag[ekey(c.a, c.b)] = c.tag;
        for (int e = 0; e < static_cast<int>(nt.edge_ends.size()); ++e) {
            const auto it = con_tag.find(ekey(nt.edge_ends[e][0], nt.edge_ends[e][1]));
            if (it == con_tag.end()) continue;
            fixed[nv + e] = 1;
            sys.dirichlet[nv + e] = boundary_value(it->second);
        }
    }
    sys.dof.assign(nt.nodes, -1);
    for (int n = 0; n < nt.nodes; ++n)
        if (!fixed[n]) sys.dof[n] = sys.free_count++;
    if (sys.free_count == 0) throw std::runtime_error("fem: no free nodes");

    // free-free sparsity: per-row duplicate lists, then sort + unique
    const int nf = sys.free_count;
    std::vector<int> dup_ptr(nf + 1, 0);
    for (int t = 0; t < ntri; ++t)
        for (int i = 0; i < ln; ++i) {
            const int fi = sys.dof[nt.elem[t][i]];
            if (fi < 0) continue;
            for (int j = 0; j < ln; ++j)
                if (sys.dof[nt.elem[t][j]] >= 0) ++dup_ptr[fi + 1];
        }
    for (int r = 0; r < nf; ++r) dup_ptr[r + 1] += dup_ptr[r];
    std::vector<int> dup_col(dup_ptr[nf]);
    {
        std::vector<int> cur(dup_ptr.begin(), dup_ptr.end() - 1);
        for (int t = 0; t < ntri; ++t)
            for (int i = 0; i < ln; ++i) {
                const int fi = sys.dof[nt.elem[t][i]];
                if (fi < 0) continue;
                for (int j = 0; j < ln; ++j) {
                    const int fj = sys.dof[nt.elem[t][j]];
                    if (fj >= 0) dup_col[cur[fi]++] = fj;
                }
            }
    }
    sys.row_ptr.assign(nf + 1, 0);
    for (int r = 0; r < nf; ++r) {
        const auto first = dup_col.begin() + dup_ptr[r];
        const auto last = dup_col.begin() + dup_ptr[r + 1];
        std::sort(first, last);
        sys.row_ptr[r + 1] =
            sys.row_ptr[r] + static_cast<int>(std::unique(first, last) - first);
    }
    sys.col.resize(sys.row_ptr[nf]);
    for (int r = 0; r < nf; ++r)
        std::copy_n(dup_col.begin() + dup_ptr[r], sys.row_ptr[r + 1] - sys.row_ptr[r],
                    sys.col.begin() + sys.row_ptr[r]);
    dup_col.clear();
    dup_col.shrink_to_fit();

    // Element matrices may be computed in parallel; the scatter below walks
    // elements in index order on one thread, so the assembled values are
    // bitwise identical whatever the thread count.
    std::vector<double> loc(static_cast<std::size_t>(ntri) * ln * ln);
    auto kernel = [&](int t) {
        const auto& tri = mesh.triangles[t];
        element_stiffness(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                          mesh.vertices[tri[2]], order,
                          loc.data() + static_cast<std::size_t>(t) * ln * ln);
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < ntri; ++t) kernel(t);
    } else {
        for (int t = 0; t < ntri; ++t) kernel(t);
    }
#else
    (void)parallel;
    for (int t = 0; t < ntri; ++t) kernel(t);
#endif

    sys.val.assign(sys.col.size(), 0.0);
    sys.load.assign(nf, 0.0);
    auto entry = [&](int r, int c) -> double& {
        const auto first = sys.col.begin() + sys.row_ptr[r];
        const auto last = sys.col.begin() + sys.row_ptr[r + 1];
        return sys.val[std::lower_bound(first, last, c) - sys.col.begin()];
    };
    for (int t = 0; t < ntri; ++t) {
        const double* K = loc.data() + static_cast<std::size_t>(t) * ln * ln;
        for (int i = 0; i < ln; ++i) {
            const int ni = nt.elem[t][i];
            const int fi = sys.dof[ni];
            for (int j = 0; j < ln; ++j) {
                const int nj = nt.elem[t][j];
                const int fj = sys.dof[nj];
                const double k = K[i * ln + j];
                if (fi >= 0 && fj >= 0)
                    entry(fi, fj) += k;
                else if (fi >= 0)
                    sys.load[fi] -= k * sys.dirichlet[nj];
                else if (fj < 0)
                    sys.lift_energy += sys.dirichlet[ni] * k * sys.dirichlet[nj];
            }
        }
    }
    return sys;
}

void matvec(const FemSystem& sys, const std::vector<double>& x, std::vector<double>& y) {
    const int n = sys.free_count;
    // one row per output entry: summation order inside a row is fixed, so the
    // result does not depend on the thread count
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int ii = sys.row_ptr[r]; ii < sys.row_ptr[r + 1]; ++ii)
            s += sys.val[ii] * x[sys.col[ii]];
        y[r] = s;
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Incomplete Cholesky on the lower-triangular pattern of the free block.
// Rows keep their diagonal as the last entry. The strict upper transpose is
// stored separately for the backward solve.
struct IcFactor {
    int n = 0;
    std::vector<int> lp, lc;
    std::vector<double> lv;
    std::vector<double> diag;
    std::vector<int> up, uc;
    std::vector<double> uv;
};

IcFactor ic_factor(const FemSystem& sys) {
    const int n = sys.free_count;
    IcFactor f;
    f.n = n;
    f.lp.assign(n + 1, 0);
    for (int r = 0; r < n; ++r)
        for (int ii = sys.row_ptr[r]; ii < sys.row_ptr[r + 1]; ++ii)
            if (sys.col[ii] <= r) ++f.lp[r + 1];
    for (int r = 0; r < n; ++r) f.lp[r + 1] += f.lp[r];
    f.lc.resize(f.lp[n]);
    std::vector<double> base(f.lp[n]);
    {
        int k = 0;
        for (int r = 0; r < n; ++r)
            for (int ii = sys.row_ptr[r]; ii < sys.row_ptr[r + 1]; ++ii)
                if (sys.col[ii] <= r) {
                    f.lc[k] = sys.col[ii];
                    base[k++] = sys.val[ii];
                }
    }
    double max_diag = 0.0;
    for (int r = 0; r < n; ++r) max_diag = std::max(max_diag, base[f.lp[r + 1] - 1]);

    f.lv.resize(base.size());
    double boost = 0.0;
    for (int attempt = 0;; ++attempt) {
        f.lv = base;
        if (boost > 0.0)
            for (int r = 0; r < n; ++r) f.lv[f.lp[r + 1] - 1] += boost;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int ii = f.lp[i]; ii < f.lp[i + 1]; ++ii) {
                const int k = f.lc[ii];
                double s = f.lv[ii];
                int a = f.lp[i];
                int b = f.lp[k];
                const int bend = f.lp[k + 1] - 1;
                while (a < ii && b < bend) {
                    if (f.lc[a] < f.lc[b])
                        ++a;
                    else if (f.lc[a] > f.lc[b])
                        ++b;
                    else
                        s -= f.lv[a++] * f.lv[b++];
                }
                if (k == i) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    f.lv[ii] = std::sqrt(s);
                } else {
                    f.lv[ii] = s / f.lv[f.lp[k + 1] - 1];
                }
            }
        }
        if (ok) break;
        if (attempt >= 50) throw std::runtime_error("fem: incomplete cholesky failed");
        boost = (boost == 0.0) ? 1e-10 * max_diag : boost * 10.0;
    }

    f.diag.resize(n);
    for (int r = 0; r < n; ++r) f.diag[r] = f.lv[f.lp[r + 1] - 1];
    f.up.assign(n + 1, 0);
    for (int r = 0; r < n; ++r)
        for (int ii = f.lp[r]; ii < f.lp[r + 1] - 1; ++ii) ++f.up[f.lc[ii] + 1];
    for (int c = 0; c < n; ++c) f.up[c + 1] += f.up[c];
    f.uc.resize(f.up[n]);
    f.uv.resize(f.up[n]);
    {
        std::vector<int> cur(f.up.begin(), f.up.end() - 1);
        for (int r = 0; r < n; ++r)
            for (int ii = f.lp[r]; ii < f.lp[r + 1] - 1; ++ii) {
                const int c = f.lc[ii];
                f.uc[cur[c]] = r;
                f.uv[cur[c]++] = f.lv[ii];
            }
    }
    return f;
}

void ic_apply(const IcFactor& f, const std::vector<double>& r, std::vector<double>& z,
              std::vector<double>& tmp) {
    for (int i = 0; i < f.n; ++i) {
        double s = r[i];
        for (int ii = f.lp[i]; ii < f.lp[i + 1] - 1; ++ii) s -= f.lv[ii] * tmp[f.lc[ii]];
        tmp[i] = s / f.diag[i];
    }
    for (int i = f.n - 1; i >= 0; --i) {
        double s = tmp[i];
        for (int ii = f.up[i]; ii < f.up[i + 1]; ++ii) s -= f.uv[ii] * z[f.uc[ii]];
        z[i] = s / f.diag[i];
    }
}

double energy_impl(const Mesh& mesh, const PotentialField& u, bool parallel) {
    const NodeTable nt = build_nodes(mesh, u.order);
    if (static_cast<int>(u.values.size()) != nt.nodes)
        throw std::invalid_argument("fem: field does not match mesh");
    const int ntri = static_cast<int>(mesh.triangles.size());
    const int ln = (u.order == 1) ? 3 : 6;
    std::vector<double> part(ntri);
    auto kernel = [&](int t) {
        double un[6];
        for (int i = 0; i < ln; ++i) un[i] = u.values[nt.elem[t][i]];
        const auto& tri = mesh.triangles[t];
        part[t] = element_energy(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                 mesh.vertices[tri[2]], u.order, un);
    };
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < ntri; ++t) kernel(t);
    } else {
        for (int t = 0; t < ntri; ++t) kernel(t);
    }
#else
    (void)parallel;
    for (int t = 0; t < ntri; ++t) kernel(t);
#endif
    double sum = 0.0;  // fixed order, independent of thread count
    for (int t = 0; t < ntri; ++t) sum += part[t];
    return sum;
}

}  // namespace

FemSystem assemble(const Mesh& mesh, int order) { return assemble_impl(mesh, order, true); }

FemSystem assemble_reference(const Mesh& mesh, int order) {
    return assemble_impl(mesh, order, false);
}

PotentialField solve_potential(const FemSystem& sys, double rel_tol) {
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("solve_potential: rel_tol must be positive");
    const int n = sys.free_count;
    PotentialField u;
    u.order = sys.order;
    u.values = sys.dirichlet;
    const double bnorm = std::sqrt(dot(sys.load, sys.load));
    if (bnorm == 0.0) return u;

    const IcFactor f = ic_factor(sys);
    std::vector<double> x(n, 0.0), r(sys.load), z(n), p(n), q(n), tmp(n);
    ic_apply(f, r, z, tmp);
    p = z;
    double rz = dot(r, z);
    constexpr int max_iter = 200000;
    int it = 1;
    for (;; ++it) {
        matvec(sys, p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) throw std::runtime_error("fem: system is not positive definite");
        const double alpha = rz / pq;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
        if (std::sqrt(dot(r, r)) <= rel_tol * bnorm) break;
        if (it >= max_iter)
            throw std::runtime_error("fem: cg failed to converge after " +
                                     std::to_string(it) + " iterations");
        ic_apply(f, r, z, tmp);
        const double rz2 = dot(r, z);
        const double beta = rz2 / rz;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        rz = rz2;
    }
    u.cg_iterations = it;
    for (int node = 0; node < sys.nodes; ++node)
        if (sys.dof[node] >= 0) u.values[node] = x[sys.dof[node]];
    return u;
}

double dirichlet_energy(const Mesh& mesh, const PotentialField& u) {
    return energy_impl(mesh, u, true);
}

double dirichlet_energy_reference(const Mesh& mesh, const PotentialField& u) {
    return energy_impl(mesh, u, false);
}

double energy_from_system(const FemSystem& sys, const PotentialField& u) {
    if (static_cast<int>(u.values.size()) != sys.nodes)
        throw std::invalid_argument("fem: field does not match system");
    const int n = sys.free_count;
    std::vector<double> x(n), y(n);
    for (int node = 0; node < sys.nodes; ++node)
        if (sys.dof[node] >= 0) x[sys.dof[node]] = u.values[node];
    matvec(sys, x, y);
    // u^T A u split by free/fixed blocks; load already holds -A_fc g
    double e = sys.lift_energy;
    for (int i = 0; i < n; ++i) e += x[i] * (y[i] - 2.0 * sys.load[i]);
    return e;
}

Mesh capacity_mesh(const CondenserSpec& spec, const CapacityOptions& opt) {
    if (!(opt.chord_div >= 2.0))
        throw std::invalid_argument("capacity_mesh: chord_div must be >= 2");
    if (!(opt.area_div > 0.0))
        throw std::invalid_argument("capacity_mesh: area_div must be positive");
    const ValidationReport report = validate_spec(spec);
    if (!report.valid)
        throw std::invalid_argument("capacity_mesh: invalid spec: " + report.errors.front());
    const double cl = report.clearance;
    const Pslg pslg = discretize_boundary(spec, cl / opt.chord_div);
    Mesh m = triangulate(pslg, cl * cl / opt.area_div);

    // Grade into the field singularities: strongest at slit tips and free
    // chain ends, weaker at reentrant corners, mildest where a wall roots
    // into another boundary piece. Tangency cusps take the mid grading: the
    // wedge between tangent disks has the same Dirichlet value on both
    // sides, so it carries almost no energy, and its width shrinks like
    // x^2/r, so slit-tip-depth rings would degenerate into flat slivers.
    std::vector<Vec2> deep, mid, shallow;
    for (const SingularPoint& sp : singular_points(spec)) {
        switch (sp.kind) {
            case SingularPoint::Kind::SlitTip:
            case SingularPoint::Kind::ChainEnd:
                deep.push_back(sp.p);
                break;
            case SingularPoint::Kind::Cusp:
            case SingularPoint::Kind::ChainCorner:
            case SingularPoint::Kind::CutCorner:
                mid.push_back(sp.p);
                break;
            case SingularPoint::Kind::SlitRoot:
                shallow.push_back(sp.p);
                break;
        }
    }
    if (!deep.empty()) m = refine_corners(m, deep, 0.15, 6);
    if (!mid.empty()) m = refine_corners(m, mid, 0.25, 4);
    if (!shallow.empty()) m = refine_corners(m, shallow, 0.25, 2);
    return m;
}

namespace {

// Aitken extrapolation of the last three level values; falls back to the
// last increment when the sequence is not yet in its geometric regime.
void extrapolate(CapacityResult& res) {
    const int nlev = static_cast<int>(res.levels.size());
    const double fine = res.levels[nlev - 1].capacity;
    res.dofs = res.levels[nlev - 1].dofs;
    res.value = fine;
    if (nlev == 1) {
        res.est_rel_error = std::numeric_limits<double>::infinity();
        return;
    }
    bool extrapolated = false;
    if (nlev >= 3) {
        const double c0 = res.levels[nlev - 3].capacity;
        const double c1 = res.levels[nlev - 2].capacity;
        const double denom = (fine - c1) - (c1 - c0);
        if (std::abs(denom) > 1e-14 * std::abs(fine)) {
            const double ext = fine - (fine - c1) * (fine - c1) / denom;
            if (std::isfinite(ext) && std::abs(ext - fine) <= 10.0 * std::abs(fine - c1)) {
                res.value = ext;
                extrapolated = true;
            }
        }
    }
    const double prev = res.levels[nlev - 2].capacity;
    res.est_rel_error = extrapolated
                            ? std::abs(res.value - fine) / std::max(std::abs(res.value), 1e-300)
                            : std::abs(fine - prev) / std::max(std::abs(fine), 1e-300);
}

}  // namespace

CapacityResult compute_capacity(const CondenserSpec& spec, const CapacityOptions& opt) {
    if (opt.refinements < 0)
        throw std::invalid_argument("compute_capacity: refinements must be >= 0");
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    };
    Mesh m = capacity_mesh(spec, opt);
    CapacityResult res;
    for (int lev = 0; lev <= opt.refinements; ++lev) {
        if (lev > 0) m = refine_uniform(m);
        const auto t0 = clock::now();
        const FemSystem sys = assemble(m, opt.order);
        const auto t1 = clock::now();
        const PotentialField u = solve_potential(sys);
        const auto t2 = clock::now();
        const double cap = dirichlet_energy(m, u);
        const double cap_mat = energy_from_system(sys, u);
        const auto t3 = clock::now();
        if (!(std::abs(cap - cap_mat) <= 1e-10 * std::max(1.0, std::abs(cap))))
            throw std::runtime_error("fem: energy routes disagree");
        res.levels.push_back({lev, sys.free_count, cap, seconds(t0, t1), seconds(t1, t2),
                              seconds(t2, t3)});
        extrapolate(res);
        if (opt.target_rel_err > 0.0 && lev >= 1 &&
            res.est_rel_error <= opt.target_rel_err)
            break;
    }
    res.converged =
        opt.target_rel_err <= 0.0 || res.est_rel_error <= opt.target_rel_err;
    return res;
}

}  // namespace mazecap
