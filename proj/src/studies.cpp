#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mazecap/fem.hpp"
#include "mazecap/metrics.hpp"

namespace mazecap {

double fit_loglog_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog_slope: size mismatch");
    if (x.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: under-determined fit");
    const int n = int(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: nonpositive data");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_loglog_slope: zero spread in x");
    return sxy / sxx;
}

RateFit convergence_study(Family family, const std::vector<int>& values,
                          const CapacityOptions& opt) {
    if (values.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 parameter values");

    std::vector<int> params = values;
    std::sort(params.begin(), params.end());

    RateFit fit;
    fit.family = family;
    for (int p : params) {
        CondenserSpec spec;
        QhReport qh;
        switch (family) {
            case Family::SquareMaze:
                spec = build_square_maze(p);
                qh = qh_square_maze(p);
                break;
            case Family::CircularMaze:
                spec = build_circular_maze(p);
                qh = qh_circular_maze(p);
                break;
            case Family::SpikedAnnulus:
                spec = build_spiked_annulus(p);
                qh = qh_spiked_annulus(p);
                break;
            default:
                throw std::invalid_argument("convergence_study: family has no parameter sweep");
        }
        const CapacityResult cap = compute_capacity(spec, opt);

        RatePoint pt;
        pt.param = p;
        pt.x = 1.0 / (2.0 * p);
        pt.capacity = cap.value;
        pt.est_rel_error = cap.est_rel_error;
        pt.dofs = cap.dofs;
        pt.qh_length = qh.closed_form_length;
        pt.qh_perimeter = qh.closed_form_perimeter;
        pt.qh_rel_error =
            std::abs(cap.value - qh.closed_form_perimeter) / cap.value;
        fit.points.push_back(pt);
    }

    std::vector<double> xs, caps, errs;
    for (const RatePoint& pt : fit.points) {
        xs.push_back(pt.x);
        caps.push_back(pt.capacity);
        errs.push_back(pt.qh_rel_error);
    }
    fit.capacity_slope = fit_loglog_slope(xs, caps);
    fit.qh_error_slope = fit_loglog_slope(xs, errs);
    return fit;
}

std::vector<DefeaturePoint> defeature_study(int n, double rho,
                                            const std::vector<double>& cut_radii,
                                            const CapacityOptions& opt) {
    const double disk_radius = rho * std::sin(std::numbers::pi / n);
    for (std::size_t i = 0; i < cut_radii.size(); ++i) {
        if (cut_radii[i] < 0.0 || cut_radii[i] >= disk_radius)
            throw std::invalid_argument("defeature_study: cut radius out of range");
        if (i > 0 && cut_radii[i] <= cut_radii[i - 1])
            throw std::invalid_argument("defeature_study: cut radii must increase");
    }

    const CapacityResult base = compute_capacity(build_tangent_disks(n, rho), opt);

    std::vector<DefeaturePoint> out;
    for (double s : cut_radii) {
        DefeaturePoint pt;
        pt.cut_radius = s;
        if (s == 0.0) {
            pt.capacity = base.value;
            pt.est_rel_error = base.est_rel_error;
        } else {
            const CapacityResult r =
                compute_capacity(build_tangent_disks(n, rho, s), opt);
            pt.capacity = r.value;
            pt.est_rel_error = r.est_rel_error;
        }
        pt.reduction = (base.value - pt.capacity) / base.value;
        out.push_back(pt);
    }
    return out;
}

} // namespace mazecap
