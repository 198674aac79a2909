#include "ghe/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ghe {

namespace {

double finite_or_hole(double v, const char* where)
{
    if (!std::isfinite(v)) throw StencilHole(std::string("non-finite value at ") + where + " stencil point");
    return v;
}

}  // namespace

double fd_derivative(const std::function<double(double)>& f, double x, double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const double fp1 = finite_or_hole(f(x + h), "+h");
    const double fm1 = finite_or_hole(f(x - h), "-h");
    const double fp2 = finite_or_hole(f(x + 2.0 * h), "+2h");
    const double fm2 = finite_or_hole(f(x - 2.0 * h), "-2h");
    return (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
}

double fd_partial(const std::function<double(const Point4&)>& field, const Point4& point, Axis axis,
                  double h)
{
    return fd_derivative([&](double c) { return field(point.shifted(axis, c - point[axis])); }, point[axis],
                         h);
}

double default_step(const Point4& point, Axis axis) { return 1e-3 * (1.0 + std::abs(point[axis])); }

std::string_view cert_status_name(CertStatus s)
{
    switch (s) {
    case CertStatus::certified: return "certified";
    case CertStatus::near_fold: return "near_fold";
    case CertStatus::stencil_hole: return "stencil_hole";
    }
    return "?";
}

std::string_view partial_name(int index)
{
    static constexpr std::array<std::string_view, kCertifiedPartials> names = {
        "p_x", "p_y", "p_z", "p_t", "q_x", "q_y", "q_z", "q_t", "r_x", "r_y", "r_z", "r_t"};
    return names.at(static_cast<std::size_t>(index));
}

CertReport certify_sample(const FieldSample& s, const Seed& seed, const CertOptions& options)
{
    CertReport report;
    report.slope = s.slope;
    if (!(std::abs(s.slope) >= options.fold_threshold)) {
        report.status = CertStatus::near_fold;
        return report;
    }

    // On-sheet continuation: every stencil point re-solves from the sample's root.
    auto values_at = [&](const Point4& pt) -> FieldValues {
        auto root = track_root(seed.relation().at(pt), s.p, options.tol);
        if (!root) throw StencilHole("branch lost at stencil point");
        return seed.values(pt, root->root);
    };

    const std::array<const Gradient4*, 3> analytic = {&s.dp, &s.dq, &s.dr};
    try {
        for (Axis axis : kAxes) {
            double h = default_step(s.point, axis);
            if (options.fold_step_fraction > 0.0) {
                const double rate = std::abs(seed.slope_rate(s.point, s.p, axis));
                if (rate > 0.0 && std::isfinite(rate))
                    h = std::min(h, options.fold_step_fraction * std::abs(s.slope) / rate);
            }
            const double c0 = s.point[axis];
            h = (c0 + h) - c0;  // representable step
            std::array<double, 4> fp{}, fm{}, f2p{}, f2m{};
            auto eval = [&](double offset, std::array<double, 4>& out) {
                const FieldValues v = values_at(s.point.shifted(axis, offset));
                out = {v.p, v.q, v.r, 0.0};
                for (int c = 0; c < 3; ++c)
                    if (!std::isfinite(out[static_cast<std::size_t>(c)]))
                        throw StencilHole("non-finite field value at stencil point");
            };
            eval(h, fp);
            eval(-h, fm);
            eval(2.0 * h, f2p);
            eval(-2.0 * h, f2m);
            for (int c = 0; c < 3; ++c) {
                const auto k = static_cast<std::size_t>(c);
                const double fd = (8.0 * (fp[k] - fm[k]) - (f2p[k] - f2m[k])) / (12.0 * h);
                const double exact = (*analytic[k])[axis];
                const int index = c * 4 + static_cast<int>(axis);
                report.deviation[static_cast<std::size_t>(index)] = std::abs(exact - fd) / (1.0 + std::abs(exact));
            }
        }
    } catch (const StencilHole&) {
        report.status = CertStatus::stencil_hole;
        report.deviation.fill(0.0);
        return report;
    }

    for (int i = 0; i < kCertifiedPartials; ++i) {
        const double d = report.deviation[static_cast<std::size_t>(i)];
        if (report.worst < 0 || d > report.max_deviation) {
            report.max_deviation = d;
            report.worst = i;
        }
    }
    return report;
}

}  // namespace ghe
