#pragma once

#include "ghe/calculus.hpp"
#include "ghe/implicit_solve.hpp"
#include "ghe/point.hpp"

#include <array>
#include <functional>
#include <stdexcept>
#include <string_view>

namespace ghe {

/// A stencil point could not be evaluated (NaN, inf, or a branch hole).
class StencilHole : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Richardson-extrapolated central difference
/// (8(f(+h) - f(-h)) - (f(+2h) - f(-2h))) / (12 h); O(h^4).
double fd_derivative(const std::function<double(double)>& f, double x, double h);

/// The same stencil along one axis of a spacetime field.
double fd_partial(const std::function<double(const Point4&)>& field, const Point4& point, Axis axis,
                  double h);

/// 1e-3 * (1 + |coordinate|).
double default_step(const Point4& point, Axis axis);

enum class CertStatus { certified, near_fold, stencil_hole };

std::string_view cert_status_name(CertStatus s);

/// Partials compared by certify_sample, in FieldSample order.
inline constexpr int kCertifiedPartials = 12;
std::string_view partial_name(int index);

struct CertOptions {
    double fold_threshold = 1e-3;  // |D| below this is skipped as near-fold
    /// Cap on the step as a fraction of the distance to the fold along the
    /// axis, |D| / |dD/d(axis)|. Zero disables the cap.
    double fold_step_fraction = 0.01;
    RootTolerances tol;
};

struct CertReport {
    CertStatus status = CertStatus::certified;
    /// |analytic - fd| / (1 + |analytic|) per partial.
    std::array<double, kCertifiedPartials> deviation{};
    double max_deviation = 0.0;
    int worst = -1;  // index of the largest deviation
    double slope = 0.0;
};

/// Compare every closed-form partial of `s` with fd_partial of the branch
/// continued from s.p (Newton seeded at the sample's own root at each
/// stencil point, so the stencil stays on one sheet).
CertReport certify_sample(const FieldSample& s, const Seed& seed, const CertOptions& options = {});

}  // namespace ghe
