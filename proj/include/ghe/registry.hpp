#pragma once

#include "ghe/point.hpp"
#include "ghe/smooth_fn.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghe {

/// Invalid family definition: empty seed list, variable-convention or arity
/// violation, or functions that cannot be evaluated at any probe point.
class FamilyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Coefficients of a*{.,.} + b*{.,.} + c*{.,.}; c is always -a-b.
class GheConstants {
public:
    GheConstants(double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return -a_ - b_; }

private:
    double a_;
    double b_;
};

/// alpha(t), beta(y), delta(z) shared by every seed of a shock family.
struct SharedProfile {
    SharedProfile(GheConstants constants, SmoothFn alpha, SmoothFn beta, SmoothFn delta);

    GheConstants constants;
    SmoothFn alpha;
    SmoothFn beta;
    SmoothFn delta;
};

/// One shock seed: x + (alpha+beta+delta) F'(p) + G(p) = 0,
/// q = m(y) + beta'(y) F(p), r = n(z) + delta'(z) F(p).
struct ShockSolutionDef {
    SmoothFn F;  // F(p)
    SmoothFn G;  // G(p)
    SmoothFn m;  // m(y)
    SmoothFn n;  // n(z)
};

/// One general seed: x + Q_p(p,y) + R_p(p,z) + T(p,t) = 0,
/// q = Q_y(p,y), r = R_z(p,z).
struct GeneralSolutionDef {
    SmoothFn Q;  // Q(p, y)
    SmoothFn R;  // R(p, z)
    SmoothFn T;  // T(p, t)
};

/// (p, spacetime point) pairs at which every definition must be evaluable.
struct Probe {
    double p = 0.0;
    Point4 point;
};

class ShockFamily {
public:
    ShockFamily(std::vector<ShockSolutionDef> defs, SharedProfile shared);

    std::size_t size() const { return defs_.size(); }
    const ShockSolutionDef& operator[](std::size_t i) const { return defs_[i]; }
    const std::vector<ShockSolutionDef>& defs() const { return defs_; }
    const SharedProfile& shared() const { return shared_; }

private:
    std::vector<ShockSolutionDef> defs_;
    SharedProfile shared_;
};

class GeneralFamily {
public:
    GeneralFamily(std::vector<GeneralSolutionDef> defs, GheConstants constants);

    std::size_t size() const { return defs_.size(); }
    const GeneralSolutionDef& operator[](std::size_t i) const { return defs_[i]; }
    const std::vector<GeneralSolutionDef>& defs() const { return defs_; }
    const GheConstants& constants() const { return constants_; }

private:
    std::vector<GeneralSolutionDef> defs_;
    GheConstants constants_;
};

/// Validates variable conventions and, when probes are given, that every
/// function and its partials up to order 2 evaluate somewhere on the probes.
ShockFamily build_shock_family(std::vector<ShockSolutionDef> defs, SharedProfile shared,
                               std::span<const Probe> probes = {});
GeneralFamily build_general_family(std::vector<GeneralSolutionDef> defs, GheConstants constants,
                                   std::span<const Probe> probes = {});

/// Antiderivative in `var` (vanishing at 0) when `e` is a polynomial in that
/// variable; nullopt otherwise.
std::optional<Expr> polynomial_antiderivative(const Expr& e, int var = 0);

/// Shock seed rewritten as a general seed: Q = M(y) + beta(y) F(p),
/// R = N(z) + delta(z) F(p), T = alpha(t) F'(p) + G(p) with M' = m, N' = n.
/// Only available when m and n are polynomials.
std::optional<GeneralSolutionDef> embed_shock(const ShockSolutionDef& def, const SharedProfile& shared);

}  // namespace ghe
