#pragma once

#include "ghe/point.hpp"
#include "ghe/registry.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ghe {

/// An implicit relation Phi(p) = 0 frozen at one spacetime point, with its
/// p-derivative D = dPhi/dp.
struct LocalRelation {
    std::function<double(double)> residual;
    std::function<double(double)> slope;
    double x = 0.0;  // scales the residual tolerance
};

/// Phi(p; x, y, z, t) and D(p; x, y, z, t).
class ImplicitRelation {
public:
    virtual ~ImplicitRelation() = default;
    virtual LocalRelation at(const Point4& point) const = 0;
};

/// Phi = x + S F'(p) + G(p), D = S F''(p) + G'(p), S = alpha(t) + beta(y) + delta(z).
class ShockRelation final : public ImplicitRelation {
public:
    ShockRelation(const ShockSolutionDef& def, const SharedProfile& shared);
    LocalRelation at(const Point4& point) const override;

private:
    const ShockSolutionDef* def_;
    const SharedProfile* shared_;
};

/// Phi = x + Q_p(p,y) + R_p(p,z) + T(p,t), D = Q_pp + R_pp + T_p.
class GeneralRelation final : public ImplicitRelation {
public:
    explicit GeneralRelation(const GeneralSolutionDef& def);
    LocalRelation at(const Point4& point) const override;

private:
    const GeneralSolutionDef* def_;
};

struct RootTolerances {
    double abs = 1e-12;
    double rel = 1e-12;
    double degenerate = 1e-8;  // |D| below this flags a fold
    int max_newton = 100;

    double residual_bound(double x) const;
};

enum class Selection { lowest, nearest_to_seed, index };

struct BranchPolicy {
    double p_lo = -10.0;
    double p_hi = 10.0;
    int resolution = 1024;
    Selection select = Selection::lowest;
    double seed_value = 0.0;  // for nearest_to_seed
    int index = 0;            // for index
    bool continuation = false;
    RootTolerances tol;

    /// Throws std::invalid_argument unless p_lo < p_hi and resolution >= 16.
    void validate() const;
};

struct RootReport {
    double root = 0.0;
    double residual = 0.0;  // |Phi(root)|
    double slope = 0.0;     // D(root)
    int iterations = 0;
    std::vector<double> bracketed;  // every root found at this point, ascending
    bool degenerate = false;        // |D(root)| < tol.degenerate
    bool newton_failed = false;     // safeguarded Newton hit the iteration cap; bisection result
    bool within_tolerance = false;  // |Phi(root)| <= tol.abs + tol.rel |x|
};

/// Scan [p_lo, p_hi] for sign changes of Phi and refine each bracket by
/// safeguarded Newton with bisection fallback. Tangential roots (no sign
/// change) are not guaranteed to be found. Roots are ascending.
std::vector<RootReport> enumerate_roots(const LocalRelation& rel, const BranchPolicy& policy);
std::vector<RootReport> enumerate_roots(const ImplicitRelation& rel, const Point4& point,
                                        const BranchPolicy& policy);

/// Apply the policy's selection rule; nullopt when no root qualifies.
std::optional<RootReport> select_root(const std::vector<RootReport>& roots, const BranchPolicy& policy);

/// Newton iteration from `seed` without bracketing, used to follow one sheet
/// under small perturbations of the point. Fails (nullopt) on divergence or
/// when the converged root sits on a sheet with the opposite sign of D.
std::optional<RootReport> track_root(const LocalRelation& rel, double seed, const RootTolerances& tol);

struct BranchStep {
    Point4 point;
    std::optional<RootReport> root;
    bool hole = false;         // no root at this point
    bool branch_jump = false;  // nearest root moved > 10x the median step
};

/// Follow one branch along ordered, spatially adjacent points: the first
/// solvable point uses the selection rule, later points take the root
/// nearest the previous one. Holes restart the selection.
std::vector<BranchStep> continue_branch(const ImplicitRelation& rel, std::span<const Point4> grid,
                                        const BranchPolicy& policy);

}  // namespace ghe
