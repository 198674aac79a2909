#include "ghe/implicit_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghe {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double step_floor(double p) { return 2.0 * kEps * std::max(1.0, std::abs(p)); }

RootReport finish(const LocalRelation& rel, double p, int iterations, bool newton_failed,
                  const RootTolerances& tol)
{
    RootReport r;
    r.root = p;
    r.residual = std::abs(rel.residual(p));
    r.slope = rel.slope(p);
    r.iterations = iterations;
    r.newton_failed = newton_failed;
    r.degenerate = !(std::abs(r.slope) >= tol.degenerate);
    r.within_tolerance = r.residual <= tol.residual_bound(rel.x);
    return r;
}

// Bracketed safeguarded Newton (Newton steps that leave the bracket or
// shrink too slowly are replaced by bisection). f(lo) and f(hi) have
// opposite signs and are both nonzero.
std::optional<RootReport> refine(const LocalRelation& rel, double lo, double hi, double f_lo,
                                 const RootTolerances& tol)
{
    // Orient so that f(neg) < 0 < f(pos).
    double neg = f_lo < 0.0 ? lo : hi;
    double pos = f_lo < 0.0 ? hi : lo;

    double p = 0.5 * (lo + hi);
    double dx_old = std::abs(hi - lo);
    double dx = dx_old;
    double f = rel.residual(p);
    double df = rel.slope(p);
    if (!std::isfinite(f)) return std::nullopt;

    int it = 0;
    for (; it < tol.max_newton; ++it) {
        if (f == 0.0) return finish(rel, p, it, false, tol);
        if (f < 0.0)
            neg = p;
        else
            pos = p;
        if (std::abs(pos - neg) <= step_floor(p)) return finish(rel, p, it, false, tol);

        const bool newton_leaves = !std::isfinite(df) || df == 0.0 ||
                                   ((p - pos) * df - f) * ((p - neg) * df - f) > 0.0;
        const bool newton_slow = std::abs(2.0 * f) > std::abs(dx_old * df);
        dx_old = dx;
        if (newton_leaves || newton_slow) {
            dx = 0.5 * (pos - neg);
            p = neg + dx;
        } else {
            dx = f / df;
            p -= dx;
        }
        f = rel.residual(p);
        df = rel.slope(p);
        if (!std::isfinite(f)) return std::nullopt;
        if (std::abs(dx) <= step_floor(p)) return finish(rel, p, it + 1, false, tol);
    }

    // Iteration cap: fall back to plain bisection on the remaining bracket.
    if (f < 0.0)
        neg = p;
    else if (f > 0.0)
        pos = p;
    while (f != 0.0 && std::abs(pos - neg) > step_floor(p)) {
        p = 0.5 * (neg + pos);
        f = rel.residual(p);
        if (!std::isfinite(f)) return std::nullopt;
        if (f < 0.0)
            neg = p;
        else
            pos = p;
        ++it;
    }
    return finish(rel, p, it, true, tol);
}

}  // namespace

// ------------------------------------------------------------ relations

ShockRelation::ShockRelation(const ShockSolutionDef& def, const SharedProfile& shared)
    : def_(&def), shared_(&shared)
{
}

LocalRelation ShockRelation::at(const Point4& pt) const
{
    const double s = shared_->alpha(pt.t) + shared_->beta(pt.y) + shared_->delta(pt.z);
    const ShockSolutionDef* d = def_;
    const double x = pt.x;
    return {
        [d, s, x](double p) { return x + s * d->F.d(1, p) + d->G(p); },
        [d, s](double p) { return s * d->F.d(2, p) + d->G.d(1, p); },
        x,
    };
}

GeneralRelation::GeneralRelation(const GeneralSolutionDef& def) : def_(&def) {}

LocalRelation GeneralRelation::at(const Point4& pt) const
{
    const GeneralSolutionDef* d = def_;
    const Point4 q = pt;
    return {
        [d, q](double p) { return q.x + d->Q.d(1, 0, p, q.y) + d->R.d(1, 0, p, q.z) + d->T(p, q.t); },
        [d, q](double p) { return d->Q.d(2, 0, p, q.y) + d->R.d(2, 0, p, q.z) + d->T.d(1, 0, p, q.t); },
        q.x,
    };
}

// ------------------------------------------------------------ policy

double RootTolerances::residual_bound(double x) const { return abs + rel * std::abs(x); }

void BranchPolicy::validate() const
{
    if (!(p_lo < p_hi)) throw std::invalid_argument("branch policy: scan interval needs p_lo < p_hi");
    if (resolution < 16) throw std::invalid_argument("branch policy: resolution must be at least 16");
    if (select == Selection::index && index < 0)
        throw std::invalid_argument("branch policy: root index must be non-negative");
}

// ------------------------------------------------------------ roots

std::vector<RootReport> enumerate_roots(const LocalRelation& rel, const BranchPolicy& policy)
{
    policy.validate();
    const int n = policy.resolution;
    const double span = policy.p_hi - policy.p_lo;
    auto sample = [&](int k) {
        return k == n - 1 ? policy.p_hi : policy.p_lo + span * static_cast<double>(k) / (n - 1);
    };

    std::vector<RootReport> roots;
    double p_prev = sample(0);
    double f_prev = rel.residual(p_prev);
    if (f_prev == 0.0) roots.push_back(finish(rel, p_prev, 0, false, policy.tol));
    for (int k = 1; k < n; ++k) {
        const double p = sample(k);
        const double f = rel.residual(p);
        if (f == 0.0) {
            roots.push_back(finish(rel, p, 0, false, policy.tol));
        } else if (std::isfinite(f) && std::isfinite(f_prev) && f_prev != 0.0 &&
                   std::signbit(f) != std::signbit(f_prev)) {
            if (auto r = refine(rel, p_prev, p, f_prev, policy.tol)) roots.push_back(std::move(*r));
        }
        p_prev = p;
        f_prev = f;
    }

    std::sort(roots.begin(), roots.end(),
              [](const RootReport& a, const RootReport& b) { return a.root < b.root; });
    std::vector<double> all;
    all.reserve(roots.size());
    for (const auto& r : roots) all.push_back(r.root);
    for (auto& r : roots) r.bracketed = all;
    return roots;
}

std::vector<RootReport> enumerate_roots(const ImplicitRelation& rel, const Point4& point,
                                        const BranchPolicy& policy)
{
    return enumerate_roots(rel.at(point), policy);
}

std::optional<RootReport> select_root(const std::vector<RootReport>& roots, const BranchPolicy& policy)
{
    if (roots.empty()) return std::nullopt;
    switch (policy.select) {
    case Selection::lowest: return roots.front();
    case Selection::nearest_to_seed:
        return *std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.root - policy.seed_value) < std::abs(b.root - policy.seed_value);
        });
    case Selection::index:
        if (policy.index < 0 || static_cast<std::size_t>(policy.index) >= roots.size()) return std::nullopt;
        return roots[static_cast<std::size_t>(policy.index)];
    }
    return std::nullopt;
}

std::optional<RootReport> track_root(const LocalRelation& rel, double seed, const RootTolerances& tol)
{
    const double seed_slope = rel.slope(seed);
    if (!std::isfinite(seed_slope) || seed_slope == 0.0) return std::nullopt;
    const double max_excursion = 0.5 * (1.0 + std::abs(seed));
    double p = seed;
    double prev_dx = std::numeric_limits<double>::infinity();
    for (int it = 0; it < tol.max_newton; ++it) {
        const double f = rel.residual(p);
        const double df = rel.slope(p);
        if (!std::isfinite(f) || !std::isfinite(df) || df == 0.0) return std::nullopt;
        if (f == 0.0) return finish(rel, p, it, false, tol);
        const double dx = f / df;
        p -= dx;
        if (!std::isfinite(p) || std::abs(p - seed) > max_excursion) return std::nullopt;
        // Small |D| amplifies rounding in Phi, so Newton can stall a few ulps
        // from the root; a step that no longer shrinks means we are there.
        const bool stalled = std::abs(dx) <= 1e-8 * std::max(1.0, std::abs(p)) && std::abs(dx) >= 0.5 * prev_dx;
        prev_dx = std::abs(dx);
        if (std::abs(dx) <= step_floor(p) || stalled) {
            RootReport r = finish(rel, p, it + 1, false, tol);
            if (std::signbit(r.slope) != std::signbit(seed_slope) || r.slope == 0.0) return std::nullopt;
            return r;
        }
    }
    return std::nullopt;
}

std::vector<BranchStep> continue_branch(const ImplicitRelation& rel, std::span<const Point4> grid,
                                        const BranchPolicy& policy)
{
    policy.validate();
    std::vector<BranchStep> out;
    out.reserve(grid.size());
    std::optional<double> prev;
    std::vector<double> motions;

    for (const Point4& pt : grid) {
        BranchStep step;
        step.point = pt;
        auto roots = enumerate_roots(rel, pt, policy);
        std::optional<RootReport> chosen;
        if (!prev) {
            chosen = select_root(roots, policy);
        } else if (!roots.empty()) {
            const double anchor = *prev;
            chosen = *std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.root - anchor) < std::abs(b.root - anchor);
            });
            const double dist = std::abs(chosen->root - anchor);
            if (motions.size() >= 2) {
                std::vector<double> sorted = motions;
                std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
                const double median = sorted[sorted.size() / 2];
                step.branch_jump = dist > 10.0 * median && dist > 64.0 * kEps * (1.0 + std::abs(anchor));
            }
            motions.push_back(dist);
        }
        if (!chosen) {
            step.hole = true;
            prev.reset();
            motions.clear();
        } else {
            prev = chosen->root;
            step.root = std::move(chosen);
        }
        out.push_back(std::move(step));
    }
    return out;
}

}  // namespace ghe
