#pragma once

#include "ghe/calculus.hpp"
#include "ghe/implicit_solve.hpp"
#include "ghe/point.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ghe {

/// Coefficients of a linear combination of seeds. At least one coefficient
/// must be nonzero.
class SuperpositionSpec {
public:
    explicit SuperpositionSpec(std::vector<double> coefficients);
    const std::vector<double>& coefficients() const { return coefficients_; }
    std::size_t size() const { return coefficients_.size(); }

private:
    std::vector<double> coefficients_;
};

/// Coefficient-weighted sum of every field and partial. Samples must share
/// one spacetime point (to 1e-14).
FieldSample superpose(std::span<const FieldSample> samples, const SuperpositionSpec& spec);

// ------------------------------------------------------------ sampling

struct Box {
    std::array<double, 2> x{0.0, 1.0};
    std::array<double, 2> y{0.0, 1.0};
    std::array<double, 2> z{0.0, 1.0};
    std::array<double, 2> t{0.0, 1.0};
};

/// Randomly shifted Halton points (bases 2, 3, 5, 7) in the box.
/// Deterministic in (box, count, seed). Axes with lo == hi stay fixed.
std::vector<Point4> halton_cloud(const Box& box, std::size_t count, std::uint64_t seed);

// ------------------------------------------------------------ seed solving

struct SeedPoint {
    std::optional<RootReport> root;
    std::optional<FieldSample> sample;  // absent for holes and degenerate roots
    bool hole = false;                  // no root selected
    bool fold = false;                  // |D| below the fold threshold
    bool branch_jump = false;
};

struct CloudSolution {
    std::vector<Point4> points;
    std::vector<std::vector<SeedPoint>> seeds;  // [point][seed]

    /// Every seed solved with |D| at or above the fold threshold.
    bool admissible(std::size_t point) const;
};

struct SolveOptions {
    BranchPolicy policy;
    double fold_threshold = 1e-3;
};

/// Solve every seed at every point. With policy.continuation the points are
/// treated as an ordered path and each seed's branch is continued along it;
/// otherwise each point uses the selection rule independently.
CloudSolution solve_cloud(const SolutionSet& set, std::span<const Point4> points, const SolveOptions& options);

// ------------------------------------------------------------ theorem

struct PointVerdict {
    Point4 point;
    bool admissible = false;
    bool hole = false;
    bool fold = false;
    std::vector<ResidualReport> seed_ghe;
    std::vector<ResidualReport> seed_compat_y;
    std::vector<ResidualReport> seed_compat_z;
    ResidualReport n_term;
    ResidualReport superposed_ghe;
    ResidualReport superposed_compat_y;
    ResidualReport superposed_compat_z;
    /// residual(sum a_i s_i) - sum a_i^2 residual(s_i) - sum_{i<j} a_i a_j cross(s_i, s_j).
    ResidualReport identity;
};

struct Stat {
    std::size_t count = 0;
    double max = 0.0;
    double median = 0.0;

    static Stat of(std::vector<double> values);
};

struct TheoremReport {
    std::size_t total = 0;
    std::size_t admissible = 0;
    std::size_t holes = 0;
    std::size_t folds = 0;
    std::vector<PointVerdict> points;

    // Normalized residuals over admissible points.
    Stat seed_ghe;
    Stat seed_compat;
    Stat n_term;
    Stat superposed_ghe;
    Stat superposed_compat;
    Stat identity;

    /// Fraction of admissible points whose superposed GHE residual is <= tol.
    double superposed_fraction_within(double tol) const;
    /// Fraction of admissible points whose superposed GHE residual is > tol.
    double superposed_fraction_above(double tol) const;
};

TheoremReport verify_theorem(const SolutionSet& set, const CloudSolution& solved, const SuperpositionSpec& spec);
TheoremReport verify_theorem(const SolutionSet& set, const SuperpositionSpec& spec,
                             std::span<const Point4> cloud, const SolveOptions& options);

}  // namespace ghe
