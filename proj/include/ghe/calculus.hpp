#pragma once

#include "ghe/implicit_solve.hpp"
#include "ghe/point.hpp"
#include "ghe/registry.hpp"

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace ghe {

/// Guard added to residual scales so identically-zero fields normalize to 0.
inline constexpr double kScaleGuard = 1e-300;

/// The root is on (or too close to) a fold: implicit-function derivatives
/// are not available.
class DegenerateRoot : public std::runtime_error {
public:
    DegenerateRoot(double slope, double threshold);
    double slope() const { return slope_; }

private:
    double slope_;
};

struct Gradient4 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;

    double operator[](Axis a) const { return Point4{x, y, z, t}[a]; }
};

/// Values and first partials of (p, q, r) at a point.
struct FieldSample {
    static constexpr int kComposite = -1;

    Point4 point;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    Gradient4 dp;
    Gradient4 dq;
    Gradient4 dr;
    double slope = 0.0;  // D at the root (0 for composites)
    int source = kComposite;
    std::optional<RootReport> root;
};

enum class Equation {
    ghe,
    compat_y,
    compat_z,
    pairwise_balance,
    n_term_balance,
    reduced_balance,
    identity,
};

std::string_view equation_name(Equation e);

struct ResidualReport {
    double value = 0.0;
    double scale = 0.0;       // largest absolute individual term
    double normalized = 0.0;  // |value| / (scale + guard)
    Point4 point;
    Equation which = Equation::ghe;
};

/// Report from a value and the individual terms it was summed from.
ResidualReport make_residual(double value, std::span<const double> terms, const Point4& point,
                             Equation which);

/// Closed-form partials of a shock seed at root p (implicit differentiation
/// of x + S F'(p) + G(p) = 0). Throws DegenerateRoot when |D| < eps_d.
FieldSample shock_derivatives(const ShockSolutionDef& def, const SharedProfile& shared,
                              const Point4& point, double p, double eps_d = 1e-8);

/// Closed-form partials of a general seed at root p, with
/// D = Q_pp + R_pp + T_p. Throws DegenerateRoot when |D| < eps_d.
FieldSample general_derivatives(const GeneralSolutionDef& def, const Point4& point, double p,
                                double eps_d = 1e-8);

/// {A, B}_{mu nu} = A_mu B_nu - A_nu B_mu.
double poisson_bracket(const Gradient4& a, const Gradient4& b, Axis mu, Axis nu);

/// a {r, p}_{yt} + b {r, q}_{xt}.
ResidualReport ghe_residual(const FieldSample& s, const GheConstants& k);

/// (p_y - q_x, p_z - r_x).
std::pair<ResidualReport, ResidualReport> compat_residuals(const FieldSample& s);

/// a{r_j,p_i}_{yt} + a{r_i,p_j}_{yt} + b{r_j,q_i}_{xt} + b{r_i,q_j}_{xt}.
ResidualReport pairwise_balance(const FieldSample& si, const FieldSample& sj, const GheConstants& k);

/// Sum over i != j of a{r_i,p_j}_{yt} + b{r_i,q_j}_{xt}, accumulated pair by
/// pair (i < j) so that n = 2 reproduces pairwise_balance bit for bit.
ResidualReport n_term_balance(std::span<const FieldSample> samples, const GheConstants& k);

/// Q_py, R_pz and T_t of one seed at its root: the quantities the pairwise
/// balance condition reduces to for hodograph seeds.
struct MixedPartials {
    double q_py = 0.0;
    double r_pz = 0.0;
    double t_t = 0.0;
};

/// a (R2_pz - R1_pz)(T1_t Q2_py - T2_t Q1_py) - b (T2_t - T1_t)(Q1_py R2_pz - Q2_py R1_pz).
ResidualReport reduced_balance(const MixedPartials& s1, const MixedPartials& s2, const GheConstants& k,
                               const Point4& point);
ResidualReport reduced_balance(const GeneralSolutionDef& d1, const GeneralSolutionDef& d2,
                               const GheConstants& k, const Point4& point, double p1, double p2);

MixedPartials mixed_partials(const GeneralSolutionDef& def, const Point4& point, double p);
MixedPartials mixed_partials(const ShockSolutionDef& def, const SharedProfile& shared,
                             const Point4& point, double p);

// ------------------------------------------------------------ seed models

struct FieldValues {
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
};

/// Uniform view of one seed solution of either family. References the
/// family it was made from; the family must outlive it.
class Seed {
public:
    virtual ~Seed() = default;

    virtual const ImplicitRelation& relation() const = 0;
    /// Closed-form sample at root p; throws DegenerateRoot.
    virtual FieldSample sample(const Point4& point, double p, double eps_d) const = 0;
    /// (p, q, r) for a given root p, without derivatives.
    virtual FieldValues values(const Point4& point, double p) const = 0;
    virtual MixedPartials mixed(const Point4& point, double p) const = 0;
    /// dD/d(axis) along the branch through root p: the rate at which the
    /// point approaches a fold.
    virtual double slope_rate(const Point4& point, double p, Axis axis) const = 0;

    int index() const { return index_; }

protected:
    explicit Seed(int index) : index_(index) {}

private:
    int index_;
};

enum class FamilyKind { shock, general };

/// The seeds of one family, ready for evaluation.
struct SolutionSet {
    FamilyKind kind = FamilyKind::shock;
    GheConstants constants{1.0, 1.0};
    std::vector<std::shared_ptr<const Seed>> seeds;

    std::size_t size() const { return seeds.size(); }
};

SolutionSet make_solution_set(const ShockFamily& family);
SolutionSet make_solution_set(const GeneralFamily& family);

}  // namespace ghe
