#include "ghe/calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace ghe {

namespace {

double eval1(const SmoothFn& f, int i, double a)
{
    const double v[1] = {a};
    return f.checked(i, 0, v);
}

double eval2(const SmoothFn& f, int i, int j, double a, double b)
{
    const double v[2] = {a, b};
    return f.checked(i, j, v);
}

void require_regular(double slope, double eps_d)
{
    if (!(std::abs(slope) >= eps_d)) throw DegenerateRoot(slope, eps_d);
}

class ShockSeed final : public Seed {
public:
    ShockSeed(const ShockSolutionDef& def, const SharedProfile& shared, int index)
        : Seed(index), def_(&def), shared_(&shared), relation_(def, shared)
    {
    }

    const ImplicitRelation& relation() const override { return relation_; }

    FieldSample sample(const Point4& pt, double p, double eps_d) const override
    {
        FieldSample s = shock_derivatives(*def_, *shared_, pt, p, eps_d);
        s.source = index();
        return s;
    }

    FieldValues values(const Point4& pt, double p) const override
    {
        const double f = def_->F(p);
        return {p, def_->m(pt.y) + shared_->beta.d(1, pt.y) * f,
                def_->n(pt.z) + shared_->delta.d(1, pt.z) * f};
    }

    MixedPartials mixed(const Point4& pt, double p) const override
    {
        return mixed_partials(*def_, *shared_, pt, p);
    }

    double slope_rate(const Point4& pt, double p, Axis axis) const override
    {
        const double s = shared_->alpha(pt.t) + shared_->beta(pt.y) + shared_->delta(pt.z);
        const double f2 = def_->F.d(2, p);
        const double d = s * f2 + def_->G.d(1, p);
        const double d_p = s * def_->F.d(3, p) + def_->G.d(2, p);
        const double f1 = def_->F.d(1, p);
        double coord_rate = 1.0;  // dPhi/d(axis)
        double explicit_rate = 0.0;  // dD/d(axis) at fixed p
        switch (axis) {
        case Axis::x: break;
        case Axis::y:
            coord_rate = shared_->beta.d(1, pt.y) * f1;
            explicit_rate = shared_->beta.d(1, pt.y) * f2;
            break;
        case Axis::z:
            coord_rate = shared_->delta.d(1, pt.z) * f1;
            explicit_rate = shared_->delta.d(1, pt.z) * f2;
            break;
        case Axis::t:
            coord_rate = shared_->alpha.d(1, pt.t) * f1;
            explicit_rate = shared_->alpha.d(1, pt.t) * f2;
            break;
        }
        return d_p * (-coord_rate / d) + explicit_rate;
    }

private:
    const ShockSolutionDef* def_;
    const SharedProfile* shared_;
    ShockRelation relation_;
};

class GeneralSeed final : public Seed {
public:
    GeneralSeed(const GeneralSolutionDef& def, int index) : Seed(index), def_(&def), relation_(def) {}

    const ImplicitRelation& relation() const override { return relation_; }

    FieldSample sample(const Point4& pt, double p, double eps_d) const override
    {
        FieldSample s = general_derivatives(*def_, pt, p, eps_d);
        s.source = index();
        return s;
    }

    FieldValues values(const Point4& pt, double p) const override
    {
        return {p, def_->Q.d(0, 1, p, pt.y), def_->R.d(0, 1, p, pt.z)};
    }

    MixedPartials mixed(const Point4& pt, double p) const override { return mixed_partials(*def_, pt, p); }

    double slope_rate(const Point4& pt, double p, Axis axis) const override
    {
        const auto& Q = def_->Q;
        const auto& R = def_->R;
        const auto& T = def_->T;
        const double d = Q.d(2, 0, p, pt.y) + R.d(2, 0, p, pt.z) + T.d(1, 0, p, pt.t);
        const double d_p = Q.d(3, 0, p, pt.y) + R.d(3, 0, p, pt.z) + T.d(2, 0, p, pt.t);
        double coord_rate = 1.0;
        double explicit_rate = 0.0;
        switch (axis) {
        case Axis::x: break;
        case Axis::y:
            coord_rate = Q.d(1, 1, p, pt.y);
            explicit_rate = Q.d(2, 1, p, pt.y);
            break;
        case Axis::z:
            coord_rate = R.d(1, 1, p, pt.z);
            explicit_rate = R.d(2, 1, p, pt.z);
            break;
        case Axis::t:
            coord_rate = T.d(0, 1, p, pt.t);
            explicit_rate = T.d(1, 1, p, pt.t);
            break;
        }
        return d_p * (-coord_rate / d) + explicit_rate;
    }

private:
    const GeneralSolutionDef* def_;
    GeneralRelation relation_;
};

}  // namespace

DegenerateRoot::DegenerateRoot(double slope, double threshold)
    : std::runtime_error("degenerate root: |D| = " + std::to_string(std::abs(slope)) + " < " +
                         std::to_string(threshold)),
      slope_(slope)
{
}

std::string_view equation_name(Equation e)
{
    switch (e) {
    case Equation::ghe: return "ghe";
    case Equation::compat_y: return "compat_y";
    case Equation::compat_z: return "compat_z";
    case Equation::pairwise_balance: return "pairwise_balance";
    case Equation::n_term_balance: return "n_term_balance";
    case Equation::reduced_balance: return "reduced_balance";
    case Equation::identity: return "identity";
    }
    return "?";
}

ResidualReport make_residual(double value, std::span<const double> terms, const Point4& point,
                             Equation which)
{
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return {value, scale, std::abs(value) / (scale + kScaleGuard), point, which};
}

FieldSample shock_derivatives(const ShockSolutionDef& def, const SharedProfile& shared,
                              const Point4& pt, double p, double eps_d)
{
    const double s = eval1(shared.alpha, 0, pt.t) + eval1(shared.beta, 0, pt.y) + eval1(shared.delta, 0, pt.z);
    const double f0 = eval1(def.F, 0, p);
    const double f1 = eval1(def.F, 1, p);
    const double f2 = eval1(def.F, 2, p);
    const double d = s * f2 + eval1(def.G, 1, p);
    require_regular(d, eps_d);

    const double alpha1 = eval1(shared.alpha, 1, pt.t);
    const double beta1 = eval1(shared.beta, 1, pt.y);
    const double beta2 = eval1(shared.beta, 2, pt.y);
    const double delta1 = eval1(shared.delta, 1, pt.z);
    const double delta2 = eval1(shared.delta, 2, pt.z);

    FieldSample out;
    out.point = pt;
    out.slope = d;
    out.p = p;
    out.dp = {-1.0 / d, -beta1 * f1 / d, -delta1 * f1 / d, -alpha1 * f1 / d};

    const double qf = beta1 * f1;
    out.q = eval1(def.m, 0, pt.y) + beta1 * f0;
    out.dq = {qf * out.dp.x, eval1(def.m, 1, pt.y) + beta2 * f0 + qf * out.dp.y, qf * out.dp.z,
              qf * out.dp.t};

    const double rf = delta1 * f1;
    out.r = eval1(def.n, 0, pt.z) + delta1 * f0;
    out.dr = {rf * out.dp.x, rf * out.dp.y, eval1(def.n, 1, pt.z) + delta2 * f0 + rf * out.dp.z,
              rf * out.dp.t};
    return out;
}

FieldSample general_derivatives(const GeneralSolutionDef& def, const Point4& pt, double p, double eps_d)
{
    const double d = eval2(def.Q, 2, 0, p, pt.y) + eval2(def.R, 2, 0, p, pt.z) + eval2(def.T, 1, 0, p, pt.t);
    require_regular(d, eps_d);
    const double q_py = eval2(def.Q, 1, 1, p, pt.y);
    const double r_pz = eval2(def.R, 1, 1, p, pt.z);
    const double t_t = eval2(def.T, 0, 1, p, pt.t);

    FieldSample out;
    out.point = pt;
    out.slope = d;
    out.p = p;
    out.dp = {-1.0 / d, -q_py / d, -r_pz / d, -t_t / d};

    out.q = eval2(def.Q, 0, 1, p, pt.y);
    out.dq = {q_py * out.dp.x, eval2(def.Q, 0, 2, p, pt.y) + q_py * out.dp.y, q_py * out.dp.z,
              q_py * out.dp.t};

    out.r = eval2(def.R, 0, 1, p, pt.z);
    out.dr = {r_pz * out.dp.x, r_pz * out.dp.y, eval2(def.R, 0, 2, p, pt.z) + r_pz * out.dp.z,
              r_pz * out.dp.t};
    return out;
}

double poisson_bracket(const Gradient4& a, const Gradient4& b, Axis mu, Axis nu)
{
    return a[mu] * b[nu] - a[nu] * b[mu];
}

ResidualReport ghe_residual(const FieldSample& s, const GheConstants& k)
{
    const double a = k.a();
    const double b = k.b();
    const double value = a * poisson_bracket(s.dr, s.dp, Axis::y, Axis::t) +
                         b * poisson_bracket(s.dr, s.dq, Axis::x, Axis::t);
    const std::array<double, 4> terms = {a * s.dr.y * s.dp.t, a * s.dr.t * s.dp.y, b * s.dr.x * s.dq.t,
                                         b * s.dr.t * s.dq.x};
    return make_residual(value, terms, s.point, Equation::ghe);
}

std::pair<ResidualReport, ResidualReport> compat_residuals(const FieldSample& s)
{
    const std::array<double, 2> ty = {s.dp.y, s.dq.x};
    const std::array<double, 2> tz = {s.dp.z, s.dr.x};
    return {make_residual(s.dp.y - s.dq.x, ty, s.point, Equation::compat_y),
            make_residual(s.dp.z - s.dr.x, tz, s.point, Equation::compat_z)};
}

namespace {

// Value and terms of the cross contribution of an unordered pair.
struct PairCross {
    double value;
    std::array<double, 8> terms;
};

PairCross pair_cross(const FieldSample& si, const FieldSample& sj, const GheConstants& k)
{
    const double a = k.a();
    const double b = k.b();
    PairCross c{};
    c.value = a * poisson_bracket(sj.dr, si.dp, Axis::y, Axis::t) +
              a * poisson_bracket(si.dr, sj.dp, Axis::y, Axis::t) +
              b * poisson_bracket(sj.dr, si.dq, Axis::x, Axis::t) +
              b * poisson_bracket(si.dr, sj.dq, Axis::x, Axis::t);
    c.terms = {a * sj.dr.y * si.dp.t, a * sj.dr.t * si.dp.y, a * si.dr.y * sj.dp.t, a * si.dr.t * sj.dp.y,
               b * sj.dr.x * si.dq.t, b * sj.dr.t * si.dq.x, b * si.dr.x * sj.dq.t, b * si.dr.t * sj.dq.x};
    return c;
}

}  // namespace

ResidualReport pairwise_balance(const FieldSample& si, const FieldSample& sj, const GheConstants& k)
{
    const PairCross c = pair_cross(si, sj, k);
    return make_residual(c.value, c.terms, si.point, Equation::pairwise_balance);
}

ResidualReport n_term_balance(std::span<const FieldSample> samples, const GheConstants& k)
{
    const Point4 pt = samples.empty() ? Point4{} : samples.front().point;
    std::optional<double> value;
    double scale = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const PairCross c = pair_cross(samples[i], samples[j], k);
            value = value ? *value + c.value : c.value;
            for (double t : c.terms) scale = std::max(scale, std::abs(t));
        }
    }
    const double v = value.value_or(0.0);
    return {v, scale, std::abs(v) / (scale + kScaleGuard), pt, Equation::n_term_balance};
}

ResidualReport reduced_balance(const MixedPartials& s1, const MixedPartials& s2, const GheConstants& k,
                               const Point4& point)
{
    const double a = k.a();
    const double b = k.b();
    const double dr = s2.r_pz - s1.r_pz;
    const double dt = s2.t_t - s1.t_t;
    const double lhs = a * dr * (s1.t_t * s2.q_py - s2.t_t * s1.q_py);
    const double rhs = b * dt * (s1.q_py * s2.r_pz - s2.q_py * s1.r_pz);
    const std::array<double, 4> terms = {a * dr * s1.t_t * s2.q_py, a * dr * s2.t_t * s1.q_py,
                                         b * dt * s1.q_py * s2.r_pz, b * dt * s2.q_py * s1.r_pz};
    return make_residual(lhs - rhs, terms, point, Equation::reduced_balance);
}

ResidualReport reduced_balance(const GeneralSolutionDef& d1, const GeneralSolutionDef& d2,
                               const GheConstants& k, const Point4& point, double p1, double p2)
{
    return reduced_balance(mixed_partials(d1, point, p1), mixed_partials(d2, point, p2), k, point);
}

MixedPartials mixed_partials(const GeneralSolutionDef& def, const Point4& pt, double p)
{
    return {eval2(def.Q, 1, 1, p, pt.y), eval2(def.R, 1, 1, p, pt.z), eval2(def.T, 0, 1, p, pt.t)};
}

MixedPartials mixed_partials(const ShockSolutionDef& def, const SharedProfile& shared, const Point4& pt,
                             double p)
{
    // Q = M(y) + beta F, R = N(z) + delta F, T = alpha F' + G.
    const double f1 = eval1(def.F, 1, p);
    return {eval1(shared.beta, 1, pt.y) * f1, eval1(shared.delta, 1, pt.z) * f1,
            eval1(shared.alpha, 1, pt.t) * f1};
}

SolutionSet make_solution_set(const ShockFamily& family)
{
    SolutionSet set{FamilyKind::shock, family.shared().constants, {}};
    for (std::size_t i = 0; i < family.size(); ++i)
        set.seeds.push_back(std::make_shared<ShockSeed>(family[i], family.shared(), static_cast<int>(i)));
    return set;
}

SolutionSet make_solution_set(const GeneralFamily& family)
{
    SolutionSet set{FamilyKind::general, family.constants(), {}};
    for (std::size_t i = 0; i < family.size(); ++i)
        set.seeds.push_back(std::make_shared<GeneralSeed>(family[i], static_cast<int>(i)));
    return set;
}

}  // namespace ghe
