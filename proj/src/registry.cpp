#include "ghe/registry.hpp"

#include <cmath>
#include <functional>

namespace ghe {

namespace {

void require_vars(const SmoothFn& f, const std::vector<std::string>& expected, const char* what)
{
    if (f.variables().names() != expected) {
        std::string want;
        for (const auto& v : expected) want += (want.empty() ? "" : ", ") + v;
        throw FamilyError(std::string("variable convention: ") + what + " must be a function of (" +
                          want + ")");
    }
}

// True when f and all its partials up to order 2 are finite for at least one
// argument produced by `args`.
bool evaluable_somewhere(const SmoothFn& f, std::span<const Probe> probes,
                         const std::function<std::array<double, 2>(const Probe&)>& args)
{
    for (const Probe& pr : probes) {
        const auto a = args(pr);
        bool ok = true;
        for (int order = 0; order <= 2 && ok; ++order) {
            for (int j = 0; j <= order && ok; ++j) {
                if (f.arity() == 1 && j > 0) continue;
                const double v = f.arity() == 1 ? f.d(order, a[0]) : f.d(order - j, j, a[0], a[1]);
                ok = std::isfinite(v);
            }
        }
        if (ok) return true;
    }
    return false;
}

void require_evaluable(const SmoothFn& f, std::span<const Probe> probes,
                       const std::function<std::array<double, 2>(const Probe&)>& args,
                       const std::string& what)
{
    if (probes.empty()) return;
    if (!evaluable_somewhere(f, probes, args))
        throw FamilyError("domain failure: " + what + " = " + f.expr().to_string() +
                          " cannot be evaluated (with partials) at any probe point");
}

std::string seed_label(std::size_t i, const char* fn)
{
    return std::string(fn) + "[" + std::to_string(i) + "]";
}

// ------------------------------------------------------------ polynomials

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b)
{
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_add(Poly a, const Poly& b, double sign)
{
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
    return a;
}

std::optional<Poly> to_poly(const Node& n, int var)
{
    constexpr int kMaxDegree = 64;
    switch (n.kind) {
    case NodeKind::constant: return Poly{n.value};
    case NodeKind::variable:
        if (n.variable != var) return std::nullopt;
        return Poly{0.0, 1.0};
    case NodeKind::negate: {
        auto a = to_poly(*n.lhs, var);
        if (!a) return std::nullopt;
        for (double& c : *a) c = -c;
        return a;
    }
    case NodeKind::add:
    case NodeKind::sub: {
        auto a = to_poly(*n.lhs, var);
        auto b = to_poly(*n.rhs, var);
        if (!a || !b) return std::nullopt;
        return poly_add(std::move(*a), *b, n.kind == NodeKind::add ? 1.0 : -1.0);
    }
    case NodeKind::mul: {
        auto a = to_poly(*n.lhs, var);
        auto b = to_poly(*n.rhs, var);
        if (!a || !b) return std::nullopt;
        return poly_mul(*a, *b);
    }
    case NodeKind::div: {
        auto a = to_poly(*n.lhs, var);
        auto b = to_poly(*n.rhs, var);
        if (!a || !b || b->size() != 1 || (*b)[0] == 0.0) return std::nullopt;
        for (double& c : *a) c /= (*b)[0];
        return a;
    }
    case NodeKind::pow: {
        auto base = to_poly(*n.lhs, var);
        if (!base || n.rhs->kind != NodeKind::constant) return std::nullopt;
        const double e = n.rhs->value;
        if (e < 0.0 || e != std::trunc(e) || e * static_cast<double>(base->size() - 1) > kMaxDegree)
            return std::nullopt;
        Poly out{1.0};
        for (int k = 0; k < static_cast<int>(e); ++k) out = poly_mul(out, *base);
        return out;
    }
    case NodeKind::call: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

GheConstants::GheConstants(double a, double b) : a_(a), b_(b)
{
    if (!std::isfinite(a) || !std::isfinite(b))
        throw FamilyError("GHE constants must be finite");
    if (a == 0.0 && b == 0.0) throw FamilyError("GHE constants (a, b) must not both vanish");
}

SharedProfile::SharedProfile(GheConstants constants_, SmoothFn alpha_, SmoothFn beta_, SmoothFn delta_)
    : constants(constants_), alpha(std::move(alpha_)), beta(std::move(beta_)), delta(std::move(delta_))
{
    require_vars(alpha, {"t"}, "alpha");
    require_vars(beta, {"y"}, "beta");
    require_vars(delta, {"z"}, "delta");
}

ShockFamily::ShockFamily(std::vector<ShockSolutionDef> defs, SharedProfile shared)
    : defs_(std::move(defs)), shared_(std::move(shared))
{
}

GeneralFamily::GeneralFamily(std::vector<GeneralSolutionDef> defs, GheConstants constants)
    : defs_(std::move(defs)), constants_(constants)
{
}

ShockFamily build_shock_family(std::vector<ShockSolutionDef> defs, SharedProfile shared,
                               std::span<const Probe> probes)
{
    if (defs.empty()) throw FamilyError("empty family");
    using A = std::array<double, 2>;
    auto at_p = [](const Probe& pr) { return A{pr.p, 0.0}; };
    auto at_y = [](const Probe& pr) { return A{pr.point.y, 0.0}; };
    auto at_z = [](const Probe& pr) { return A{pr.point.z, 0.0}; };
    auto at_t = [](const Probe& pr) { return A{pr.point.t, 0.0}; };
    require_evaluable(shared.alpha, probes, at_t, "alpha");
    require_evaluable(shared.beta, probes, at_y, "beta");
    require_evaluable(shared.delta, probes, at_z, "delta");
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const auto& d = defs[i];
        require_vars(d.F, {"p"}, seed_label(i, "F").c_str());
        require_vars(d.G, {"p"}, seed_label(i, "G").c_str());
        require_vars(d.m, {"y"}, seed_label(i, "m").c_str());
        require_vars(d.n, {"z"}, seed_label(i, "n").c_str());
        require_evaluable(d.F, probes, at_p, seed_label(i, "F"));
        require_evaluable(d.G, probes, at_p, seed_label(i, "G"));
        require_evaluable(d.m, probes, at_y, seed_label(i, "m"));
        require_evaluable(d.n, probes, at_z, seed_label(i, "n"));
    }
    return ShockFamily(std::move(defs), std::move(shared));
}

GeneralFamily build_general_family(std::vector<GeneralSolutionDef> defs, GheConstants constants,
                                   std::span<const Probe> probes)
{
    if (defs.empty()) throw FamilyError("empty family");
    using A = std::array<double, 2>;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const auto& d = defs[i];
        require_vars(d.Q, {"p", "y"}, seed_label(i, "Q").c_str());
        require_vars(d.R, {"p", "z"}, seed_label(i, "R").c_str());
        require_vars(d.T, {"p", "t"}, seed_label(i, "T").c_str());
        require_evaluable(d.Q, probes, [](const Probe& pr) { return A{pr.p, pr.point.y}; },
                          seed_label(i, "Q"));
        require_evaluable(d.R, probes, [](const Probe& pr) { return A{pr.p, pr.point.z}; },
                          seed_label(i, "R"));
        require_evaluable(d.T, probes, [](const Probe& pr) { return A{pr.p, pr.point.t}; },
                          seed_label(i, "T"));
    }
    return GeneralFamily(std::move(defs), constants);
}

std::optional<Expr> polynomial_antiderivative(const Expr& e, int var)
{
    auto poly = to_poly(e.root(), var);
    if (!poly) return std::nullopt;
    const VariableSet& vars = e.variables();
    const Expr x = Expr::variable(vars[static_cast<std::size_t>(var)], vars);
    Expr out = Expr::constant(0.0, vars);
    for (std::size_t k = 0; k < poly->size(); ++k) {
        const double c = (*poly)[k] / static_cast<double>(k + 1);
        if (c == 0.0) continue;
        const Expr term = Expr::constant(c, vars) *
                          pow(x, Expr::constant(static_cast<double>(k + 1), vars));
        out = out + term;
    }
    return out;
}

std::optional<GeneralSolutionDef> embed_shock(const ShockSolutionDef& def, const SharedProfile& shared)
{
    auto M = polynomial_antiderivative(def.m.expr());
    auto N = polynomial_antiderivative(def.n.expr());
    if (!M || !N) return std::nullopt;
    const VariableSet py({"p", "y"});
    const VariableSet pz({"p", "z"});
    const VariableSet pt({"p", "t"});
    Expr Q = M->rebind(py) + shared.beta.expr().rebind(py) * def.F.expr().rebind(py);
    Expr R = N->rebind(pz) + shared.delta.expr().rebind(pz) * def.F.expr().rebind(pz);
    Expr T = shared.alpha.expr().rebind(pt) * def.F.partial(1).rebind(pt) + def.G.expr().rebind(pt);
    return GeneralSolutionDef{SmoothFn(std::move(Q)), SmoothFn(std::move(R)), SmoothFn(std::move(T))};
}

}  // namespace ghe
