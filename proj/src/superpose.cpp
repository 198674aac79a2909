#include "ghe/superpose.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

namespace ghe {

SuperpositionSpec::SuperpositionSpec(std::vector<double> coefficients) : coefficients_(std::move(coefficients))
{
    if (coefficients_.empty()) throw std::invalid_argument("superposition needs at least one coefficient");
    for (double c : coefficients_)
        if (!std::isfinite(c)) throw std::invalid_argument("superposition coefficients must be finite");
    if (std::all_of(coefficients_.begin(), coefficients_.end(), [](double c) { return c == 0.0; }))
        throw std::invalid_argument("superposition coefficients are all zero");
}

FieldSample superpose(std::span<const FieldSample> samples, const SuperpositionSpec& spec)
{
    const auto& a = spec.coefficients();
    if (samples.size() != a.size())
        throw std::invalid_argument("superposition: one coefficient per sample required");
    const Point4 pt = samples.front().point;
    for (const auto& s : samples) {
        const double gap = std::max({std::abs(s.point.x - pt.x), std::abs(s.point.y - pt.y),
                                     std::abs(s.point.z - pt.z), std::abs(s.point.t - pt.t)});
        if (gap > 1e-14) throw std::invalid_argument("superposition: samples taken at different points");
    }
    FieldSample out;
    out.point = pt;
    out.source = FieldSample::kComposite;
    auto acc = [](Gradient4& g, const Gradient4& s, double c) {
        g.x += c * s.x;
        g.y += c * s.y;
        g.z += c * s.z;
        g.t += c * s.t;
    };
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = a[i];
        const FieldSample& s = samples[i];
        out.p += c * s.p;
        out.q += c * s.q;
        out.r += c * s.r;
        acc(out.dp, s.dp, c);
        acc(out.dq, s.dq, c);
        acc(out.dr, s.dr, c);
    }
    return out;
}

// ------------------------------------------------------------ sampling

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double v = 0.0;
    while (i > 0) {
        v += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return v;
}

// Bit-level conversion so the stream is identical across standard libraries.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<Point4> halton_cloud(const Box& box, std::size_t count, std::uint64_t seed)
{
    const std::array<const std::array<double, 2>*, 4> axes = {&box.x, &box.y, &box.z, &box.t};
    for (const auto* ax : axes)
        if (!std::isfinite((*ax)[0]) || !std::isfinite((*ax)[1]) || (*ax)[0] > (*ax)[1])
            throw std::invalid_argument("sampling box: every axis needs finite lo <= hi");
    if (count == 0) throw std::invalid_argument("sampling box: point count must be positive");

    std::mt19937_64 rng(seed);
    std::array<double, 4> shift{};
    for (double& s : shift) s = unit_double(rng);
    constexpr std::array<std::uint64_t, 4> bases = {2, 3, 5, 7};

    std::vector<Point4> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::array<double, 4> c{};
        for (std::size_t d = 0; d < 4; ++d) {
            double u = radical_inverse(i + 1, bases[d]) + shift[d];
            u -= std::floor(u);
            const auto& ax = *axes[d];
            c[d] = ax[0] + (ax[1] - ax[0]) * u;
        }
        out.push_back({c[0], c[1], c[2], c[3]});
    }
    return out;
}

// ------------------------------------------------------------ solving

bool CloudSolution::admissible(std::size_t point) const
{
    for (const SeedPoint& sp : seeds[point])
        if (sp.hole || sp.fold || !sp.sample) return false;
    return true;
}

namespace {

SeedPoint make_seed_point(const Seed& seed, const Point4& pt, std::optional<RootReport> root,
                          const SolveOptions& options)
{
    SeedPoint sp;
    if (!root) {
        sp.hole = true;
        return sp;
    }
    sp.fold = !(std::abs(root->slope) >= options.fold_threshold);
    try {
        FieldSample s = seed.sample(pt, root->root, options.policy.tol.degenerate);
        s.root = root;
        sp.sample = std::move(s);
    } catch (const DegenerateRoot&) {
        sp.fold = true;
    } catch (const DomainError&) {
        sp.hole = true;
    }
    sp.root = std::move(root);
    return sp;
}

}  // namespace

CloudSolution solve_cloud(const SolutionSet& set, std::span<const Point4> points, const SolveOptions& options)
{
    options.policy.validate();
    CloudSolution out;
    out.points.assign(points.begin(), points.end());
    out.seeds.assign(points.size(), std::vector<SeedPoint>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) {
        const Seed& seed = *set.seeds[k];
        if (options.policy.continuation) {
            const auto steps = continue_branch(seed.relation(), points, options.policy);
            for (std::size_t i = 0; i < points.size(); ++i) {
                out.seeds[i][k] = make_seed_point(seed, points[i], steps[i].root, options);
                out.seeds[i][k].branch_jump = steps[i].branch_jump;
            }
        } else {
            for (std::size_t i = 0; i < points.size(); ++i) {
                auto roots = enumerate_roots(seed.relation(), points[i], options.policy);
                out.seeds[i][k] = make_seed_point(seed, points[i], select_root(roots, options.policy), options);
            }
        }
    }
    return out;
}

// ------------------------------------------------------------ theorem

Stat Stat::of(std::vector<double> values)
{
    Stat s;
    s.count = values.size();
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.max = values.back();
    const std::size_t n = values.size();
    s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return s;
}

double TheoremReport::superposed_fraction_within(double tol) const
{
    if (admissible == 0) return 0.0;
    std::size_t ok = 0;
    for (const auto& v : points)
        if (v.admissible && v.superposed_ghe.normalized <= tol) ++ok;
    return static_cast<double>(ok) / static_cast<double>(admissible);
}

double TheoremReport::superposed_fraction_above(double tol) const
{
    if (admissible == 0) return 0.0;
    std::size_t n = 0;
    for (const auto& v : points)
        if (v.admissible && v.superposed_ghe.normalized > tol) ++n;
    return static_cast<double>(n) / static_cast<double>(admissible);
}

TheoremReport verify_theorem(const SolutionSet& set, const CloudSolution& solved, const SuperpositionSpec& spec)
{
    if (spec.size() != set.size())
        throw std::invalid_argument("superposition: one coefficient per seed required");
    const auto& a = spec.coefficients();
    const GheConstants& k = set.constants;
    const std::size_t n = set.size();

    TheoremReport report;
    report.total = solved.points.size();
    std::vector<double> seed_ghe, seed_compat, n_term, sup_ghe, sup_compat, identity;

    for (std::size_t i = 0; i < solved.points.size(); ++i) {
        PointVerdict v;
        v.point = solved.points[i];
        for (const SeedPoint& sp : solved.seeds[i]) {
            v.hole = v.hole || sp.hole || (!sp.sample && !sp.fold);
            v.fold = v.fold || sp.fold;
        }
        v.admissible = solved.admissible(i);
        if (v.hole) ++report.holes;
        if (v.fold && !v.hole) ++report.folds;
        if (!v.admissible) {
            report.points.push_back(std::move(v));
            continue;
        }
        ++report.admissible;

        std::vector<FieldSample> samples;
        samples.reserve(n);
        for (const SeedPoint& sp : solved.seeds[i]) samples.push_back(*sp.sample);

        for (const FieldSample& s : samples) {
            v.seed_ghe.push_back(ghe_residual(s, k));
            auto [cy, cz] = compat_residuals(s);
            v.seed_compat_y.push_back(cy);
            v.seed_compat_z.push_back(cz);
            seed_ghe.push_back(v.seed_ghe.back().normalized);
            seed_compat.push_back(std::max(cy.normalized, cz.normalized));
        }
        v.n_term = n_term_balance(samples, k);
        n_term.push_back(v.n_term.normalized);

        const FieldSample sup = superpose(samples, spec);
        v.superposed_ghe = ghe_residual(sup, k);
        std::tie(v.superposed_compat_y, v.superposed_compat_z) = compat_residuals(sup);
        sup_ghe.push_back(v.superposed_ghe.normalized);
        sup_compat.push_back(std::max(v.superposed_compat_y.normalized, v.superposed_compat_z.normalized));

        double expanded = 0.0;
        double scale = v.superposed_ghe.scale;
        for (std::size_t s = 0; s < n; ++s) {
            const double w = a[s] * a[s];
            expanded += w * v.seed_ghe[s].value;
            scale = std::max(scale, w * v.seed_ghe[s].scale);
        }
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t t = s + 1; t < n; ++t) {
                const double w = a[s] * a[t];
                const ResidualReport cross = pairwise_balance(samples[s], samples[t], k);
                expanded += w * cross.value;
                scale = std::max(scale, std::abs(w) * cross.scale);
            }
        }
        const double gap = v.superposed_ghe.value - expanded;
        v.identity = {gap, scale, std::abs(gap) / (scale + kScaleGuard), v.point, Equation::identity};
        identity.push_back(v.identity.normalized);

        report.points.push_back(std::move(v));
    }

    report.seed_ghe = Stat::of(std::move(seed_ghe));
    report.seed_compat = Stat::of(std::move(seed_compat));
    report.n_term = Stat::of(std::move(n_term));
    report.superposed_ghe = Stat::of(std::move(sup_ghe));
    report.superposed_compat = Stat::of(std::move(sup_compat));
    report.identity = Stat::of(std::move(identity));
    return report;
}

TheoremReport verify_theorem(const SolutionSet& set, const SuperpositionSpec& spec,
                             std::span<const Point4> cloud, const SolveOptions& options)
{
    return verify_theorem(set, solve_cloud(set, cloud, options), spec);
}

}  // namespace ghe
