// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ghe/commands.hpp"
#include "ghe/fd_oracle.hpp"
#include "ghe/scenario.hpp"
#include "ghe/superpose.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace ghe;
namespace fs = std::filesystem;

namespace {

constexpr double kResidualTol = 1e-9;
constexpr double kSeedTolNegative = 1e-10;
constexpr double kViolation = 1e-3;
constexpr double kIdentityTol = 1e-12;
constexpr double kFdTol = 1e-6;
constexpr double kRootTol = 1e-12;
constexpr int kScenarios = 20;
constexpr std::size_t kPoints = 1200;
constexpr std::size_t kMinAdmissible = 1000;
constexpr double kTimeBudget = 60.0;

struct Outcome {
    bool pass = true;
    std::string detail;
};

void report(int id, const char* title, const Outcome& o)
{
    std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& pool)
{
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

std::string num(double v) { return fmt("(%.17g)", v); }

// Random shock scenario: polynomial F (degree 4), G (degree 3, positive cubic
// term so every point has a real root), m, n, alpha, beta, delta from a pool
// of functions that keep S = alpha + beta + delta >= 0 on the box.
Scenario random_shock_scenario(std::mt19937_64& rng, std::size_t seeds, std::uint64_t cloud_seed)
{
    static const std::vector<std::string> alphas = {"t", "t + sin(t)/2", "t^2/2 + t", "exp(t/2)", "t + t^3/3"};
    static const std::vector<std::string> betas = {"y", "y + y^3/3", "2*y + sin(y)", "exp(y) - 1", "y^2/2 + y"};
    static const std::vector<std::string> deltas = {"z^2/2", "z", "z + z^2/4", "sin(z) + 2*z", "exp(z/2)"};
    static const std::vector<std::string> ms = {"0", "y", "y^2", "sin(y)", "cos(y)", "exp(y/3)"};
    static const std::vector<std::string> ns = {"0", "z", "z^3", "sin(z)", "cos(z)", "exp(z/3)"};

    Scenario sc;
    sc.name = "random";
    sc.a = uniform(rng, -2, 2);
    sc.b = uniform(rng, -2, 2);
    sc.family = FamilyKind::shock;
    sc.shared = {{"alpha", pick(rng, alphas)}, {"beta", pick(rng, betas)}, {"delta", pick(rng, deltas)}};
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::string F = num(uniform(rng, 0.5, 2)) + "*p^2/2 + " + num(uniform(rng, -1, 1)) + "*p^3/6 + " +
                              num(uniform(rng, 0, 1)) + "*p^4/24";
        const std::string G = num(uniform(rng, -0.5, 0.5)) + " + " + num(uniform(rng, 0.5, 2)) + "*p + " +
                              num(uniform(rng, -1, 1)) + "*p^2/2 + " + num(uniform(rng, 0.2, 1)) + "*p^3/6";
        sc.seeds.push_back({{"F", F}, {"G", G}, {"m", pick(rng, ms)}, {"n", pick(rng, ns)}});
        sc.coefficients.push_back(uniform(rng, -3, 3));
    }
    sc.sampling.kind = Sampling::Kind::box;
    sc.sampling.box = Box{{-1, 1}, {0, 1}, {0, 1}, {0, 1}};
    sc.sampling.count = kPoints;
    sc.sampling.seed = cloud_seed;
    return sc;
}

struct RandomRun {
    Scenario scenario;
    std::unique_ptr<Model> model;
    CloudSolution solved;
    TheoremReport theorem;
};

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main()
{
    bool all = true;
    const auto record = [&](int id, const char* title, const Outcome& o) {
        report(id, title, o);
        all = all && o.pass;
    };

    // ------------------------------------------------------------ shared work
    std::mt19937_64 rng(20240611);
    const std::size_t sizes[] = {2, 3, 5};
    std::vector<RandomRun> runs;
    const auto start = std::chrono::steady_clock::now();
    for (int k = 0; k < kScenarios; ++k) {
        RandomRun run;
        run.scenario = random_shock_scenario(rng, sizes[k % 3], static_cast<std::uint64_t>(k + 1));
        run.model = std::make_unique<Model>(run.scenario);
        SolveOptions opts;
        opts.policy = run.scenario.branch;
        opts.fold_threshold = run.scenario.tol.fold;
        run.solved = solve_cloud(run.model->solutions(), run.scenario.sampling.cloud(), opts);
        run.theorem = verify_theorem(run.model->solutions(), run.solved, SuperpositionSpec(run.scenario.coefficients));
        runs.push_back(std::move(run));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // ------------------------------------------------------------ 1
    {
        Outcome o;
        double worst = 0.0;
        std::size_t min_admissible = kPoints;
        for (const auto& r : runs) {
            worst = std::max({worst, r.theorem.seed_ghe.max, r.theorem.seed_compat.max});
            min_admissible = std::min(min_admissible, r.theorem.admissible);
        }
        o.pass = worst <= kResidualTol && min_admissible >= kMinAdmissible && seconds <= kTimeBudget;
        o.detail = fmt("max seed residual %.3e", worst) + fmt(" (limit %.0e)", kResidualTol) +
                   ", min admissible points per scenario " + std::to_string(min_admissible) + fmt(", runtime %.1f s", seconds);
        record(1, "seed validity on 20 random shock scenarios", o);
    }

    // ------------------------------------------------------------ 2
    {
        Outcome o;
        double min_fraction = 1.0, worst = 0.0;
        for (const auto& r : runs) {
            min_fraction = std::min(min_fraction, r.theorem.superposed_fraction_within(kResidualTol));
            worst = std::max(worst, r.theorem.superposed_ghe.max);
        }
        o.pass = min_fraction >= 0.99;
        o.detail = fmt("min fraction within 1e-9: %.4f", min_fraction) + fmt(" (limit 0.99), max superposed residual %.3e", worst);
        record(2, "superposition theorem, n in {2,3,5}", o);
    }

    // ------------------------------------------------------------ 3
    {
        Outcome o;
        double pw_max = 0.0, nt_max = 0.0, red_max = 0.0;
        std::size_t mismatches = 0, n2_points = 0;
        for (const auto& r : runs) {
            const SolutionSet& set = r.model->solutions();
            for (std::size_t i = 0; i < r.solved.points.size(); ++i) {
                if (!r.solved.admissible(i)) continue;
                std::vector<FieldSample> s;
                for (const auto& sp : r.solved.seeds[i]) s.push_back(*sp.sample);
                const Point4& pt = r.solved.points[i];
                const ResidualReport nt = n_term_balance(s, set.constants);
                nt_max = std::max(nt_max, nt.normalized);
                for (std::size_t a = 0; a < s.size(); ++a) {
                    for (std::size_t b = a + 1; b < s.size(); ++b) {
                        const ResidualReport pw = pairwise_balance(s[a], s[b], set.constants);
                        pw_max = std::max(pw_max, pw.normalized);
                        const ResidualReport rb = reduced_balance(set.seeds[a]->mixed(pt, s[a].p),
                                                                  set.seeds[b]->mixed(pt, s[b].p), set.constants, pt);
                        red_max = std::max(red_max, rb.normalized);
                        if (s.size() == 2) {
                            ++n2_points;
                            if (!same_bits(pw.value, nt.value)) ++mismatches;
                        }
                    }
                }
            }
        }
        o.pass = pw_max <= kResidualTol && nt_max <= kResidualTol && red_max <= kResidualTol && mismatches == 0 &&
                 n2_points > 0;
        o.detail = fmt("pairwise max %.3e", pw_max) + fmt(", n-term max %.3e", nt_max) + fmt(", reduced max %.3e", red_max) +
                   ", n=2 bit mismatches " + std::to_string(mismatches) + "/" + std::to_string(n2_points);
        record(3, "balance conditions on shock scenarios", o);
    }

    // ------------------------------------------------------------ 4
    double negative_identity = 0.0;
    {
        Outcome o;
        try {
            const Scenario sc = load_scenario(fs::path(GHE_SCENARIO_DIR) / "general_unbalanced.json");
            const Model model(sc);
            const SolutionSet& set = model.solutions();
            SolveOptions opts;
            opts.policy = sc.branch;
            opts.fold_threshold = sc.tol.fold;
            const CloudSolution solved = solve_cloud(set, sc.sampling.cloud(), opts);
            const TheoremReport rep = verify_theorem(set, solved, SuperpositionSpec(sc.coefficients));
            std::size_t reduced_violating = 0;
            for (std::size_t i = 0; i < solved.points.size(); ++i) {
                if (!solved.admissible(i)) continue;
                const Point4& pt = solved.points[i];
                const auto rb = reduced_balance(set.seeds[0]->mixed(pt, solved.seeds[i][0].sample->p),
                                                set.seeds[1]->mixed(pt, solved.seeds[i][1].sample->p), set.constants, pt);
                if (rb.normalized > kViolation) ++reduced_violating;
            }
            const double total = static_cast<double>(rep.total);
            const double sup_fraction = static_cast<double>(std::count_if(rep.points.begin(), rep.points.end(), [](const PointVerdict& v) {
                                            return v.admissible && v.superposed_ghe.normalized > kViolation;
                                        })) / total;
            const double red_fraction = static_cast<double>(reduced_violating) / total;
            const double seed_max = std::max(rep.seed_ghe.max, rep.seed_compat.max);
            negative_identity = rep.identity.max;
            o.pass = seed_max <= kSeedTolNegative && sup_fraction > 0.5 && red_fraction > 0.5;
            o.detail = fmt("seed max %.3e", seed_max) + fmt(" (limit 1e-10), superposed > 1e-3 at %.3f", sup_fraction) +
                       fmt(", reduced > 1e-3 at %.3f of points", red_fraction);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = e.what();
        }
        record(4, "negative control (unbalanced general pair)", o);
    }

    // ------------------------------------------------------------ 5
    {
        Outcome o;
        double worst = negative_identity;
        std::size_t points = 0;
        for (const auto& r : runs) {
            worst = std::max(worst, r.theorem.identity.max);
            points += r.theorem.identity.count;
        }
        o.pass = worst <= kIdentityTol && points > 0;
        o.detail = fmt("max normalized gap %.3e", worst) + " over " + std::to_string(points) + " points" + fmt(" (limit %.0e)", kIdentityTol);
        record(5, "quadratic-form identity", o);
    }

    // ------------------------------------------------------------ 6
    {
        Outcome o;
        double worst = 0.0;
        std::size_t certified = 0, skipped = 0;
        for (const auto& r : runs) {
            const SolutionSet& set = r.model->solutions();
            CertOptions opts;
            opts.fold_threshold = r.scenario.tol.fold;
            for (std::size_t i = 0; i < std::min<std::size_t>(200, r.solved.points.size()); ++i) {
                for (std::size_t k = 0; k < set.size(); ++k) {
                    const SeedPoint& sp = r.solved.seeds[i][k];
                    if (!sp.sample) {
                        ++skipped;
                        continue;
                    }
                    const CertReport c = certify_sample(*sp.sample, *set.seeds[k], opts);
                    if (c.status != CertStatus::certified) {
                        ++skipped;
                        continue;
                    }
                    ++certified;
                    worst = std::max(worst, c.max_deviation);
                }
            }
        }
        const double x = 0.7;
        const auto sine = [](double v) { return std::sin(v); };
        const double e1 = std::abs(fd_derivative(sine, x, 1e-1) - std::cos(x));
        const double e2 = std::abs(fd_derivative(sine, x, 1e-2) - std::cos(x));
        const double ratio = e1 / e2;
        o.pass = worst <= kFdTol && certified > 0 && ratio >= 5e3 && ratio <= 2e4;
        o.detail = fmt("max deviation %.3e", worst) + " over " + std::to_string(certified) + " certified samples (" +
                   std::to_string(skipped) + " skipped near folds/holes)" + fmt(", sin error ratio h=1e-1/1e-2 %.0f", ratio);
        record(6, "derivative certification", o);
    }

    // ------------------------------------------------------------ 7
    {
        Outcome o;
        double worst = 0.0;
        std::size_t roots = 0;
        std::mt19937_64 arng(7);
        for (int k = 0; k < 10; ++k) {
            const double f2 = uniform(arng, 0.5, 2), f1 = uniform(arng, -1, 1), g1 = uniform(arng, 0.5, 2),
                         g0 = uniform(arng, -1, 1);
            Scenario sc;
            sc.family = FamilyKind::shock;
            sc.shared = {{"alpha", "t"}, {"beta", "2*y"}, {"delta", "z/2"}};
            sc.seeds.push_back({{"F", num(f2) + "*p^2/2 + " + num(f1) + "*p"}, {"G", num(g1) + "*p + " + num(g0)}, {"m", "0"}, {"n", "0"}});
            sc.coefficients = {1.0};
            const Model model(sc);
            const auto cloud = halton_cloud(Box{{-3, 3}, {0, 1}, {0, 1}, {0, 1}}, 200, static_cast<std::uint64_t>(k));
            for (const Point4& pt : cloud) {
                const auto found = enumerate_roots(model.solutions().seeds[0]->relation(), pt, sc.branch);
                const long double S = (long double)pt.t + 2.0L * pt.y + (long double)pt.z / 2;
                const long double exact = -((long double)pt.x + S * f1 + g0) / (S * f2 + g1);
                if (found.size() != 1) {
                    worst = 1.0;
                    continue;
                }
                ++roots;
                const double rel = static_cast<double>(std::abs((long double)found[0].root - exact) / std::abs(exact));
                worst = std::max(worst, rel);
            }
        }

        // Every shipped scenario: repeated runs give byte-identical CSV and reports.
        std::size_t scenarios = 0, mismatched = 0;
        const fs::path tmp = fs::temp_directory_path() / ("ghe_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(tmp);
        for (const auto& entry : fs::directory_iterator(GHE_SCENARIO_DIR)) {
            if (entry.path().extension() != ".json") continue;
            ++scenarios;
            const Scenario sc = load_scenario(entry.path());
            std::ostringstream sink;
            for (int rep = 0; rep < 2; ++rep) {
                const std::string tag = std::to_string(rep);
                run_sample(sc, tmp / ("s" + tag), sink);
                run_verify(sc, tmp / ("v" + tag), sink);
                run_balance(sc, tmp / ("b" + tag), sink);
                run_fdcheck(sc, tmp / ("f" + tag), sink);
            }
            for (const char* f : {"s", "v", "b", "f"})
                if (slurp(tmp / (std::string(f) + "0")) != slurp(tmp / (std::string(f) + "1"))) ++mismatched;
        }
        fs::remove_all(tmp);

        o.pass = worst <= kRootTol && roots == 2000 && scenarios > 0 && mismatched == 0;
        o.detail = fmt("max relative root error %.3e", worst) + " over " + std::to_string(roots) +
                   " affine roots, " + std::to_string(scenarios) + " shipped scenarios with " + std::to_string(mismatched) +
                   " non-reproducible outputs";
        record(7, "root-finder oracle equivalence and reproducibility", o);
    }

    return all ? 0 : 1;
}
