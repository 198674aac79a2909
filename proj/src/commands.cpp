#include "ghe/commands.hpp"

#include "ghe/fd_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace ghe {

namespace {

using nlohmann::ordered_json;

constexpr const char* kReportSchema = "ghe-report/1";

struct Check {
    std::string name;
    double value;
    double threshold;
    bool passed;
};

ordered_json stat_json(const Stat& s) { return {{"count", s.count}, {"max", s.max}, {"median", s.median}}; }

void print_stat(std::ostream& os, const char* label, const Stat& s)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-26s max %.3e  median %.3e  (%zu values)\n", label, s.max, s.median,
                  s.count);
    os << buf;
}

void print_checks(std::ostream& os, const std::vector<Check>& checks)
{
    for (const auto& c : checks) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "  [%s] %-40s %.3e (limit %.3e)\n", c.passed ? "ok" : "FAIL",
                      c.name.c_str(), c.value, c.threshold);
        os << buf;
    }
}

ordered_json checks_json(const std::vector<Check>& checks)
{
    ordered_json out = ordered_json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
    return out;
}

bool all_passed(const std::vector<Check>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

ordered_json report_header(const Scenario& sc, Command c)
{
    ordered_json j;
    j["schema"] = kReportSchema;
    j["command"] = std::string(command_name(c));
    j["scenario"] = sc.name;
    j["family"] = sc.family == FamilyKind::shock ? "shock" : "general";
    j["seeds"] = sc.seeds.size();
    j["constants"] = {{"a", sc.a}, {"b", sc.b}, {"c", -sc.a - sc.b}};
    j["expect"] = sc.expect == Expectation::hold ? "hold" : "violate";
    return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot write output file '" + path.string() + "'");
    out << content;
    if (!out) throw ScenarioError("failed writing output file '" + path.string() + "'");
}

void print_banner(std::ostream& os, const Scenario& sc, Command c)
{
    os << command_name(c) << ": " << sc.name << " (" << (sc.family == FamilyKind::shock ? "shock" : "general")
       << " family, " << sc.seeds.size() << " seed" << (sc.seeds.size() == 1 ? "" : "s") << ", expect "
       << (sc.expect == Expectation::hold ? "hold" : "violate") << ")\n";
}

SolveOptions solve_options(const Scenario& sc)
{
    SolveOptions o;
    o.policy = sc.branch;
    o.fold_threshold = sc.tol.fold;
    return o;
}

std::size_t count_jumps(const CloudSolution& solved)
{
    std::size_t n = 0;
    for (const auto& row : solved.seeds)
        for (const auto& sp : row)
            if (sp.branch_jump) ++n;
    return n;
}

int finish(std::ostream& text, bool passed)
{
    text << "verdict: " << (passed ? "PASS" : "FAIL") << "\n";
    return passed ? kExitPass : kExitResidualFailure;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name)
{
    if (name == "verify") return Command::verify;
    if (name == "sample") return Command::sample;
    if (name == "balance") return Command::balance;
    if (name == "fdcheck") return Command::fdcheck;
    return std::nullopt;
}

std::string_view command_name(Command c)
{
    switch (c) {
    case Command::verify: return "verify";
    case Command::sample: return "sample";
    case Command::balance: return "balance";
    case Command::fdcheck: return "fdcheck";
    }
    return "?";
}

void apply_overrides(Scenario& sc, const CommandOptions& options)
{
    if (options.points) {
        if (*options.points == 0) throw ScenarioError("--points must be positive");
        if (sc.sampling.kind == Sampling::Kind::box)
            sc.sampling.count = *options.points;
        else if (sc.sampling.points.size() > *options.points)
            sc.sampling.points.resize(*options.points);
    }
    if (options.seed) sc.sampling.seed = *options.seed;
    if (options.tol) {
        if (!(*options.tol >= 0.0) || !std::isfinite(*options.tol))
            throw ScenarioError("--tol must be a finite non-negative number");
        sc.tol.residual = *options.tol;
    }
}

std::filesystem::path default_output(const std::filesystem::path& scenario_path, Command c)
{
    const std::string stem = scenario_path.stem().string();
    if (c == Command::sample) return stem + ".sample.csv";
    return stem + "." + std::string(command_name(c)) + ".json";
}

// ------------------------------------------------------------ verify

int run_verify(const Scenario& sc, const std::filesystem::path& output, std::ostream& text)
{
    const Model model(sc);
    const SolutionSet& set = model.solutions();
    const SuperpositionSpec spec(sc.coefficients);
    const std::vector<Point4> cloud = sc.sampling.cloud();
    const CloudSolution solved = solve_cloud(set, cloud, solve_options(sc));
    const TheoremReport rep = verify_theorem(set, solved, spec);

    std::size_t sup_ok = 0;
    for (const auto& v : rep.points)
        if (v.admissible && v.superposed_ghe.normalized <= sc.tol.residual &&
            v.superposed_compat_y.normalized <= sc.tol.residual && v.superposed_compat_z.normalized <= sc.tol.residual)
            ++sup_ok;
    const double admissible = static_cast<double>(rep.admissible);
    const double sup_fraction = rep.admissible ? static_cast<double>(sup_ok) / admissible : 0.0;
    const double violated = rep.superposed_fraction_above(sc.tol.violation);

    std::vector<Check> checks;
    checks.push_back({"admissible points", admissible, 1.0, rep.admissible > 0});
    checks.push_back({"seed GHE residual (max)", rep.seed_ghe.max, sc.tol.residual,
                      rep.seed_ghe.max <= sc.tol.residual});
    checks.push_back({"seed compatibility residual (max)", rep.seed_compat.max, sc.tol.residual,
                      rep.seed_compat.max <= sc.tol.residual});
    if (sc.expect == Expectation::hold) {
        checks.push_back({"superposed passing fraction", sup_fraction, sc.tol.pass_fraction,
                          rep.admissible > 0 && sup_fraction >= sc.tol.pass_fraction});
        checks.push_back({"quadratic-form identity (max)", rep.identity.max, sc.tol.identity,
                          rep.identity.max <= sc.tol.identity});
    } else {
        checks.push_back({"superposed violating fraction", violated, sc.tol.violation_fraction,
                          violated > sc.tol.violation_fraction});
    }
    const bool passed = all_passed(checks);

    print_banner(text, sc, Command::verify);
    text << "  points: " << rep.total << " total, " << rep.admissible << " admissible, " << rep.holes
         << " holes, " << rep.folds << " near folds, " << count_jumps(solved) << " branch jumps\n";
    print_stat(text, "seed GHE", rep.seed_ghe);
    print_stat(text, "seed compatibility", rep.seed_compat);
    print_stat(text, "n-term balance", rep.n_term);
    print_stat(text, "superposed GHE", rep.superposed_ghe);
    print_stat(text, "superposed compatibility", rep.superposed_compat);
    print_stat(text, "quadratic-form identity", rep.identity);
    print_checks(text, checks);

    ordered_json j = report_header(sc, Command::verify);
    j["coefficients"] = sc.coefficients;
    j["counts"] = {{"total", rep.total},
                   {"admissible", rep.admissible},
                   {"holes", rep.holes},
                   {"folds", rep.folds},
                   {"branch_jumps", count_jumps(solved)}};
    j["residuals"] = {{"seed_ghe", stat_json(rep.seed_ghe)},
                      {"seed_compat", stat_json(rep.seed_compat)},
                      {"n_term_balance", stat_json(rep.n_term)},
                      {"superposed_ghe", stat_json(rep.superposed_ghe)},
                      {"superposed_compat", stat_json(rep.superposed_compat)},
                      {"identity", stat_json(rep.identity)}};
    j["superposed_fraction_within"] = sup_fraction;
    j["superposed_fraction_violating"] = violated;
    j["checks"] = checks_json(checks);
    j["passed"] = passed;
    write_text_file(output, j.dump(2) + "\n");
    text << "  report: " << output.string() << "\n";
    return finish(text, passed);
}

// ------------------------------------------------------------ sample

std::string sample_header(std::size_t seeds)
{
    std::string h = "x,y,z,t,status";
    auto add_fields = [&](const std::string& pre) {
        for (const char* f : {"p", "q", "r"}) h += "," + pre + f;
        for (int k = 0; k < kCertifiedPartials; ++k) h += "," + pre + std::string(partial_name(k));
    };
    for (std::size_t i = 0; i < seeds; ++i) {
        const std::string pre = "s" + std::to_string(i + 1) + "_";
        add_fields(pre);
        h += "," + pre + "D," + pre + "ghe," + pre + "compat_y," + pre + "compat_z";
    }
    add_fields("sup_");
    h += ",sup_ghe,sup_compat_y,sup_compat_z,n_term_balance,identity";
    return h;
}

namespace {

void put(std::string& line, double v)
{
    line += ',';
    if (std::isnan(v)) {
        line += "nan";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

void put_sample(std::string& line, const FieldSample* s)
{
    const double nan = std::nan("");
    if (!s) {
        for (int k = 0; k < 3 + kCertifiedPartials; ++k) put(line, nan);
        return;
    }
    put(line, s->p);
    put(line, s->q);
    put(line, s->r);
    for (const Gradient4* g : {&s->dp, &s->dq, &s->dr})
        for (Axis a : kAxes) put(line, (*g)[a]);
}

}  // namespace

int run_sample(const Scenario& sc, const std::filesystem::path& output, std::ostream& text)
{
    const Model model(sc);
    const SolutionSet& set = model.solutions();
    const SuperpositionSpec spec(sc.coefficients);
    const std::vector<Point4> cloud = sc.sampling.cloud();
    const CloudSolution solved = solve_cloud(set, cloud, solve_options(sc));
    const TheoremReport rep = verify_theorem(set, solved, spec);
    const double nan = std::nan("");

    std::string csv = sample_header(set.size()) + "\n";
    for (std::size_t i = 0; i < solved.points.size(); ++i) {
        const PointVerdict& v = rep.points[i];
        std::string line;
        const Point4& pt = solved.points[i];
        char buf[32];
        for (double c : {pt.x, pt.y, pt.z, pt.t}) {
            std::snprintf(buf, sizeof buf, "%.17g", c);
            if (!line.empty()) line += ',';
            line += buf;
        }
        line += ',';
        line += v.admissible ? "ok" : (v.hole ? "hole" : "fold");

        for (std::size_t k = 0; k < set.size(); ++k) {
            const SeedPoint& sp = solved.seeds[i][k];
            put_sample(line, sp.sample ? &*sp.sample : nullptr);
            put(line, sp.root ? sp.root->slope : nan);
            if (v.admissible) {
                put(line, v.seed_ghe[k].normalized);
                put(line, v.seed_compat_y[k].normalized);
                put(line, v.seed_compat_z[k].normalized);
            } else {
                for (int c = 0; c < 3; ++c) put(line, nan);
            }
        }
        if (v.admissible) {
            std::vector<FieldSample> samples;
            for (const SeedPoint& sp : solved.seeds[i]) samples.push_back(*sp.sample);
            const FieldSample sup = superpose(samples, spec);
            put_sample(line, &sup);
            put(line, v.superposed_ghe.normalized);
            put(line, v.superposed_compat_y.normalized);
            put(line, v.superposed_compat_z.normalized);
            put(line, v.n_term.normalized);
            put(line, v.identity.normalized);
        } else {
            put_sample(line, nullptr);
            for (int c = 0; c < 5; ++c) put(line, nan);
        }
        csv += line;
        csv += '\n';
    }
    write_text_file(output, csv);

    print_banner(text, sc, Command::sample);
    text << "  points: " << rep.total << " total, " << rep.admissible << " admissible, " << rep.holes
         << " holes, " << rep.folds << " near folds\n";
    text << "  wrote " << output.string() << "\n";
    return kExitPass;
}

// ------------------------------------------------------------ balance

int run_balance(const Scenario& sc, const std::filesystem::path& output, std::ostream& text)
{
    const Model model(sc);
    const SolutionSet& set = model.solutions();
    const GheConstants& k = set.constants;
    const std::size_t n = set.size();
    const std::vector<Point4> cloud = sc.sampling.cloud();
    const CloudSolution solved = solve_cloud(set, cloud, solve_options(sc));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<std::vector<double>> pair_vals(pairs.size()), reduced_vals(pairs.size());
    std::vector<double> n_term_vals, pair_max_vals, reduced_max_vals;
    std::size_t admissible = 0, n_term_violating = 0, reduced_violating = 0, bit_mismatches = 0;

    for (std::size_t i = 0; i < solved.points.size(); ++i) {
        if (!solved.admissible(i)) continue;
        ++admissible;
        std::vector<FieldSample> samples;
        for (const SeedPoint& sp : solved.seeds[i]) samples.push_back(*sp.sample);
        const Point4& pt = solved.points[i];

        const ResidualReport nt = n_term_balance(samples, k);
        n_term_vals.push_back(nt.normalized);
        if (nt.normalized > sc.tol.violation) ++n_term_violating;

        double pair_max = 0.0, red_max = 0.0;
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const auto [a, b] = pairs[q];
            const ResidualReport pw = pairwise_balance(samples[a], samples[b], k);
            const ResidualReport rb = reduced_balance(set.seeds[a]->mixed(pt, samples[a].p),
                                                      set.seeds[b]->mixed(pt, samples[b].p), k, pt);
            pair_vals[q].push_back(pw.normalized);
            reduced_vals[q].push_back(rb.normalized);
            pair_max = std::max(pair_max, pw.normalized);
            red_max = std::max(red_max, rb.normalized);
            if (n == 2 && std::memcmp(&pw.value, &nt.value, sizeof(double)) != 0) ++bit_mismatches;
        }
        if (!pairs.empty()) {
            pair_max_vals.push_back(pair_max);
            reduced_max_vals.push_back(red_max);
            if (red_max > sc.tol.violation) ++reduced_violating;
        }
    }

    const Stat n_term = Stat::of(n_term_vals);
    const Stat pair_all = Stat::of(pair_max_vals);
    const Stat reduced_all = Stat::of(reduced_max_vals);
    const double denom = admissible ? static_cast<double>(admissible) : 1.0;

    std::vector<Check> checks;
    checks.push_back({"admissible points", static_cast<double>(admissible), 1.0, admissible > 0});
    if (sc.expect == Expectation::hold) {
        checks.push_back({"pairwise balance (max)", pair_all.max, sc.tol.residual, pair_all.max <= sc.tol.residual});
        checks.push_back({"n-term balance (max)", n_term.max, sc.tol.residual, n_term.max <= sc.tol.residual});
        checks.push_back({"reduced balance (max)", reduced_all.max, sc.tol.residual,
                          reduced_all.max <= sc.tol.residual});
    } else {
        const double nf = static_cast<double>(n_term_violating) / denom;
        const double rf = static_cast<double>(reduced_violating) / denom;
        checks.push_back({"n-term balance violating fraction", nf, sc.tol.violation_fraction,
                          nf > sc.tol.violation_fraction});
        checks.push_back({"reduced balance violating fraction", rf, sc.tol.violation_fraction,
                          rf > sc.tol.violation_fraction});
    }
    if (n == 2)
        checks.push_back({"n-term vs pairwise bit mismatches", static_cast<double>(bit_mismatches), 0.0,
                          bit_mismatches == 0});
    const bool passed = all_passed(checks);

    print_banner(text, sc, Command::balance);
    text << "  points: " << solved.points.size() << " total, " << admissible << " admissible\n";
    if (pairs.empty()) text << "  no seed pairs (single seed): n-term balance is an empty sum\n";
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        const std::string label = "pair (" + std::to_string(pairs[q].first + 1) + "," +
                                  std::to_string(pairs[q].second + 1) + ")";
        print_stat(text, (label + " pairwise").c_str(), Stat::of(pair_vals[q]));
        print_stat(text, (label + " reduced").c_str(), Stat::of(reduced_vals[q]));
    }
    print_stat(text, "n-term balance", n_term);
    print_checks(text, checks);

    ordered_json j = report_header(sc, Command::balance);
    j["counts"] = {{"total", solved.points.size()}, {"admissible", admissible}};
    ordered_json jp = ordered_json::array();
    for (std::size_t q = 0; q < pairs.size(); ++q)
        jp.push_back({{"seeds", {pairs[q].first + 1, pairs[q].second + 1}},
                      {"pairwise", stat_json(Stat::of(pair_vals[q]))},
                      {"reduced", stat_json(Stat::of(reduced_vals[q]))}});
    j["pairs"] = jp;
    j["n_term_balance"] = stat_json(n_term);
    j["n_term_violating_fraction"] = static_cast<double>(n_term_violating) / denom;
    j["reduced_violating_fraction"] = static_cast<double>(reduced_violating) / denom;
    if (n == 2) j["n_term_pairwise_bit_mismatches"] = bit_mismatches;
    j["checks"] = checks_json(checks);
    j["passed"] = passed;
    write_text_file(output, j.dump(2) + "\n");
    text << "  report: " << output.string() << "\n";
    return finish(text, passed);
}

// ------------------------------------------------------------ fdcheck

int run_fdcheck(const Scenario& sc, const std::filesystem::path& output, std::ostream& text)
{
    const Model model(sc);
    const SolutionSet& set = model.solutions();
    const std::vector<Point4> cloud = sc.sampling.cloud();
    const CloudSolution solved = solve_cloud(set, cloud, solve_options(sc));

    CertOptions opts;
    opts.fold_threshold = sc.tol.fold;
    opts.tol = sc.branch.tol;

    std::size_t certified = 0, near_fold = 0, holes = 0, unsolved = 0;
    std::array<double, kCertifiedPartials> worst{};
    std::vector<double> maxima;
    for (std::size_t i = 0; i < solved.points.size(); ++i) {
        for (std::size_t s = 0; s < set.size(); ++s) {
            const SeedPoint& sp = solved.seeds[i][s];
            if (!sp.sample) {
                if (sp.hole)
                    ++unsolved;
                else
                    ++near_fold;
                continue;
            }
            const CertReport r = certify_sample(*sp.sample, *set.seeds[s], opts);
            switch (r.status) {
            case CertStatus::near_fold: ++near_fold; break;
            case CertStatus::stencil_hole: ++holes; break;
            case CertStatus::certified:
                ++certified;
                maxima.push_back(r.max_deviation);
                for (std::size_t c = 0; c < worst.size(); ++c) worst[c] = std::max(worst[c], r.deviation[c]);
                break;
            }
        }
    }
    const Stat dev = Stat::of(maxima);

    std::vector<Check> checks;
    checks.push_back({"certified samples", static_cast<double>(certified), 1.0, certified > 0});
    checks.push_back({"FD deviation (max)", dev.max, sc.tol.fd, dev.max <= sc.tol.fd});
    const bool passed = all_passed(checks);

    print_banner(text, sc, Command::fdcheck);
    text << "  samples: " << certified << " certified, " << near_fold << " near folds (skipped), " << holes
         << " stencil holes, " << unsolved << " unsolved\n";
    print_stat(text, "FD deviation", dev);
    for (int c = 0; c < kCertifiedPartials; ++c) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "    %-4s max %.3e\n", std::string(partial_name(c)).c_str(),
                      worst[static_cast<std::size_t>(c)]);
        text << buf;
    }
    print_checks(text, checks);

    ordered_json j = report_header(sc, Command::fdcheck);
    j["counts"] = {{"points", solved.points.size()},
                   {"certified", certified},
                   {"near_fold", near_fold},
                   {"stencil_hole", holes},
                   {"unsolved", unsolved}};
    j["deviation"] = stat_json(dev);
    ordered_json per = ordered_json::object();
    for (int c = 0; c < kCertifiedPartials; ++c)
        per[std::string(partial_name(c))] = worst[static_cast<std::size_t>(c)];
    j["deviation_by_partial"] = per;
    j["checks"] = checks_json(checks);
    j["passed"] = passed;
    write_text_file(output, j.dump(2) + "\n");
    text << "  report: " << output.string() << "\n";
    return finish(text, passed);
}

// ------------------------------------------------------------ dispatch

int run_command(Command c, const std::filesystem::path& scenario_path, const CommandOptions& options,
                std::ostream& text, std::ostream& err)
{
    try {
        Scenario sc = load_scenario(scenario_path);
        apply_overrides(sc, options);
        const std::filesystem::path out = options.out ? *options.out : default_output(scenario_path, c);
        switch (c) {
        case Command::verify: return run_verify(sc, out, text);
        case Command::sample: return run_sample(sc, out, text);
        case Command::balance: return run_balance(sc, out, text);
        case Command::fdcheck: return run_fdcheck(sc, out, text);
        }
    } catch (const ScenarioError& e) {
        err << "configuration error: " << e.what() << "\n";
    } catch (const ParseError& e) {
        err << "expression error: " << e.what() << "\n";
    } catch (const FamilyError& e) {
        err << "family error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        err << "configuration error: " << e.what() << "\n";
    }
    return kExitConfigError;
}

}  // namespace ghe
