#include "ghe/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ghe {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "ghe-scenario/1";

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where)
{
    if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw ScenarioError(where + ": unknown key '" + key + "'");
}

double get_number(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ScenarioError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ScenarioError(where + ": expected a finite number");
    return d;
}

std::string get_string(const json& v, const std::string& where)
{
    if (!v.is_string()) throw ScenarioError(where + ": expected a string");
    return v.get<std::string>();
}

std::uint64_t get_count(const json& v, const std::string& where)
{
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ScenarioError(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::array<double, 2> get_range(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 2) throw ScenarioError(where + ": expected [lo, hi]");
    std::array<double, 2> r = {get_number(v[0], where + "[0]"), get_number(v[1], where + "[1]")};
    if (r[0] > r[1]) throw ScenarioError(where + ": empty range (lo > hi)");
    return r;
}

Sampling parse_sampling(const json& s)
{
    reject_unknown(s, {"box", "count", "seed", "points", "grid"}, "sampling");
    const int kinds = int(s.contains("box")) + int(s.contains("points")) + int(s.contains("grid"));
    if (kinds != 1) throw ScenarioError("sampling: exactly one of 'box', 'points', 'grid' is required");

    Sampling out;
    if (s.contains("box")) {
        const json& b = s["box"];
        reject_unknown(b, {"x", "y", "z", "t"}, "sampling.box");
        for (const char* ax : {"x", "y", "z", "t"})
            if (!b.contains(ax)) throw ScenarioError(std::string("sampling.box: missing axis '") + ax + "'");
        out.kind = Sampling::Kind::box;
        out.box.x = get_range(b["x"], "sampling.box.x");
        out.box.y = get_range(b["y"], "sampling.box.y");
        out.box.z = get_range(b["z"], "sampling.box.z");
        out.box.t = get_range(b["t"], "sampling.box.t");
        if (s.contains("count")) out.count = get_count(s["count"], "sampling.count");
        if (s.contains("seed")) out.seed = get_count(s["seed"], "sampling.seed");
        if (out.count == 0) throw ScenarioError("sampling.count: must be positive");
        return out;
    }
    if (s.contains("count") || s.contains("seed"))
        throw ScenarioError("sampling: 'count' and 'seed' apply only to 'box'");

    if (s.contains("points")) {
        out.kind = Sampling::Kind::points;
        const json& pts = s["points"];
        if (!pts.is_array() || pts.empty()) throw ScenarioError("sampling.points: expected a non-empty list");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string where = "sampling.points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 4) throw ScenarioError(where + ": expected [x, y, z, t]");
            out.points.push_back({get_number(pts[i][0], where), get_number(pts[i][1], where),
                                  get_number(pts[i][2], where), get_number(pts[i][3], where)});
        }
        return out;
    }

    out.kind = Sampling::Kind::grid;
    const json& g = s["grid"];
    reject_unknown(g, {"x", "y", "z", "t"}, "sampling.grid");
    std::array<std::vector<double>, 4> axes;
    const std::array<const char*, 4> names = {"x", "y", "z", "t"};
    for (std::size_t d = 0; d < 4; ++d) {
        const std::string where = std::string("sampling.grid.") + names[d];
        if (!g.contains(names[d])) throw ScenarioError(where + ": missing axis");
        const json& ax = g[names[d]];
        if (!ax.is_array() || ax.size() != 3) throw ScenarioError(where + ": expected [lo, hi, n]");
        const double lo = get_number(ax[0], where);
        const double hi = get_number(ax[1], where);
        const std::uint64_t n = get_count(ax[2], where);
        if (n == 0 || lo > hi) throw ScenarioError(where + ": empty axis");
        for (std::uint64_t k = 0; k < n; ++k)
            axes[d].push_back(n == 1 ? lo : (k == n - 1 ? hi : lo + (hi - lo) * double(k) / double(n - 1)));
    }
    // x varies fastest so consecutive points are neighbours along x.
    for (double t : axes[3])
        for (double z : axes[2])
            for (double y : axes[1])
                for (double x : axes[0]) out.points.push_back({x, y, z, t});
    return out;
}

BranchPolicy parse_branch(const json& b)
{
    reject_unknown(b, {"interval", "resolution", "select", "seed_value", "index", "continuation"}, "branch");
    BranchPolicy p;
    if (b.contains("interval")) {
        const auto r = get_range(b["interval"], "branch.interval");
        p.p_lo = r[0];
        p.p_hi = r[1];
    }
    if (b.contains("resolution")) p.resolution = static_cast<int>(get_count(b["resolution"], "branch.resolution"));
    if (b.contains("select")) {
        const std::string sel = get_string(b["select"], "branch.select");
        if (sel == "lowest")
            p.select = Selection::lowest;
        else if (sel == "nearest")
            p.select = Selection::nearest_to_seed;
        else if (sel == "index")
            p.select = Selection::index;
        else
            throw ScenarioError("branch.select: expected 'lowest', 'nearest' or 'index'");
    }
    if (b.contains("seed_value")) p.seed_value = get_number(b["seed_value"], "branch.seed_value");
    if (b.contains("index")) p.index = static_cast<int>(get_count(b["index"], "branch.index"));
    if (b.contains("continuation")) {
        if (!b["continuation"].is_boolean()) throw ScenarioError("branch.continuation: expected true/false");
        p.continuation = b["continuation"].get<bool>();
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    return p;
}

void parse_tolerances(const json& t, Scenario& sc)
{
    reject_unknown(t,
                   {"residual", "identity", "pass_fraction", "violation", "violation_fraction", "fold", "fd",
                    "root_abs", "root_rel", "degenerate"},
                   "tolerances");
    auto set = [&](const char* key, double& dst) {
        if (!t.contains(key)) return;
        dst = get_number(t[key], std::string("tolerances.") + key);
        if (dst < 0.0) throw ScenarioError(std::string("tolerances.") + key + ": must be non-negative");
    };
    set("residual", sc.tol.residual);
    set("identity", sc.tol.identity);
    set("pass_fraction", sc.tol.pass_fraction);
    set("violation", sc.tol.violation);
    set("violation_fraction", sc.tol.violation_fraction);
    set("fold", sc.tol.fold);
    set("fd", sc.tol.fd);
    set("root_abs", sc.branch.tol.abs);
    set("root_rel", sc.branch.tol.rel);
    set("degenerate", sc.branch.tol.degenerate);
}

SmoothFn compile(const std::string& source, std::vector<std::string> vars, const std::string& where)
{
    try {
        return SmoothFn::parse(source, std::move(vars));
    } catch (const ParseError& e) {
        throw ScenarioError(where + ": " + e.what() + " in \"" + source + "\"");
    }
}

std::vector<Probe> make_probes(const Scenario& sc)
{
    const std::vector<Point4> cloud = sc.sampling.kind == Sampling::Kind::box
                                          ? std::vector<Point4>{{0.5 * (sc.sampling.box.x[0] + sc.sampling.box.x[1]),
                                                                 0.5 * (sc.sampling.box.y[0] + sc.sampling.box.y[1]),
                                                                 0.5 * (sc.sampling.box.z[0] + sc.sampling.box.z[1]),
                                                                 0.5 * (sc.sampling.box.t[0] + sc.sampling.box.t[1])}}
                                          : std::vector<Point4>{sc.sampling.points.front()};
    std::vector<Probe> probes;
    constexpr int kP = 9;
    for (const Point4& pt : cloud)
        for (int k = 0; k < kP; ++k)
            probes.push_back({sc.branch.p_lo + (sc.branch.p_hi - sc.branch.p_lo) * k / (kP - 1), pt});
    return probes;
}

}  // namespace

std::vector<Point4> Sampling::cloud() const
{
    if (kind == Kind::box) return halton_cloud(box, count, seed);
    return points;
}

Scenario parse_scenario(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    reject_unknown(doc,
                   {"schema", "name", "description", "constants", "family", "shared", "seeds", "coefficients",
                    "sampling", "branch", "tolerances", "expect"},
                   "scenario");

    Scenario sc;
    if (doc.contains("schema") && get_string(doc["schema"], "schema") != kSchema)
        throw ScenarioError(std::string("schema: expected '") + kSchema + "'");
    if (doc.contains("name")) sc.name = get_string(doc["name"], "name");
    if (doc.contains("description")) sc.description = get_string(doc["description"], "description");

    if (!doc.contains("constants")) throw ScenarioError("scenario: missing 'constants'");
    reject_unknown(doc["constants"], {"a", "b"}, "constants");
    if (!doc["constants"].contains("a") || !doc["constants"].contains("b"))
        throw ScenarioError("constants: both 'a' and 'b' are required (c = -a - b)");
    sc.a = get_number(doc["constants"]["a"], "constants.a");
    sc.b = get_number(doc["constants"]["b"], "constants.b");
    if (sc.a == 0.0 && sc.b == 0.0) throw ScenarioError("constants: (a, b) must not both vanish");

    if (!doc.contains("family")) throw ScenarioError("scenario: missing 'family'");
    const std::string fam = get_string(doc["family"], "family");
    if (fam == "shock")
        sc.family = FamilyKind::shock;
    else if (fam == "general")
        sc.family = FamilyKind::general;
    else
        throw ScenarioError("family: expected 'shock' or 'general'");

    if (doc.contains("shared")) {
        reject_unknown(doc["shared"], {"alpha", "beta", "delta"}, "shared");
        for (const auto& [k, v] : doc["shared"].items()) sc.shared[k] = get_string(v, "shared." + k);
    }
    if (sc.family == FamilyKind::shock)
        for (const char* k : {"alpha", "beta", "delta"})
            if (!sc.shared.count(k)) throw ScenarioError(std::string("shared: missing '") + k + "'");

    if (!doc.contains("seeds") || !doc["seeds"].is_array() || doc["seeds"].empty())
        throw ScenarioError("seeds: expected a non-empty list (empty family)");
    const std::set<std::string> seed_keys = sc.family == FamilyKind::shock ? std::set<std::string>{"F", "G", "m", "n"}
                                                                           : std::set<std::string>{"Q", "R", "T"};
    for (std::size_t i = 0; i < doc["seeds"].size(); ++i) {
        const std::string where = "seeds[" + std::to_string(i) + "]";
        const json& s = doc["seeds"][i];
        reject_unknown(s, seed_keys, where);
        std::map<std::string, std::string> entry;
        for (const auto& key : seed_keys) {
            if (!s.contains(key)) {
                // m and n default to 0; everything else is required.
                if (key == "m" || key == "n") {
                    entry[key] = "0";
                    continue;
                }
                throw ScenarioError(where + ": missing '" + key + "'");
            }
            entry[key] = get_string(s[key], where + "." + key);
        }
        sc.seeds.push_back(std::move(entry));
    }

    if (doc.contains("coefficients")) {
        const json& c = doc["coefficients"];
        if (!c.is_array()) throw ScenarioError("coefficients: expected a list");
        for (std::size_t i = 0; i < c.size(); ++i)
            sc.coefficients.push_back(get_number(c[i], "coefficients[" + std::to_string(i) + "]"));
    } else {
        sc.coefficients.assign(sc.seeds.size(), 1.0);
    }
    if (sc.coefficients.size() != sc.seeds.size())
        throw ScenarioError("coefficients: need exactly one coefficient per seed");
    try {
        SuperpositionSpec check(sc.coefficients);
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(std::string("coefficients: ") + e.what());
    }

    if (!doc.contains("sampling")) throw ScenarioError("scenario: missing 'sampling'");
    sc.sampling = parse_sampling(doc["sampling"]);
    if (doc.contains("branch")) sc.branch = parse_branch(doc["branch"]);
    if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], sc);

    if (doc.contains("expect")) {
        const std::string e = get_string(doc["expect"], "expect");
        if (e == "hold")
            sc.expect = Expectation::hold;
        else if (e == "violate")
            sc.expect = Expectation::violate;
        else
            throw ScenarioError("expect: expected 'hold' or 'violate'");
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    Scenario sc = parse_scenario(ss.str());
    if (sc.name.empty()) sc.name = path.stem().string();
    return sc;
}

Model::Model(const Scenario& sc)
{
    const GheConstants constants(sc.a, sc.b);
    const std::vector<Probe> probes = make_probes(sc);
    if (sc.family == FamilyKind::shock) {
        SharedProfile shared(constants, compile(sc.shared.at("alpha"), {"t"}, "shared.alpha"),
                             compile(sc.shared.at("beta"), {"y"}, "shared.beta"),
                             compile(sc.shared.at("delta"), {"z"}, "shared.delta"));
        std::vector<ShockSolutionDef> defs;
        for (std::size_t i = 0; i < sc.seeds.size(); ++i) {
            const auto& s = sc.seeds[i];
            const std::string w = "seeds[" + std::to_string(i) + "].";
            defs.push_back({compile(s.at("F"), {"p"}, w + "F"), compile(s.at("G"), {"p"}, w + "G"),
                            compile(s.at("m"), {"y"}, w + "m"), compile(s.at("n"), {"z"}, w + "n")});
        }
        shock_ = std::make_unique<ShockFamily>(build_shock_family(std::move(defs), std::move(shared), probes));
        set_ = make_solution_set(*shock_);
    } else {
        std::vector<GeneralSolutionDef> defs;
        for (std::size_t i = 0; i < sc.seeds.size(); ++i) {
            const auto& s = sc.seeds[i];
            const std::string w = "seeds[" + std::to_string(i) + "].";
            defs.push_back({compile(s.at("Q"), {"p", "y"}, w + "Q"), compile(s.at("R"), {"p", "z"}, w + "R"),
                            compile(s.at("T"), {"p", "t"}, w + "T")});
        }
        general_ = std::make_unique<GeneralFamily>(build_general_family(std::move(defs), constants, probes));
        set_ = make_solution_set(*general_);
    }
}

}  // namespace ghe
