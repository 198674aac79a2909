#pragma once

#include "ghe/calculus.hpp"
#include "ghe/implicit_solve.hpp"
#include "ghe/registry.hpp"
#include "ghe/superpose.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghe {

/// Configuration problem in a scenario file (schema, values, expressions).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Expectation { hold, violate };

struct Tolerances {
    double residual = 1e-9;         // seed, superposed and balance residuals
    double identity = 1e-10;        // quadratic-form decomposition
    double pass_fraction = 0.99;    // admissible points that must pass (hold)
    double violation = 1e-3;        // residual counted as a violation
    double violation_fraction = 0.5;  // points that must violate (violate)
    double fold = 1e-3;             // |D| below this is excluded as near-fold
    double fd = 1e-6;               // derivative certification
};

struct Sampling {
    enum class Kind { box, points, grid };
    Kind kind = Kind::box;
    Box box;
    std::size_t count = 1000;
    std::uint64_t seed = 1;
    std::vector<Point4> points;  // explicit, or expanded from a grid

    /// The point cloud: Halton points for a box, the explicit list otherwise.
    std::vector<Point4> cloud() const;
};

/// A parsed, validated scenario file. Expressions are kept as text; they
/// are compiled by build_model.
struct Scenario {
    std::string name;
    std::string description;
    double a = 1.0;
    double b = 1.0;
    FamilyKind family = FamilyKind::shock;
    std::map<std::string, std::string> shared;                // alpha, beta, delta
    std::vector<std::map<std::string, std::string>> seeds;    // F,G,m,n or Q,R,T
    std::vector<double> coefficients;
    Sampling sampling;
    BranchPolicy branch;
    Tolerances tol;
    Expectation expect = Expectation::hold;
};

/// Parse scenario JSON text. Unknown keys are rejected at every level.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Compiled families and their seed views. Non-movable: the solution set
/// points into the families.
class Model {
public:
    explicit Model(const Scenario& scenario);
    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    const SolutionSet& solutions() const { return set_; }
    const ShockFamily* shock() const { return shock_.get(); }
    const GeneralFamily* general() const { return general_.get(); }

private:
    std::unique_ptr<ShockFamily> shock_;
    std::unique_ptr<GeneralFamily> general_;
    SolutionSet set_;
};

}  // namespace ghe
