#pragma once

#include "ghe/calculus.hpp"
#include "ghe/registry.hpp"
#include "ghe/smooth_fn.hpp"

#include <random>
#include <string>
#include <vector>

namespace ghe::test {

inline SmoothFn fn(const std::string& src, std::vector<std::string> vars) { return SmoothFn::parse(src, std::move(vars)); }
inline SmoothFn fp(const std::string& src) { return fn(src, {"p"}); }

inline ShockSolutionDef shock_def(const std::string& F, const std::string& G, const std::string& m = "0",
                                  const std::string& n = "0")
{
    return {fp(F), fp(G), fn(m, {"y"}), fn(n, {"z"})};
}

inline GeneralSolutionDef general_def(const std::string& Q, const std::string& R, const std::string& T)
{
    return {fn(Q, {"p", "y"}), fn(R, {"p", "z"}), fn(T, {"p", "t"})};
}

inline SharedProfile shared(const std::string& alpha, const std::string& beta, const std::string& delta,
                            double a = 1.0, double b = 1.0)
{
    return SharedProfile(GheConstants(a, b), fn(alpha, {"t"}), fn(beta, {"y"}), fn(delta, {"z"}));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Relative closeness with a unit floor: |a - b| <= tol (1 + |b|).
inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

}  // namespace ghe::test
