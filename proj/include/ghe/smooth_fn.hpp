#pragma once

#include "ghe/expr.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace ghe {

/// An Expr of one or two variables bundled with its symbolic partials up to
/// total order 3, each compiled for fast evaluation. Immutable.
///
/// Partials are addressed by multi-index (i, j): i derivatives in the first
/// variable, j in the second. For unary functions j must be 0.
class SmoothFn {
public:
    static constexpr int kCachedOrder = 3;

    explicit SmoothFn(Expr base);
    static SmoothFn parse(std::string_view source, std::vector<std::string> vars);

    int arity() const { return static_cast<int>(base_.variables().size()); }
    const VariableSet& variables() const { return base_.variables(); }
    const Expr& expr() const { return base_; }

    /// Symbolic partial; cached when i + j <= 3, otherwise differentiated now.
    Expr partial(int i, int j = 0) const;

    /// Unchecked evaluation of a partial (NaN/inf on domain failure).
    double d(int i, double a) const { return program(i, 0)(a); }
    double d(int i, int j, double a, double b) const { return program(i, j)(a, b); }

    double operator()(double a) const { return d(0, a); }
    double operator()(double a, double b) const { return d(0, 0, a, b); }

    /// Checked evaluation; throws DomainError.
    double checked(int i, int j, std::span<const double> values) const;

private:
    static constexpr int slot(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }
    static constexpr int kSlots = (kCachedOrder + 1) * (kCachedOrder + 2) / 2;
    const Program& program(int i, int j) const;

    Expr base_;
    std::vector<Expr> partials_;      // indexed by slot(i, j)
    std::vector<Program> programs_;
};

}  // namespace ghe
