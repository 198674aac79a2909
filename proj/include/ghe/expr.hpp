#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ghe {

/// Ordered list of declared variable names (one or two, distinct).
class VariableSet {
public:
    VariableSet() = default;
    explicit VariableSet(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& operator[](std::size_t i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }

    /// Index of `name`, or -1 when not declared.
    int index_of(std::string_view name) const;

    bool operator==(const VariableSet&) const = default;

private:
    std::vector<std::string> names_;
};

/// Malformed source text. `offset` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    enum class Kind { syntax, unknown_identifier, unknown_function };

    ParseError(Kind kind, const std::string& what, std::size_t offset);
    Kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

private:
    Kind kind_;
    std::size_t offset_;
};

/// Evaluation left the real domain (log of non-positive, sqrt of negative,
/// division by zero, overflow). `subexpression` is the printed offending node.
class DomainError : public std::runtime_error {
public:
    DomainError(const std::string& what, std::string subexpression);
    const std::string& subexpression() const { return subexpression_; }

private:
    std::string subexpression_;
};

enum class NodeKind { constant, variable, negate, add, sub, mul, div, pow, call };
enum class Function { sin, cos, exp, log, sqrt, tanh };

std::string_view function_name(Function f);

struct Node {
    NodeKind kind = NodeKind::constant;
    double value = 0.0;             // constant
    int variable = -1;              // variable index into the owning VariableSet
    Function function = Function::sin;
    std::shared_ptr<const Node> lhs;  // unary operand / left operand / call argument
    std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

/// Immutable scalar expression over a declared variable set.
class Expr {
public:
    Expr(NodePtr root, VariableSet vars);

    static Expr constant(double value, VariableSet vars);
    static Expr variable(std::string_view name, VariableSet vars);

    const Node& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }
    const VariableSet& variables() const { return vars_; }

    bool is_constant() const { return root_->kind == NodeKind::constant; }
    /// True when no variable node occurs anywhere in the tree.
    bool is_variable_free() const;

    /// Evaluate with one value per declared variable (same order).
    double evaluate(std::span<const double> values) const;

    /// Canonical, fully parenthesised text; re-parses to the same function.
    std::string to_string() const;

    /// Re-express over `target`, mapping variables by name. Every variable
    /// used by this expression must be declared in `target`.
    Expr rebind(const VariableSet& target) const;

private:
    NodePtr root_;
    VariableSet vars_;
};

Expr parse(std::string_view source, const VariableSet& vars);
Expr parse(std::string_view source, std::vector<std::string> vars);

Expr differentiate(const Expr& e, std::string_view var);
Expr differentiate(const Expr& e, int var_index);

/// Evaluate with named bindings; every declared variable must be bound.
double evaluate(const Expr& e, const std::vector<std::pair<std::string, double>>& bindings);

// Builders with constant folding and 0/1 identity elimination.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr call(Function f, const Expr& arg);

/// Flattened postfix form of an Expr for repeated evaluation in hot loops.
/// `operator()` follows IEEE semantics (NaN/inf instead of errors);
/// `checked` throws DomainError like Expr::evaluate.
class Program {
public:
    Program() = default;
    explicit Program(const Expr& e);

    double operator()(std::span<const double> values) const;
    double operator()(double v0) const { return (*this)(std::span<const double>(&v0, 1)); }
    double operator()(double v0, double v1) const
    {
        const double v[2] = {v0, v1};
        return (*this)(std::span<const double>(v, 2));
    }

    double checked(std::span<const double> values) const;
    const Expr& expr() const { return *expr_; }

private:
    enum class Op : unsigned char {
        push_const, push_var, neg, add, sub, mul, div, pow,
        sin, cos, exp, log, sqrt, tanh
    };
    struct Instr {
        Op op;
        int arg;  // variable index or constant-pool index
    };
    void emit(const Node& n);

    std::shared_ptr<const Expr> expr_;
    std::vector<Instr> code_;
    std::vector<double> constants_;
    std::size_t max_stack_ = 0;
};

}  // namespace ghe
