#include "ghe/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <utility>

namespace ghe {

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions = {{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"exp", Function::exp},
    {"log", Function::log},
    {"sqrt", Function::sqrt},
    {"tanh", Function::tanh},
}};

std::optional<Function> lookup_function(std::string_view name)
{
    for (const auto& [n, f] : kFunctions)
        if (n == name) return f;
    return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

NodePtr make_constant(double v)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = v;
    return n;
}

NodePtr make_variable(int index)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::variable;
    n->variable = index;
    return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call_node(Function f, NodePtr arg)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::call;
    n->function = f;
    n->lhs = std::move(arg);
    return n;
}

bool is_const(const NodePtr& n) { return n->kind == NodeKind::constant; }
bool is_const(const NodePtr& n, double v) { return is_const(n) && n->value == v; }

double apply_function(Function f, double x)
{
    switch (f) {
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::exp: return std::exp(x);
    case Function::log: return std::log(x);
    case Function::sqrt: return std::sqrt(x);
    case Function::tanh: return std::tanh(x);
    }
    return std::nan("");
}

// Folding only produces finite constants; anything else stays symbolic so
// that evaluation reports the domain error at the right place.
std::optional<double> finite(double v)
{
    if (std::isfinite(v)) return v;
    return std::nullopt;
}

// ---------------------------------------------------------------- builders

NodePtr build_neg(NodePtr a)
{
    if (is_const(a)) return make_constant(-a->value);
    if (a->kind == NodeKind::negate) return a->lhs;
    return make_node(NodeKind::negate, std::move(a));
}

NodePtr build_add(NodePtr a, NodePtr b)
{
    if (is_const(a) && is_const(b))
        if (auto v = finite(a->value + b->value)) return make_constant(*v);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node(NodeKind::add, std::move(a), std::move(b));
}

NodePtr build_sub(NodePtr a, NodePtr b)
{
    if (is_const(a) && is_const(b))
        if (auto v = finite(a->value - b->value)) return make_constant(*v);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return build_neg(std::move(b));
    return make_node(NodeKind::sub, std::move(a), std::move(b));
}

NodePtr build_mul(NodePtr a, NodePtr b)
{
    if (is_const(a) && is_const(b))
        if (auto v = finite(a->value * b->value)) return make_constant(*v);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(b)) std::swap(a, b);
    // c1 * (c2 * x) -> (c1 c2) * x
    if (is_const(a) && b->kind == NodeKind::mul && is_const(b->lhs))
        if (auto v = finite(a->value * b->lhs->value)) return build_mul(make_constant(*v), b->rhs);
    return make_node(NodeKind::mul, std::move(a), std::move(b));
}

NodePtr build_div(NodePtr a, NodePtr b)
{
    if (is_const(a) && is_const(b) && b->value != 0.0)
        if (auto v = finite(a->value / b->value)) return make_constant(*v);
    if (is_const(b, 1.0)) return a;
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_constant(0.0);
    // (c1 * x) / c2 -> (c1 / c2) * x
    if (is_const(b) && b->value != 0.0 && a->kind == NodeKind::mul && is_const(a->lhs))
        if (auto v = finite(a->lhs->value / b->value)) return build_mul(make_constant(*v), a->rhs);
    return make_node(NodeKind::div, std::move(a), std::move(b));
}

NodePtr build_pow(NodePtr a, NodePtr b)
{
    if (is_const(a) && is_const(b)) {
        const double base = a->value;
        const double ex = b->value;
        const bool valid = !(base < 0.0 && ex != std::trunc(ex)) && !(base == 0.0 && ex < 0.0);
        if (valid)
            if (auto v = finite(std::pow(base, ex))) return make_constant(*v);
    }
    if (is_const(b, 1.0)) return a;
    if (is_const(b, 0.0)) return make_constant(1.0);
    return make_node(NodeKind::pow, std::move(a), std::move(b));
}

NodePtr build_call(Function f, NodePtr a)
{
    if (is_const(a)) {
        const double x = a->value;
        const bool valid = !(f == Function::log && x <= 0.0) && !(f == Function::sqrt && x < 0.0);
        if (valid)
            if (auto v = finite(apply_function(f, x))) return make_constant(*v);
    }
    return make_call_node(f, std::move(a));
}

// ---------------------------------------------------------------- printing

void append_number(std::string& out, double v)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    if (v < 0.0) {
        out += '(';
        out.append(buf.data(), end);
        out += ')';
    } else {
        out.append(buf.data(), end);
    }
}

void print_node(const Node& n, const VariableSet& vars, std::string& out)
{
    switch (n.kind) {
    case NodeKind::constant: append_number(out, n.value); return;
    case NodeKind::variable: out += vars[static_cast<std::size_t>(n.variable)]; return;
    case NodeKind::negate:
        out += "(-";
        print_node(*n.lhs, vars, out);
        out += ')';
        return;
    case NodeKind::call:
        out += function_name(n.function);
        out += '(';
        print_node(*n.lhs, vars, out);
        out += ')';
        return;
    default: break;
    }
    const char* op = " + ";
    switch (n.kind) {
    case NodeKind::sub: op = " - "; break;
    case NodeKind::mul: op = "*"; break;
    case NodeKind::div: op = "/"; break;
    case NodeKind::pow: op = "^"; break;
    default: break;
    }
    out += '(';
    print_node(*n.lhs, vars, out);
    out += op;
    print_node(*n.rhs, vars, out);
    out += ')';
}

std::string print(const Node& n, const VariableSet& vars)
{
    std::string s;
    print_node(n, vars, s);
    return s;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    Parser(std::string_view src, const VariableSet& vars) : src_(src), vars_(vars) {}

    NodePtr parse_all()
    {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError(ParseError::Kind::syntax, "empty expression", 0);
        NodePtr root = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) unexpected();
        return root;
    }

private:
    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void unexpected()
    {
        if (pos_ >= src_.size())
            throw ParseError(ParseError::Kind::syntax, "unexpected end of input", pos_);
        throw ParseError(ParseError::Kind::syntax,
                         std::string("unexpected '") + src_[pos_] + "'", pos_);
    }

    NodePtr parse_sum()
    {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = build_add(lhs, parse_product());
            else if (accept('-'))
                lhs = build_sub(lhs, parse_product());
            else
                return lhs;
        }
    }

    NodePtr parse_product()
    {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = build_mul(lhs, parse_unary());
            else if (accept('/'))
                lhs = build_div(lhs, parse_unary());
            else
                return lhs;
        }
    }

    // Unary minus binds looser than '^': -p^2 == -(p^2).
    NodePtr parse_unary()
    {
        if (accept('-')) return build_neg(parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power()
    {
        NodePtr base = parse_primary();
        if (accept('^')) return build_pow(base, parse_unary());
        return base;
    }

    NodePtr parse_primary()
    {
        skip_ws();
        if (pos_ >= src_.size()) unexpected();
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!accept(')')) unexpected();
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        unexpected();
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            pos_ = start;
            unexpected();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(v))
            throw ParseError(ParseError::Kind::syntax, "invalid numeric literal", start);
        return make_constant(v);
    }

    NodePtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        const std::size_t after = pos_;
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == '(') {
            auto f = lookup_function(name);
            if (!f)
                throw ParseError(ParseError::Kind::unknown_function,
                                 "unknown function '" + std::string(name) + "'", start);
            ++pos_;
            NodePtr arg = parse_sum();
            if (!accept(')')) unexpected();
            return build_call(*f, arg);
        }
        pos_ = after;
        const int index = vars_.index_of(name);
        if (index < 0)
            throw ParseError(ParseError::Kind::unknown_identifier,
                             "unknown identifier '" + std::string(name) + "'", start);
        return make_variable(index);
    }

    std::string_view src_;
    const VariableSet& vars_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- evaluation

double eval_node(const Node& n, std::span<const double> values, const VariableSet& vars)
{
    auto fail = [&](const char* what) -> double { throw DomainError(what, print(n, vars)); };
    double v = 0.0;
    switch (n.kind) {
    case NodeKind::constant: return n.value;
    case NodeKind::variable: return values[static_cast<std::size_t>(n.variable)];
    case NodeKind::negate: return -eval_node(*n.lhs, values, vars);
    case NodeKind::add: v = eval_node(*n.lhs, values, vars) + eval_node(*n.rhs, values, vars); break;
    case NodeKind::sub: v = eval_node(*n.lhs, values, vars) - eval_node(*n.rhs, values, vars); break;
    case NodeKind::mul: v = eval_node(*n.lhs, values, vars) * eval_node(*n.rhs, values, vars); break;
    case NodeKind::div: {
        const double num = eval_node(*n.lhs, values, vars);
        const double den = eval_node(*n.rhs, values, vars);
        if (den == 0.0) return fail("division by zero");
        v = num / den;
        break;
    }
    case NodeKind::pow: {
        const double base = eval_node(*n.lhs, values, vars);
        const double ex = eval_node(*n.rhs, values, vars);
        if (base == 0.0 && ex < 0.0) return fail("division by zero");
        if (base < 0.0 && ex != std::trunc(ex)) return fail("negative base with non-integer exponent");
        v = std::pow(base, ex);
        break;
    }
    case NodeKind::call: {
        const double x = eval_node(*n.lhs, values, vars);
        if (n.function == Function::log && x <= 0.0) return fail("log of non-positive value");
        if (n.function == Function::sqrt && x < 0.0) return fail("sqrt of negative value");
        v = apply_function(n.function, x);
        break;
    }
    }
    if (!std::isfinite(v)) return fail("non-finite result");
    return v;
}

// ---------------------------------------------------------------- differentiation

bool depends_on(const Node& n, int var)
{
    switch (n.kind) {
    case NodeKind::constant: return false;
    case NodeKind::variable: return n.variable == var;
    default:
        return (n.lhs && depends_on(*n.lhs, var)) || (n.rhs && depends_on(*n.rhs, var));
    }
}

NodePtr diff_node(const NodePtr& n, int var)
{
    switch (n->kind) {
    case NodeKind::constant: return make_constant(0.0);
    case NodeKind::variable: return make_constant(n->variable == var ? 1.0 : 0.0);
    case NodeKind::negate: return build_neg(diff_node(n->lhs, var));
    case NodeKind::add: return build_add(diff_node(n->lhs, var), diff_node(n->rhs, var));
    case NodeKind::sub: return build_sub(diff_node(n->lhs, var), diff_node(n->rhs, var));
    case NodeKind::mul:
        return build_add(build_mul(diff_node(n->lhs, var), n->rhs),
                         build_mul(n->lhs, diff_node(n->rhs, var)));
    case NodeKind::div: {
        const NodePtr& u = n->lhs;
        const NodePtr& v = n->rhs;
        if (!depends_on(*v, var)) return build_div(diff_node(u, var), v);
        NodePtr num = build_sub(build_mul(diff_node(u, var), v), build_mul(u, diff_node(v, var)));
        return build_div(num, build_pow(v, make_constant(2.0)));
    }
    case NodeKind::pow: {
        const NodePtr& u = n->lhs;
        const NodePtr& w = n->rhs;
        if (!depends_on(*w, var)) {
            // w * u^(w-1) * u'
            NodePtr lowered = build_pow(u, build_sub(w, make_constant(1.0)));
            return build_mul(build_mul(w, lowered), diff_node(u, var));
        }
        // u^w * (w' log(u) + w u'/u)
        NodePtr inner = build_add(build_mul(diff_node(w, var), build_call(Function::log, u)),
                                  build_div(build_mul(w, diff_node(u, var)), u));
        return build_mul(n, inner);
    }
    case NodeKind::call: {
        const NodePtr& u = n->lhs;
        NodePtr du = diff_node(u, var);
        if (is_const(du, 0.0)) return make_constant(0.0);
        NodePtr outer;
        switch (n->function) {
        case Function::sin: outer = build_call(Function::cos, u); break;
        case Function::cos: outer = build_neg(build_call(Function::sin, u)); break;
        case Function::exp: outer = n; break;
        case Function::log: return build_div(du, u);
        case Function::sqrt: return build_div(du, build_mul(make_constant(2.0), n));
        case Function::tanh:
            outer = build_sub(make_constant(1.0), build_pow(n, make_constant(2.0)));
            break;
        }
        return build_mul(outer, du);
    }
    }
    return make_constant(0.0);
}

NodePtr rebind_node(const NodePtr& n, const std::vector<int>& map)
{
    switch (n->kind) {
    case NodeKind::constant: return n;
    case NodeKind::variable: return make_variable(map[static_cast<std::size_t>(n->variable)]);
    case NodeKind::call: return make_call_node(n->function, rebind_node(n->lhs, map));
    case NodeKind::negate: return make_node(n->kind, rebind_node(n->lhs, map));
    default: return make_node(n->kind, rebind_node(n->lhs, map), rebind_node(n->rhs, map));
    }
}

bool uses_variable(const Node& n, int var) { return depends_on(n, var); }

const VariableSet& common_vars(const Expr& a, const Expr& b)
{
    if (!(a.variables() == b.variables()))
        throw std::invalid_argument("expressions are declared over different variables");
    return a.variables();
}

}  // namespace

// ---------------------------------------------------------------- public API

VariableSet::VariableSet(std::vector<std::string> names) : names_(std::move(names))
{
    if (names_.empty() || names_.size() > 2)
        throw std::invalid_argument("an expression takes one or two variables");
    for (const auto& n : names_) {
        if (n.empty() || !is_ident_start(n.front()) ||
            !std::all_of(n.begin(), n.end(), is_ident_char))
            throw std::invalid_argument("invalid variable name '" + n + "'");
        if (lookup_function(n))
            throw std::invalid_argument("variable name '" + n + "' shadows a function");
    }
    if (names_.size() == 2 && names_[0] == names_[1])
        throw std::invalid_argument("variable names must be distinct");
}

int VariableSet::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

ParseError::ParseError(Kind kind, const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset)
{
}

DomainError::DomainError(const std::string& what, std::string subexpression)
    : std::runtime_error(what + " in " + subexpression), subexpression_(std::move(subexpression))
{
}

std::string_view function_name(Function f)
{
    for (const auto& [n, fn] : kFunctions)
        if (fn == f) return n;
    return "?";
}

Expr::Expr(NodePtr root, VariableSet vars) : root_(std::move(root)), vars_(std::move(vars))
{
    if (!root_) throw std::invalid_argument("null expression");
}

Expr Expr::constant(double value, VariableSet vars)
{
    return Expr(make_constant(value), std::move(vars));
}

Expr Expr::variable(std::string_view name, VariableSet vars)
{
    const int index = vars.index_of(name);
    if (index < 0) throw std::invalid_argument("undeclared variable '" + std::string(name) + "'");
    return Expr(make_variable(index), std::move(vars));
}

bool Expr::is_variable_free() const
{
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (uses_variable(*root_, static_cast<int>(i))) return false;
    return true;
}

double Expr::evaluate(std::span<const double> values) const
{
    if (values.size() != vars_.size())
        throw std::invalid_argument("expected one value per declared variable");
    return eval_node(*root_, values, vars_);
}

std::string Expr::to_string() const { return print(*root_, vars_); }

Expr Expr::rebind(const VariableSet& target) const
{
    std::vector<int> map(vars_.size(), -1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        map[i] = target.index_of(vars_[i]);
        if (map[i] < 0 && uses_variable(*root_, static_cast<int>(i)))
            throw std::invalid_argument("variable '" + vars_[i] + "' is not declared in the target set");
    }
    return Expr(rebind_node(root_, map), target);
}

Expr parse(std::string_view source, const VariableSet& vars)
{
    if (vars.size() == 0) throw std::invalid_argument("an expression takes one or two variables");
    Parser parser(source, vars);
    return Expr(parser.parse_all(), vars);
}

Expr parse(std::string_view source, std::vector<std::string> vars)
{
    return parse(source, VariableSet(std::move(vars)));
}

Expr differentiate(const Expr& e, int var_index)
{
    if (var_index < 0 || static_cast<std::size_t>(var_index) >= e.variables().size())
        throw std::invalid_argument("differentiation variable is not declared");
    return Expr(diff_node(e.root_ptr(), var_index), e.variables());
}

Expr differentiate(const Expr& e, std::string_view var)
{
    const int index = e.variables().index_of(var);
    if (index < 0)
        throw std::invalid_argument("differentiation variable '" + std::string(var) + "' is not declared");
    return differentiate(e, index);
}

double evaluate(const Expr& e, const std::vector<std::pair<std::string, double>>& bindings)
{
    const VariableSet& vars = e.variables();
    std::vector<double> values(vars.size());
    std::vector<bool> bound(vars.size(), false);
    for (const auto& [name, v] : bindings) {
        const int i = vars.index_of(name);
        if (i < 0) continue;
        values[static_cast<std::size_t>(i)] = v;
        bound[static_cast<std::size_t>(i)] = true;
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (!bound[i]) throw std::invalid_argument("no binding for variable '" + vars[i] + "'");
    return e.evaluate(values);
}

Expr operator+(const Expr& a, const Expr& b)
{
    return Expr(build_add(a.root_ptr(), b.root_ptr()), common_vars(a, b));
}

Expr operator-(const Expr& a, const Expr& b)
{
    return Expr(build_sub(a.root_ptr(), b.root_ptr()), common_vars(a, b));
}

Expr operator*(const Expr& a, const Expr& b)
{
    return Expr(build_mul(a.root_ptr(), b.root_ptr()), common_vars(a, b));
}

Expr operator/(const Expr& a, const Expr& b)
{
    return Expr(build_div(a.root_ptr(), b.root_ptr()), common_vars(a, b));
}

Expr operator-(const Expr& a) { return Expr(build_neg(a.root_ptr()), a.variables()); }

Expr pow(const Expr& base, const Expr& exponent)
{
    return Expr(build_pow(base.root_ptr(), exponent.root_ptr()), common_vars(base, exponent));
}

Expr call(Function f, const Expr& arg) { return Expr(build_call(f, arg.root_ptr()), arg.variables()); }

// ---------------------------------------------------------------- Program

Program::Program(const Expr& e) : expr_(std::make_shared<const Expr>(e))
{
    emit(e.root());
    std::size_t depth = 0;
    for (const Instr& ins : code_) {
        switch (ins.op) {
        case Op::push_const:
        case Op::push_var: ++depth; break;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow: --depth; break;
        default: break;
        }
        max_stack_ = std::max(max_stack_, depth);
    }
}

void Program::emit(const Node& n)
{
    switch (n.kind) {
    case NodeKind::constant:
        constants_.push_back(n.value);
        code_.push_back({Op::push_const, static_cast<int>(constants_.size() - 1)});
        return;
    case NodeKind::variable: code_.push_back({Op::push_var, n.variable}); return;
    case NodeKind::negate:
        emit(*n.lhs);
        code_.push_back({Op::neg, 0});
        return;
    case NodeKind::call: {
        emit(*n.lhs);
        Op op = Op::sin;
        switch (n.function) {
        case Function::sin: op = Op::sin; break;
        case Function::cos: op = Op::cos; break;
        case Function::exp: op = Op::exp; break;
        case Function::log: op = Op::log; break;
        case Function::sqrt: op = Op::sqrt; break;
        case Function::tanh: op = Op::tanh; break;
        }
        code_.push_back({op, 0});
        return;
    }
    default: break;
    }
    emit(*n.lhs);
    emit(*n.rhs);
    Op op = Op::add;
    switch (n.kind) {
    case NodeKind::sub: op = Op::sub; break;
    case NodeKind::mul: op = Op::mul; break;
    case NodeKind::div: op = Op::div; break;
    case NodeKind::pow: op = Op::pow; break;
    default: break;
    }
    code_.push_back({op, 0});
}

double Program::operator()(std::span<const double> values) const
{
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> large;
    double* stack = small.data();
    if (max_stack_ > kInline) {
        large.resize(max_stack_);
        stack = large.data();
    }
    std::size_t sp = 0;
    for (const Instr& ins : code_) {
        switch (ins.op) {
        case Op::push_const: stack[sp++] = constants_[static_cast<std::size_t>(ins.arg)]; break;
        case Op::push_var: stack[sp++] = values[static_cast<std::size_t>(ins.arg)]; break;
        case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Op::add: --sp; stack[sp - 1] += stack[sp]; break;
        case Op::sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Op::mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Op::div: --sp; stack[sp - 1] /= stack[sp]; break;
        case Op::pow: {
            --sp;
            const double base = stack[sp - 1];
            const double ex = stack[sp];
            stack[sp - 1] = (base < 0.0 && ex != std::trunc(ex)) ? std::nan("") : std::pow(base, ex);
            break;
        }
        case Op::sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Op::cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Op::exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Op::log: stack[sp - 1] = std::log(stack[sp - 1]); break;
        case Op::sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
        case Op::tanh: stack[sp - 1] = std::tanh(stack[sp - 1]); break;
        }
    }
    return stack[0];
}

double Program::checked(std::span<const double> values) const
{
    const double v = (*this)(values);
    if (std::isfinite(v)) return v;
    return expr_->evaluate(values);
}

}  // namespace ghe
