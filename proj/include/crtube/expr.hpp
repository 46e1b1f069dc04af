#pragma once

// A small analytic expression language, evaluated either pointwise or in jet
// arithmetic.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')' | '-' factor
//
// '^' is right-associative and binds tighter than unary minus, so -x^2 is -(x^2).
// Identifiers that are neither declared variables nor known functions are
// parameters and must be bound at evaluation time.

#include "crtube/error.hpp"
#include "crtube/jet.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crtube::expr {

enum class NodeKind { number, variable, param, negate, add, sub, mul, div, pow, call };
enum class Function { exp, log, sqrt, sin, cos, pow };

struct Node
{
    NodeKind kind = NodeKind::number;
    double number = 0.0;
    std::string name;      // variable or parameter name
    int var_index = -1;    // position in the declared variable list
    Function fn = Function::exp;
    std::vector<std::shared_ptr<const Node>> args;
    std::size_t offset = 0;  // byte offset of the node's first token
};

using NodePtr = std::shared_ptr<const Node>;
using Params = std::map<std::string, double>;

namespace detail {

struct function_info
{
    std::string_view name;
    Function fn;
    std::size_t arity;
};

inline constexpr std::array<function_info, 6> functions = {{
    {"exp", Function::exp, 1},
    {"log", Function::log, 1},
    {"sqrt", Function::sqrt, 1},
    {"sin", Function::sin, 1},
    {"cos", Function::cos, 1},
    {"pow", Function::pow, 2},
}};

inline const function_info* find_function(std::string_view name)
{
    for (const auto& f : functions) {
        if (f.name == name) {
            return &f;
        }
    }
    return nullptr;
}

inline std::string_view function_name(Function fn)
{
    for (const auto& f : functions) {
        if (f.fn == fn) {
            return f.name;
        }
    }
    return "?";
}

} // namespace detail

/// Parsed expression together with its declared variable list.
class Expr
{
public:
    Expr(NodePtr root, std::vector<std::string> vars, std::string source)
        : root_(std::move(root)), vars_(std::move(vars)), source_(std::move(source))
    {}

    const Node& root() const noexcept { return *root_; }
    const std::vector<std::string>& vars() const noexcept { return vars_; }
    const std::string& source() const noexcept { return source_; }

    std::set<std::string> params() const
    {
        std::set<std::string> out;
        collect_params(*root_, out);
        return out;
    }

    std::string to_string() const;

private:
    static void collect_params(const Node& n, std::set<std::string>& out)
    {
        if (n.kind == NodeKind::param) {
            out.insert(n.name);
        }
        for (const auto& a : n.args) {
            collect_params(*a, out);
        }
    }

    NodePtr root_;
    std::vector<std::string> vars_;
    std::string source_;
};

namespace detail {

class parser
{
public:
    parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    NodePtr parse_all()
    {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw ParseError(pos_, {"expression"}, "empty expression");
        }
        NodePtr root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError(pos_, {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"},
                             std::string("unexpected '") + src_[pos_] + "'");
        }
        return root;
    }

private:
    static NodePtr make(NodeKind kind, std::size_t offset, std::vector<NodePtr> args = {})
    {
        auto n = std::make_shared<Node>();
        n->kind = kind;
        n->offset = offset;
        n->args = std::move(args);
        return n;
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n'
                                      || src_[pos_] == '\r')) {
            ++pos_;
        }
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

    void expect(char c)
    {
        if (!accept(c)) {
            throw ParseError(pos_, {std::string("'") + c + "'"},
                             pos_ < src_.size() ? std::string("unexpected '") + src_[pos_] + "'"
                                                : "unexpected end of input");
        }
    }

    NodePtr parse_expr()
    {
        skip_ws();
        const std::size_t start = pos_;
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make(NodeKind::add, start, {lhs, parse_term()});
            } else if (accept('-')) {
                lhs = make(NodeKind::sub, start, {lhs, parse_term()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term()
    {
        skip_ws();
        const std::size_t start = pos_;
        NodePtr lhs = parse_factor();
        for (;;) {
            if (accept('*')) {
                lhs = make(NodeKind::mul, start, {lhs, parse_factor()});
            } else if (accept('/')) {
                lhs = make(NodeKind::div, start, {lhs, parse_factor()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_factor()
    {
        skip_ws();
        const std::size_t start = pos_;
        NodePtr base = parse_atom();
        if (accept('^')) {
            return make(NodeKind::pow, start, {base, parse_factor()});
        }
        return base;
    }

    NodePtr parse_atom()
    {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            throw ParseError(pos_, atom_tokens(), "unexpected end of input");
        }
        const char c = src_[pos_];
        if (c == '-') {
            ++pos_;
            return make(NodeKind::negate, start, {parse_factor()});
        }
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (is_digit(c) || c == '.') {
            return parse_number();
        }
        if (is_ident_start(c)) {
            return parse_identifier();
        }
        throw ParseError(pos_, atom_tokens(), std::string("unexpected '") + c + "'");
    }

    NodePtr parse_number()
    {
        const std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < src_.size() && (is_digit(src_[end]) || src_[end] == '.')) {
            ++end;
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t exp_end = end + 1;
            if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) {
                ++exp_end;
            }
            if (exp_end < src_.size() && is_digit(src_[exp_end])) {
                while (exp_end < src_.size() && is_digit(src_[exp_end])) {
                    ++exp_end;
                }
                end = exp_end;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, value);
        if (ec != std::errc() || ptr != src_.data() + end) {
            throw ParseError(start, {"number"}, "malformed number '"
                                                    + std::string(src_.substr(start, end - start)) + "'");
        }
        pos_ = end;
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::number;
        n->number = value;
        n->offset = start;
        return n;
    }

    NodePtr parse_identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        const function_info* fn = find_function(name);

        if (accept('(')) {
            if (fn == nullptr) {
                throw UnknownFunction("'" + name + "' at offset " + std::to_string(start));
            }
            std::vector<NodePtr> args{parse_expr()};
            while (accept(',')) {
                args.push_back(parse_expr());
            }
            expect(')');
            if (args.size() != fn->arity) {
                throw ArityMismatch("'" + name + "' takes " + std::to_string(fn->arity) + " argument(s), got "
                                    + std::to_string(args.size()) + " at offset " + std::to_string(start));
            }
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::call;
            n->fn = fn->fn;
            n->name = name;
            n->args = std::move(args);
            n->offset = start;
            return n;
        }
        if (fn != nullptr) {
            throw ParseError(pos_, {"'('"}, "function '" + name + "' used without arguments");
        }

        auto n = std::make_shared<Node>();
        n->name = name;
        n->offset = start;
        const auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it != vars_.end()) {
            n->kind = NodeKind::variable;
            n->var_index = static_cast<int>(it - vars_.begin());
        } else {
            n->kind = NodeKind::param;
        }
        return n;
    }

    static std::vector<std::string> atom_tokens()
    {
        return {"number", "identifier", "'('", "'-'"};
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

inline std::string format_number(double x)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

// Binding strength for the printer; higher binds tighter.
inline int precedence(const Node& n)
{
    switch (n.kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::negate: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
    }
}

inline void print(const Node& n, std::string& out)
{
    auto wrapped = [&](const Node& child, bool parens) {
        if (parens) {
            out += '(';
        }
        print(child, out);
        if (parens) {
            out += ')';
        }
    };
    switch (n.kind) {
    case NodeKind::number: out += format_number(n.number); break;
    case NodeKind::variable:
    case NodeKind::param: out += n.name; break;
    case NodeKind::negate:
        out += '-';
        wrapped(*n.args[0], precedence(*n.args[0]) < 3);
        break;
    case NodeKind::add:
    case NodeKind::sub:
        wrapped(*n.args[0], false);
        out += n.kind == NodeKind::add ? " + " : " - ";
        wrapped(*n.args[1], precedence(*n.args[1]) <= 1);
        break;
    case NodeKind::mul:
    case NodeKind::div:
        wrapped(*n.args[0], precedence(*n.args[0]) < 2);
        out += n.kind == NodeKind::mul ? "*" : "/";
        wrapped(*n.args[1], precedence(*n.args[1]) <= 2);
        break;
    case NodeKind::pow:
        wrapped(*n.args[0], precedence(*n.args[0]) < 5);
        out += '^';
        wrapped(*n.args[1], precedence(*n.args[1]) < 3);
        break;
    case NodeKind::call:
        out += function_name(n.fn);
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            print(*n.args[i], out);
        }
        out += ')';
        break;
    }
}

inline bool depends_on_variables(const Node& n)
{
    if (n.kind == NodeKind::variable) {
        return true;
    }
    return std::any_of(n.args.begin(), n.args.end(), [](const NodePtr& a) { return depends_on_variables(*a); });
}

inline double scalar_pow(double base, double e)
{
    if (e == std::floor(e) && std::abs(e) <= 8.0) {
        double out = 1.0;
        for (int i = 0; i < static_cast<int>(std::abs(e)); ++i) {
            out *= base;
        }
        return e < 0 ? 1.0 / out : out;
    }
    if (!(base > 0.0)) {
        throw DomainError("non-integer power of a non-positive base");
    }
    return std::pow(base, e);
}

template <class T>
struct value_ops;

template <>
struct value_ops<double>
{
    static double constant(double c) { return c; }
    static double exp(double x) { return std::exp(x); }
    static double log(double x)
    {
        if (!(x > 0.0)) {
            throw DomainError("log of " + std::to_string(x));
        }
        return std::log(x);
    }
    static double sqrt(double x)
    {
        if (!(x >= 0.0)) {
            throw DomainError("sqrt of " + std::to_string(x));
        }
        return std::sqrt(x);
    }
    static double sin(double x) { return std::sin(x); }
    static double cos(double x) { return std::cos(x); }
    static double div(double a, double b)
    {
        if (!(std::abs(b) >= default_division_epsilon)) {
            throw DivisionBySingularJet("division by " + std::to_string(b));
        }
        return a / b;
    }
    static double const_pow(double base, double e) { return scalar_pow(base, e); }
};

template <int Vars>
struct value_ops<Jet<Vars>>
{
    using J = Jet<Vars>;
    static J constant(double c) { return J::constant(c); }
    static J exp(const J& x) { return crtube::exp(x); }
    static J log(const J& x) { return crtube::log(x); }
    static J sqrt(const J& x) { return crtube::sqrt(x); }
    static J sin(const J& x) { return crtube::sin(x); }
    static J cos(const J& x) { return crtube::cos(x); }
    static J div(const J& a, const J& b) { return a / b; }
    static J const_pow(const J& base, double e)
    {
        if (e == std::floor(e) && std::abs(e) <= 8.0) {
            return ipow(base, static_cast<int>(e));
        }
        return crtube::pow(base, e);
    }
};

template <class T>
class evaluator
{
public:
    using ops = value_ops<T>;

    evaluator(const Expr& e, std::vector<T> vars, const Params& params)
        : expr_(e), vars_(std::move(vars)), params_(params)
    {}

    T eval(const Node& n) const
    {
        switch (n.kind) {
        case NodeKind::number: return ops::constant(n.number);
        case NodeKind::variable: return vars_[static_cast<std::size_t>(n.var_index)];
        case NodeKind::param: return ops::constant(param(n));
        case NodeKind::negate: return -eval(*n.args[0]);
        case NodeKind::add: return eval(*n.args[0]) + eval(*n.args[1]);
        case NodeKind::sub: return eval(*n.args[0]) - eval(*n.args[1]);
        case NodeKind::mul: return eval(*n.args[0]) * eval(*n.args[1]);
        case NodeKind::div: {
            T a = eval(*n.args[0]);
            T b = eval(*n.args[1]);
            return located(n, [&] { return ops::div(a, b); });
        }
        case NodeKind::pow: return eval_pow(n, *n.args[0], *n.args[1]);
        case NodeKind::call: return eval_call(n);
        }
        throw InvalidParameter("corrupt expression node");
    }

private:
    double param(const Node& n) const
    {
        const auto it = params_.find(n.name);
        if (it == params_.end()) {
            throw UnboundParameter("'" + n.name + "' at offset " + std::to_string(n.offset) + " in '"
                                   + expr_.source() + "'");
        }
        return it->second;
    }

    // Re-raise a domain failure with the location of the node that produced it.
    template <class F>
    T located(const Node& n, F&& f) const
    {
        try {
            return f();
        } catch (const DomainError& err) {
            throw DomainError(std::string(err.what()) + " [at offset " + std::to_string(n.offset) + " in '"
                              + expr_.source() + "']");
        } catch (const DivisionBySingularJet& err) {
            throw DivisionBySingularJet(std::string(err.what()) + " [at offset " + std::to_string(n.offset)
                                        + " in '" + expr_.source() + "']");
        }
    }

    T eval_pow(const Node& n, const Node& base_node, const Node& exp_node) const
    {
        T base = eval(base_node);
        if (!depends_on_variables(exp_node)) {
            const double e = evaluator<double>(expr_, {}, params_).eval(exp_node);
            return located(n, [&] { return ops::const_pow(base, e); });
        }
        T e = eval(exp_node);
        return located(n, [&] { return ops::exp(e * ops::log(base)); });
    }

    T eval_call(const Node& n) const
    {
        if (n.fn == Function::pow) {
            return eval_pow(n, *n.args[0], *n.args[1]);
        }
        T x = eval(*n.args[0]);
        return located(n, [&] {
            switch (n.fn) {
            case Function::exp: return ops::exp(x);
            case Function::log: return ops::log(x);
            case Function::sqrt: return ops::sqrt(x);
            case Function::sin: return ops::sin(x);
            case Function::cos: return ops::cos(x);
            default: break;
            }
            throw InvalidParameter("corrupt call node");
        });
    }

    const Expr& expr_;
    std::vector<T> vars_;
    const Params& params_;
};

} // namespace detail

inline std::string Expr::to_string() const
{
    std::string out;
    detail::print(*root_, out);
    return out;
}

/// Parse `src` with the given declared variables (e.g. {"t1","t2"} or {"v"}).
inline Expr parse(std::string_view src, std::vector<std::string> vars)
{
    detail::parser p(src, vars);
    NodePtr root = p.parse_all();
    return Expr(std::move(root), std::move(vars), std::string(src));
}

namespace detail {

inline void check_point(const Expr& e, std::size_t dim)
{
    if (dim != e.vars().size()) {
        throw InvalidParameter("expression declares " + std::to_string(e.vars().size())
                               + " variable(s) but the point has " + std::to_string(dim));
    }
}

} // namespace detail

/// Pointwise evaluation.
inline double evaluate(const Expr& e, std::span<const double> point, const Params& params = {})
{
    detail::check_point(e, point.size());
    return detail::evaluator<double>(e, std::vector<double>(point.begin(), point.end()), params).eval(e.root());
}

/// Jet of the expression expanded at `point`; Vars must equal the number of
/// declared variables.
template <int Vars>
Jet<Vars> eval_jet(const Expr& e, std::span<const double> point, const Params& params = {})
{
    detail::check_point(e, point.size());
    if (point.size() != static_cast<std::size_t>(Vars)) {
        throw InvalidParameter("jet arity does not match the expression's variables");
    }
    std::vector<Jet<Vars>> vars;
    for (std::size_t i = 0; i < point.size(); ++i) {
        vars.push_back(Jet<Vars>::variable(point[i], static_cast<int>(i) + 1));
    }
    return detail::evaluator<Jet<Vars>>(e, std::move(vars), params).eval(e.root());
}

/// Throws UnboundParameter naming the first parameter missing from `params`.
inline void require_bound(const Expr& e, const Params& params)
{
    for (const auto& name : e.params()) {
        if (params.find(name) == params.end()) {
            throw UnboundParameter("'" + name + "' in '" + e.source() + "'");
        }
    }
}

} // namespace crtube::expr
