#include "fracvar/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "fracvar/errors.hpp"

namespace fracvar {

struct Expression::Node {
    enum class Kind { Number, Var, U, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double value = 0.0;
    int var = 0;
    double (*fn)(double) = nullptr;
    std::string fn_name;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr leaf(Node::Kind kind, double value = 0.0, int var = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->value = value;
    n->var = var;
    return n;
}

NodePtr binary(Node::Kind kind, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

double checked_sqrt(double x) {
    if (x < 0.0) throw EvalError("sqrt of a negative number");
    return std::sqrt(x);
}

double call_sin(double x) { return std::sin(x); }
double call_cos(double x) { return std::cos(x); }
double call_exp(double x) { return std::exp(x); }
double call_abs(double x) { return std::abs(x); }

class Parser {
public:
    Parser(const std::string& src, int arity, bool allow_u) : src_(src), arity_(arity), allow_u_(allow_u) {}

    NodePtr parse() {
        NodePtr root = expr();
        skip_space();
        if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return root;
    }

private:
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary(Node::Kind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = binary(Node::Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary(Node::Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = binary(Node::Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return binary(Node::Kind::Neg, unary(), nullptr);
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return binary(Node::Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (accept('(')) {
            NodePtr inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return leaf(Node::Kind::Number, v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "pi") return leaf(Node::Kind::Number, std::numbers::pi);
        if (name == "x") return variable(1, name);
        if (name == "u") {
            if (!allow_u_) throw ArityError("variable 'u' is not available here");
            return leaf(Node::Kind::U);
        }
        if (name.size() > 1 && name[0] == 't' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            return variable(std::stoi(name.substr(1)), name);
        }
        double (*fn)(double) = nullptr;
        if (name == "sin") fn = call_sin;
        if (name == "cos") fn = call_cos;
        if (name == "exp") fn = call_exp;
        if (name == "sqrt") fn = checked_sqrt;
        if (name == "abs") fn = call_abs;
        if (!fn) throw ParseError("unknown identifier '" + name + "'", start);
        expect('(');
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Call;
        n->fn = fn;
        n->fn_name = name;
        n->lhs = expr();
        expect(')');
        return n;
    }

    NodePtr variable(int index, const std::string& name) {
        if (index < 1 || index > arity_) {
            throw ArityError("variable '" + name + "' exceeds arity " + std::to_string(arity_));
        }
        return leaf(Node::Kind::Var, 0.0, index - 1);
    }

    const std::string& src_;
    int arity_;
    bool allow_u_;
    std::size_t pos_ = 0;
};

double eval(const Node& n, std::span<const double> t, double u) {
    switch (n.kind) {
        case Node::Kind::Number: return n.value;
        case Node::Kind::Var: return t[n.var];
        case Node::Kind::U: return u;
        case Node::Kind::Neg: return -eval(*n.lhs, t, u);
        case Node::Kind::Add: return eval(*n.lhs, t, u) + eval(*n.rhs, t, u);
        case Node::Kind::Sub: return eval(*n.lhs, t, u) - eval(*n.rhs, t, u);
        case Node::Kind::Mul: return eval(*n.lhs, t, u) * eval(*n.rhs, t, u);
        case Node::Kind::Div: {
            const double d = eval(*n.rhs, t, u);
            if (d == 0.0) throw EvalError("division by zero");
            return eval(*n.lhs, t, u) / d;
        }
        case Node::Kind::Pow: return std::pow(eval(*n.lhs, t, u), eval(*n.rhs, t, u));
        case Node::Kind::Call: return n.fn(eval(*n.lhs, t, u));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& source, int arity, bool allow_u) {
    if (arity < 0) throw ArityError("negative arity");
    Parser parser(source, arity, allow_u);
    return Expression(source, arity, parser.parse());
}

double Expression::operator()(std::span<const double> t, double u) const {
    if (static_cast<int>(t.size()) < arity_) throw ArityError("too few coordinates for expression");
    const double v = eval(*root_, t, u);
    if (!std::isfinite(v)) throw EvalError("expression '" + source_ + "' is not finite here");
    return v;
}

std::function<double(std::span<const double>)> parse_function(const std::string& expr, int arity) {
    Expression e = Expression::parse(expr, arity);
    return [e](std::span<const double> t) { return e(t); };
}

}  // namespace fracvar
