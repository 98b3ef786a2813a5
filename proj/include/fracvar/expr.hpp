#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>

namespace fracvar {

/**
 * Arithmetic expression over t1..tn (x aliases t1), optionally u, the
 * constant pi, + - * / ^ (right-associative), unary minus and
 * sin, cos, exp, sqrt, abs.
 */
class Expression {
public:
    // Throws ParseError with the character position, or ArityError for a
    // variable outside t1..t{arity} (or u when allow_u is false).
    static Expression parse(const std::string& source, int arity, bool allow_u = false);

    // Throws EvalError on division by zero or a non-finite result.
    double operator()(std::span<const double> t, double u = 0.0) const;

    const std::string& source() const { return source_; }
    int arity() const { return arity_; }

    struct Node;

private:
    Expression(std::string source, int arity, std::shared_ptr<const Node> root)
        : source_(std::move(source)), arity_(arity), root_(std::move(root)) {}

    std::string source_;
    int arity_;
    std::shared_ptr<const Node> root_;
};

std::function<double(std::span<const double>)> parse_function(const std::string& expr, int arity);

}  // namespace fracvar
