#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hodo {

// Arithmetic expression AST for map definitions. Grammar: operators + - * / ^
// (with unary minus), parentheses, functions exp log sqrt sin cos, numeric
// literals, and the variable names the parser was given (u1..un, or V).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, call };
  Kind kind;
  double value = 0.0;     // constant
  int var = -1;           // variable index
  std::string func;       // call
  ExprPtr a, b;
};

ExprPtr make_const(double v);
ExprPtr make_var(int index);

// Parse against the given variable names. Throws errc::parse with a message
// pointing at the offending position.
ExprPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& var_names);

// Evaluation over double or complex<double> (both needed: real maps and the
// analytic-in-V map class share this AST).
double eval(const ExprPtr& e, std::span<const double> vars);
std::complex<double> eval(const ExprPtr& e,
                          std::span<const std::complex<double>> vars);

// Symbolic derivative with respect to variable `var`, lightly simplified
// (constant folding, 0/1 absorption).
ExprPtr diff(const ExprPtr& e, int var);

std::string to_string(const ExprPtr& e,
                      const std::vector<std::string>& var_names);

}  // namespace hodo
