#include "core/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "core/errors.hpp"

namespace hodo {

namespace {

ExprPtr node(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

bool is_const(const ExprPtr& e, double v) {
  return e->kind == Expr::Kind::constant && e->value == v;
}

ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);

ExprPtr fold2(Expr::Kind k, const ExprPtr& a, const ExprPtr& b) {
  double x = a->value, y = b->value;
  switch (k) {
    case Expr::Kind::add: return make_const(x + y);
    case Expr::Kind::sub: return make_const(x - y);
    case Expr::Kind::mul: return make_const(x * y);
    case Expr::Kind::div: return make_const(x / y);
    case Expr::Kind::pow: return make_const(std::pow(x, y));
    default: return nullptr;
  }
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::constant && b->kind == Expr::Kind::constant)
    return fold2(Expr::Kind::add, a, b);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return node({Expr::Kind::add, 0, -1, "", std::move(a), std::move(b)});
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::constant && b->kind == Expr::Kind::constant)
    return fold2(Expr::Kind::sub, a, b);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0))
    return node({Expr::Kind::neg, 0, -1, "", std::move(b), nullptr});
  return node({Expr::Kind::sub, 0, -1, "", std::move(a), std::move(b)});
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::constant && b->kind == Expr::Kind::constant)
    return fold2(Expr::Kind::mul, a, b);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return node({Expr::Kind::mul, 0, -1, "", std::move(a), std::move(b)});
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::constant && b->kind == Expr::Kind::constant)
    return fold2(Expr::Kind::div, a, b);
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  return node({Expr::Kind::div, 0, -1, "", std::move(a), std::move(b)});
}

ExprPtr make_pow(ExprPtr a, ExprPtr b) {
  if (a->kind == Expr::Kind::constant && b->kind == Expr::Kind::constant)
    return fold2(Expr::Kind::pow, a, b);
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return make_const(1.0);
  return node({Expr::Kind::pow, 0, -1, "", std::move(a), std::move(b)});
}

ExprPtr make_neg(ExprPtr a) {
  if (a->kind == Expr::Kind::constant) return make_const(-a->value);
  if (a->kind == Expr::Kind::neg) return a->a;
  return node({Expr::Kind::neg, 0, -1, "", std::move(a), nullptr});
}

ExprPtr make_call(std::string f, ExprPtr a) {
  return node({Expr::Kind::call, 0, -1, std::move(f), std::move(a), nullptr});
}

const char* const kFunctions[] = {"exp", "log", "sqrt", "sin", "cos"};

bool known_function(const std::string& name) {
  for (const char* f : kFunctions)
    if (name == f) return true;
  return false;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars)
      : s_(text), vars_(vars) {}

  ExprPtr run() {
    ExprPtr e = expression();
    skip_ws();
    if (pos_ != s_.size()) err("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void err(const std::string& msg) {
    std::ostringstream os;
    os << "expression error at position " << pos_ << ": " << msg << " in '"
       << s_ << "'";
    fail(errc::parse, os.str());
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  ExprPtr expression() {
    ExprPtr e = term();
    for (;;) {
      if (eat('+'))
        e = make_add(e, term());
      else if (eat('-'))
        e = make_sub(e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = unary();
    for (;;) {
      if (eat('*'))
        e = make_mul(e, unary());
      else if (eat('/'))
        e = make_div(e, unary());
      else
        return e;
    }
  }

  ExprPtr unary() {
    if (eat('-')) return make_neg(unary());
    if (eat('+')) return unary();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (eat('^')) return make_pow(base, unary());  // right associative
    return base;
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) err("expected an operand");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expression();
      if (!eat(')')) err("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    err(std::string("unexpected character '") + c + "'");
  }

  ExprPtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) err("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_const(v);
  }

  ExprPtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    std::string name = s_.substr(start, pos_ - start);
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (name == vars_[i]) return make_var(static_cast<int>(i));
    if (known_function(name)) {
      if (!eat('(')) err("function '" + name + "' needs parentheses");
      ExprPtr arg = expression();
      if (!eat(')')) err("missing ')' after argument of '" + name + "'");
      return make_call(name, arg);
    }
    pos_ = start;
    err("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

template <class T>
T eval_impl(const Expr& e, std::span<const T> vars) {
  using K = Expr::Kind;
  switch (e.kind) {
    case K::constant:
      return T(e.value);
    case K::variable:
      if (e.var < 0 || static_cast<std::size_t>(e.var) >= vars.size())
        fail(errc::internal, "variable index out of range");
      return vars[e.var];
    case K::add:
      return eval_impl<T>(*e.a, vars) + eval_impl<T>(*e.b, vars);
    case K::sub:
      return eval_impl<T>(*e.a, vars) - eval_impl<T>(*e.b, vars);
    case K::mul:
      return eval_impl<T>(*e.a, vars) * eval_impl<T>(*e.b, vars);
    case K::div:
      return eval_impl<T>(*e.a, vars) / eval_impl<T>(*e.b, vars);
    case K::pow: {
      // Integer exponents by repeated multiplication: keeps negative bases
      // legal and avoids the pow() domain edge at base < 0.
      if (e.b->kind == K::constant) {
        double p = e.b->value;
        if (p == std::floor(p) && std::fabs(p) <= 64.0) {
          long n = static_cast<long>(p);
          T base = eval_impl<T>(*e.a, vars);
          T acc(1.0);
          long an = std::labs(n);
          for (long i = 0; i < an; ++i) acc = acc * base;
          return n >= 0 ? acc : T(1.0) / acc;
        }
      }
      return std::pow(eval_impl<T>(*e.a, vars), eval_impl<T>(*e.b, vars));
    }
    case K::neg:
      return -eval_impl<T>(*e.a, vars);
    case K::call: {
      T x = eval_impl<T>(*e.a, vars);
      if (e.func == "exp") return std::exp(x);
      if (e.func == "log") return std::log(x);
      if (e.func == "sqrt") return std::sqrt(x);
      if (e.func == "sin") return std::sin(x);
      if (e.func == "cos") return std::cos(x);
      fail(errc::internal, "unknown function '" + e.func + "'");
    }
  }
  fail(errc::internal, "corrupt expression node");
}

}  // namespace

ExprPtr make_const(double v) {
  return node({Expr::Kind::constant, v, -1, "", nullptr, nullptr});
}

ExprPtr make_var(int index) {
  return node({Expr::Kind::variable, 0, index, "", nullptr, nullptr});
}

ExprPtr parse_expr(const std::string& text,
                   const std::vector<std::string>& var_names) {
  return Parser(text, var_names).run();
}

double eval(const ExprPtr& e, std::span<const double> vars) {
  return eval_impl<double>(*e, vars);
}

std::complex<double> eval(const ExprPtr& e,
                          std::span<const std::complex<double>> vars) {
  return eval_impl<std::complex<double>>(*e, vars);
}

ExprPtr diff(const ExprPtr& e, int var) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::constant:
      return make_const(0.0);
    case K::variable:
      return make_const(e->var == var ? 1.0 : 0.0);
    case K::add:
      return make_add(diff(e->a, var), diff(e->b, var));
    case K::sub:
      return make_sub(diff(e->a, var), diff(e->b, var));
    case K::mul:
      return make_add(make_mul(diff(e->a, var), e->b),
                      make_mul(e->a, diff(e->b, var)));
    case K::div:
      // (a/b)' = a'/b - a b'/b^2
      return make_sub(make_div(diff(e->a, var), e->b),
                      make_div(make_mul(e->a, diff(e->b, var)),
                               make_mul(e->b, e->b)));
    case K::pow: {
      if (e->b->kind == K::constant) {
        // (a^c)' = c a^(c-1) a'
        double c = e->b->value;
        return make_mul(make_const(c),
                        make_mul(make_pow(e->a, make_const(c - 1.0)),
                                 diff(e->a, var)));
      }
      // General a^b = exp(b log a): (a^b)' = a^b (b' log a + b a'/a).
      ExprPtr self = make_pow(e->a, e->b);
      ExprPtr t1 = make_mul(diff(e->b, var), make_call("log", e->a));
      ExprPtr t2 = make_div(make_mul(e->b, diff(e->a, var)), e->a);
      return make_mul(self, make_add(t1, t2));
    }
    case K::neg:
      return make_neg(diff(e->a, var));
    case K::call: {
      ExprPtr da = diff(e->a, var);
      ExprPtr outer;
      if (e->func == "exp")
        outer = make_call("exp", e->a);
      else if (e->func == "log")
        outer = make_div(make_const(1.0), e->a);
      else if (e->func == "sqrt")
        outer = make_div(make_const(0.5), make_call("sqrt", e->a));
      else if (e->func == "sin")
        outer = make_call("cos", e->a);
      else if (e->func == "cos")
        outer = make_neg(make_call("sin", e->a));
      else
        fail(errc::internal, "unknown function '" + e->func + "'");
      return make_mul(outer, da);
    }
  }
  fail(errc::internal, "corrupt expression node");
}

std::string to_string(const ExprPtr& e,
                      const std::vector<std::string>& var_names) {
  using K = Expr::Kind;
  std::ostringstream os;
  switch (e->kind) {
    case K::constant:
      os << e->value;
      break;
    case K::variable:
      os << var_names.at(e->var);
      break;
    case K::add:
      os << "(" << to_string(e->a, var_names) << " + "
         << to_string(e->b, var_names) << ")";
      break;
    case K::sub:
      os << "(" << to_string(e->a, var_names) << " - "
         << to_string(e->b, var_names) << ")";
      break;
    case K::mul:
      os << "(" << to_string(e->a, var_names) << " * "
         << to_string(e->b, var_names) << ")";
      break;
    case K::div:
      os << "(" << to_string(e->a, var_names) << " / "
         << to_string(e->b, var_names) << ")";
      break;
    case K::pow:
      os << "(" << to_string(e->a, var_names) << " ^ "
         << to_string(e->b, var_names) << ")";
      break;
    case K::neg:
      os << "(-" << to_string(e->a, var_names) << ")";
      break;
    case K::call:
      os << e->func << "(" << to_string(e->a, var_names) << ")";
      break;
  }
  return os.str();
}

}  // namespace hodo
