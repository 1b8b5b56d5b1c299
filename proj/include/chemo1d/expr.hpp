#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "chemo1d/errors.hpp"

namespace chemo1d {

/// A parsed arithmetic expression in the single variable x.
///
/// Grammar (longest-match tokens, whitespace ignored):
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?                    // right-associative
///   atom   := NUMBER | 'x' | 'pi'
///           | ('cos'|'sin'|'exp'|'sqrt'|'abs'|'log') '(' expr ')'
///           | '(' expr ')'
class Expr {
 public:
  static Expr parse(const std::string& src) {
    Parser p{src, 0};
    Fn f = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size())
      throw ConfigError("expression: unexpected trailing input at position " +
                        std::to_string(p.pos) + " in '" + src + "'");
    return Expr(std::move(f), src);
  }

  double operator()(double x) const { return fn_(x); }
  const std::string& source() const { return src_; }

 private:
  using Fn = std::function<double(double)>;

  Expr(Fn f, std::string src) : fn_(std::move(f)), src_(std::move(src)) {}

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw ConfigError("expression: " + what + " at position " +
                        std::to_string(pos) + " in '" + s + "'");
    }

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
    }

    bool consume(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    Fn parse_expr() {
      Fn lhs = parse_term();
      for (;;) {
        if (consume('+')) {
          Fn rhs = parse_term();
          lhs = [l = std::move(lhs), r = std::move(rhs)](double x) {
            return l(x) + r(x);
          };
        } else if (consume('-')) {
          Fn rhs = parse_term();
          lhs = [l = std::move(lhs), r = std::move(rhs)](double x) {
            return l(x) - r(x);
          };
        } else {
          return lhs;
        }
      }
    }

    Fn parse_term() {
      Fn lhs = parse_unary();
      for (;;) {
        if (consume('*')) {
          Fn rhs = parse_unary();
          lhs = [l = std::move(lhs), r = std::move(rhs)](double x) {
            return l(x) * r(x);
          };
        } else if (consume('/')) {
          Fn rhs = parse_unary();
          lhs = [l = std::move(lhs), r = std::move(rhs)](double x) {
            return l(x) / r(x);
          };
        } else {
          return lhs;
        }
      }
    }

    Fn parse_unary() {
      if (consume('-')) {
        Fn inner = parse_unary();
        return [f = std::move(inner)](double x) { return -f(x); };
      }
      return parse_power();
    }

    Fn parse_power() {
      Fn base = parse_atom();
      if (consume('^')) {
        Fn exp = parse_unary();  // right-associative, unary minus allowed
        return [b = std::move(base), e = std::move(exp)](double x) {
          return std::pow(b(x), e(x));
        };
      }
      return base;
    }

    std::string parse_ident() {
      std::string id;
      while (pos < s.size() &&
             std::isalpha(static_cast<unsigned char>(s[pos])))
        id += s[pos++];
      return id;
    }

    Fn parse_atom() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<std::size_t>(end - begin);
        return [v](double) { return v; };
      }
      if (consume('(')) {
        Fn inner = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return inner;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::string id = parse_ident();
        if (id == "x") return [](double x) { return x; };
        if (id == "pi") return [](double) { return M_PI; };
        double (*f)(double) = nullptr;
        if (id == "cos") f = std::cos;
        else if (id == "sin") f = std::sin;
        else if (id == "exp") f = std::exp;
        else if (id == "sqrt") f = std::sqrt;
        else if (id == "abs") f = std::fabs;
        else if (id == "log") f = std::log;
        if (!f) fail("unknown identifier '" + id + "'");
        if (!consume('(')) fail("expected '(' after '" + id + "'");
        Fn arg = parse_expr();
        if (!consume(')')) fail("expected ')'");
        return [f, a = std::move(arg)](double x) { return f(a(x)); };
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  Fn fn_;
  std::string src_;
};

}  // namespace chemo1d
