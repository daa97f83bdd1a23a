#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "planetopt/design.hpp"

namespace planetopt {

struct ExpressionError : Error {
  using Error::Error;
};

// Dimension-expression grammar
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names are [A-Za-z_][A-Za-z0-9_]*. `pi` is a constant. Functions: min, max (two or more arguments),
// abs, sqrt, sin, cos, tan (radians), floor, ceil.
class Expression {
 public:
  enum class OpCode : std::uint8_t { constant, variable, add, sub, mul, div, neg, pow, call };
  enum class Function : std::uint8_t { min, max, abs, sqrt, sin, cos, tan, floor, ceil };

  struct Op {
    OpCode code = OpCode::constant;
    Function fn = Function::min;
    int argc = 0;
    int index = 0;  // variable index into names()
    double value = 0.0;
  };

  Expression() = default;
  static Expression parse(std::string_view text);

  const std::string& text() const noexcept { return text_; }
  // Referenced variable names, unique, in order of first use.
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<Op>& ops() const noexcept { return ops_; }
  int max_depth() const noexcept { return max_depth_; }

  // Slow path for tests and tools; lookup throws for unknown names.
  double evaluate(const std::function<double(std::string_view)>& lookup) const;

 private:
  friend class ExpressionParser;
  std::string text_;
  std::vector<std::string> names_;
  std::vector<Op> ops_;
  int max_depth_ = 0;
};

// Name -> slot registry shared by a set of compiled expressions.
class SlotMap {
 public:
  int add(std::string_view name);  // existing slot or a new one
  int find(std::string_view name) const noexcept;  // -1 when absent
  int at(std::string_view name) const;             // throws ExpressionError when absent
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

// Expression bound to slot indices; evaluation is allocation free.
class CompiledExpression {
 public:
  CompiledExpression() = default;
  CompiledExpression(const Expression& expr, const SlotMap& slots);

  double evaluate(std::span<const double> slots) const;
  const std::string& text() const noexcept { return text_; }
  // Slots read by the expression, unique.
  std::vector<int> slots() const;

 private:
  std::vector<Expression::Op> ops_;
  std::string text_;
};

}  // namespace planetopt
