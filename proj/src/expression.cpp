#include "planetopt/expression.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace planetopt {

namespace {

constexpr int kMaxDepth = 64;

struct FunctionInfo {
  std::string_view name;
  Expression::Function fn;
  int min_args;
  int max_args;  // -1: unbounded
};

constexpr std::array<FunctionInfo, 9> kFunctions{{
    {"min", Expression::Function::min, 2, -1},
    {"max", Expression::Function::max, 2, -1},
    {"abs", Expression::Function::abs, 1, 1},
    {"sqrt", Expression::Function::sqrt, 1, 1},
    {"sin", Expression::Function::sin, 1, 1},
    {"cos", Expression::Function::cos, 1, 1},
    {"tan", Expression::Function::tan, 1, 1},
    {"floor", Expression::Function::floor, 1, 1},
    {"ceil", Expression::Function::ceil, 1, 1},
}};

double apply(Expression::Function fn, const double* args, int argc) {
  switch (fn) {
    case Expression::Function::min: return *std::min_element(args, args + argc);
    case Expression::Function::max: return *std::max_element(args, args + argc);
    case Expression::Function::abs: return std::fabs(args[0]);
    case Expression::Function::sqrt: return std::sqrt(args[0]);
    case Expression::Function::sin: return std::sin(args[0]);
    case Expression::Function::cos: return std::cos(args[0]);
    case Expression::Function::tan: return std::tan(args[0]);
    case Expression::Function::floor: return std::floor(args[0]);
    case Expression::Function::ceil: return std::ceil(args[0]);
  }
  return 0.0;
}

template <typename Load>
double run(const std::vector<Expression::Op>& ops, Load&& load) {
  std::array<double, kMaxDepth> stack;  // NOLINT: written before read
  int top = 0;
  for (const auto& op : ops) {
    switch (op.code) {
      case Expression::OpCode::constant: stack[top++] = op.value; break;
      case Expression::OpCode::variable: stack[top++] = load(op.index); break;
      case Expression::OpCode::add: --top; stack[top - 1] += stack[top]; break;
      case Expression::OpCode::sub: --top; stack[top - 1] -= stack[top]; break;
      case Expression::OpCode::mul: --top; stack[top - 1] *= stack[top]; break;
      case Expression::OpCode::div: --top; stack[top - 1] /= stack[top]; break;
      case Expression::OpCode::pow: --top; stack[top - 1] = std::pow(stack[top - 1], stack[top]); break;
      case Expression::OpCode::neg: stack[top - 1] = -stack[top - 1]; break;
      case Expression::OpCode::call: {
        top -= op.argc;
        stack[top] = apply(op.fn, &stack[top], op.argc);
        ++top;
        break;
      }
    }
  }
  return stack[0];
}

}  // namespace

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : src_(text) { out_.text_ = std::string(text); }

  Expression run() {
    skip_ws();
    if (pos_ >= src_.size()) fail("empty expression");
    expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression '" + std::string(src_) + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Expression::Op op, int delta) {
    out_.ops_.push_back(op);
    depth_ += delta;
    if (depth_ > kMaxDepth) fail("expression nests too deeply");
    out_.max_depth_ = std::max(out_.max_depth_, depth_);
  }

  void binary(Expression::OpCode code) { emit({code}, -1); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        binary(Expression::OpCode::add);
      } else if (accept('-')) {
        term();
        binary(Expression::OpCode::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        binary(Expression::OpCode::mul);
      } else if (accept('/')) {
        unary();
        binary(Expression::OpCode::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit({Expression::OpCode::neg}, 0);
      return;
    }
    if (accept('+')) {
      unary();
      return;
    }
    power();
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      binary(Expression::OpCode::pow);
    }
  }

  void primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("missing ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view name = src_.substr(start, pos_ - start);
      if (accept('(')) {
        call(name);
        return;
      }
      if (name == "pi") {
        Expression::Op op;
        op.value = std::numbers::pi;
        emit(op, +1);
        return;
      }
      Expression::Op op{Expression::OpCode::variable};
      auto it = std::find(out_.names_.begin(), out_.names_.end(), name);
      if (it == out_.names_.end()) {
        out_.names_.emplace_back(name);
        it = out_.names_.end() - 1;
      }
      op.index = static_cast<int>(it - out_.names_.begin());
      emit(op, +1);
      return;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  void number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    Expression::Op op;
    op.value = v;
    emit(op, +1);
  }

  void call(std::string_view name) {
    auto info = std::find_if(kFunctions.begin(), kFunctions.end(), [&](const auto& f) { return f.name == name; });
    if (info == kFunctions.end()) fail("unknown function '" + std::string(name) + "'");
    int argc = 0;
    if (!accept(')')) {
      do {
        expr();
        ++argc;
      } while (accept(','));
      if (!accept(')')) fail("missing ')' after arguments");
    }
    if (argc < info->min_args || (info->max_args >= 0 && argc > info->max_args))
      fail("wrong number of arguments to " + std::string(name));
    Expression::Op op{Expression::OpCode::call};
    op.fn = info->fn;
    op.argc = argc;
    emit(op, 1 - argc);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  Expression out_;
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

double Expression::evaluate(const std::function<double(std::string_view)>& lookup) const {
  std::vector<double> values;
  values.reserve(names_.size());
  for (const auto& n : names_) values.push_back(lookup(n));
  return run(ops_, [&](int i) { return values[static_cast<std::size_t>(i)]; });
}

int SlotMap::add(std::string_view name) {
  const int existing = find(name);
  if (existing >= 0) return existing;
  const int slot = static_cast<int>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), slot);
  return slot;
}

int SlotMap::find(std::string_view name) const noexcept {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

int SlotMap::at(std::string_view name) const {
  const int slot = find(name);
  if (slot < 0) throw ExpressionError("unknown dimension '" + std::string(name) + "'");
  return slot;
}

CompiledExpression::CompiledExpression(const Expression& expr, const SlotMap& slots)
    : ops_(expr.ops()), text_(expr.text()) {
  for (auto& op : ops_) {
    if (op.code == Expression::OpCode::variable) {
      const std::string& name = expr.names()[static_cast<std::size_t>(op.index)];
      const int slot = slots.find(name);
      if (slot < 0) throw ExpressionError("expression '" + expr.text() + "' references unknown dimension '" + name + "'");
      op.index = slot;
    }
  }
}

std::vector<int> CompiledExpression::slots() const {
  std::vector<int> out;
  for (const auto& op : ops_)
    if (op.code == Expression::OpCode::variable && std::find(out.begin(), out.end(), op.index) == out.end())
      out.push_back(op.index);
  return out;
}

double CompiledExpression::evaluate(std::span<const double> slots) const {
  if (ops_.size() == 1) {
    const auto& op = ops_.front();
    if (op.code == Expression::OpCode::constant) return op.value;
    if (op.code == Expression::OpCode::variable) return slots[static_cast<std::size_t>(op.index)];
  }
  return run(ops_, [&](int i) { return slots[static_cast<std::size_t>(i)]; });
}

}  // namespace planetopt
