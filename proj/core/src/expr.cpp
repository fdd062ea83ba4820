#include "siglab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace siglab {

// Recursive descent over the usual grammar
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := '-' unary | primary
//   primary := number | 'x' | 'y' | 'pi' | name '(' expr ')' | '(' expr ')'
// emitting a postfix program as it goes.
class ExprParser {
 public:
  ExprParser(const std::string& text, Expr* out) : text_(text), out_(out) {}

  void run() {
    parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
  }

  // Splits "a, b" at the single top-level comma.
  static std::size_t top_level_comma(const std::string& text) {
    int depth = 0;
    std::size_t found = std::string::npos;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        if (found != std::string::npos)
          throw ExprError("vector expression needs exactly one top-level comma");
        found = i;
      }
    }
    return found;
  }

 private:
  void fail(const std::string& why) const {
    throw ExprError("expression error at position " + std::to_string(pos_) + ": " + why +
                    " in \"" + text_ + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Expr::Op op, double v = 0.0) { out_->program_.push_back({op, v}); }

  void parse_expr() {
    // Nesting bound keeps both parser recursion and the evaluation stack
    // comfortably finite.
    if (++depth_ > 48) fail("expression nested too deeply");
    parse_term();
    for (;;) {
      if (eat('+')) {
        parse_term();
        emit(Expr::Op::kAdd);
      } else if (eat('-')) {
        parse_term();
        emit(Expr::Op::kSub);
      } else {
        --depth_;
        return;
      }
    }
  }

  void parse_term() {
    parse_unary();
    for (;;) {
      if (eat('*')) {
        parse_unary();
        emit(Expr::Op::kMul);
      } else if (eat('/')) {
        parse_unary();
        emit(Expr::Op::kDiv);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    if (eat('-')) {
      parse_unary();
      emit(Expr::Op::kNeg);
      return;
    }
    parse_primary();
  }

  void parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("expected a value");
    const char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      parse_expr();
      if (!eat(')')) fail("expected ')'");
      return;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(start, &end);
      if (end == start) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - start);
      emit(Expr::Op::kPushConst, v);
      return;
    }

    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t len = 0;
      while (pos_ + len < text_.size() &&
             std::isalpha(static_cast<unsigned char>(text_[pos_ + len])))
        ++len;
      const std::string name = text_.substr(pos_, len);
      pos_ += len;
      if (name == "x") {
        emit(Expr::Op::kPushX);
      } else if (name == "y") {
        emit(Expr::Op::kPushY);
      } else if (name == "pi") {
        emit(Expr::Op::kPushConst, std::numbers::pi);
      } else if (name == "sin" || name == "cos" || name == "ln") {
        if (!eat('(')) fail("expected '(' after " + name);
        parse_expr();
        if (!eat(')')) fail("expected ')'");
        emit(name == "sin" ? Expr::Op::kSin : name == "cos" ? Expr::Op::kCos : Expr::Op::kLn);
      } else {
        fail("unknown name '" + name + "'");
      }
      return;
    }

    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& text_;
  Expr* out_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  ExprParser parser(text, &e);
  parser.run();
  return e;
}

double Expr::eval(Vec2 p) const {
  double stack[64];
  int top = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::kPushConst:
        stack[top++] = in.value;
        break;
      case Op::kPushX:
        stack[top++] = p.x;
        break;
      case Op::kPushY:
        stack[top++] = p.y;
        break;
      case Op::kAdd:
        --top;
        stack[top - 1] += stack[top];
        break;
      case Op::kSub:
        --top;
        stack[top - 1] -= stack[top];
        break;
      case Op::kMul:
        --top;
        stack[top - 1] *= stack[top];
        break;
      case Op::kDiv:
        --top;
        stack[top - 1] /= stack[top];
        break;
      case Op::kNeg:
        stack[top - 1] = -stack[top - 1];
        break;
      case Op::kSin:
        stack[top - 1] = std::sin(stack[top - 1]);
        break;
      case Op::kCos:
        stack[top - 1] = std::cos(stack[top - 1]);
        break;
      case Op::kLn:
        stack[top - 1] = std::log(stack[top - 1]);
        break;
    }
    if (top >= 64) throw ExprError("expression too deep");
  }
  const double result = stack[0];
  if (!std::isfinite(result))
    throw ExprError("expression \"" + text_ + "\" is not finite at (" + std::to_string(p.x) +
                    ", " + std::to_string(p.y) + ")");
  return result;
}

VectorExpr VectorExpr::parse(const std::string& text) {
  const std::size_t comma = ExprParser::top_level_comma(text);
  if (comma == std::string::npos)
    throw ExprError("vector expression needs a top-level comma: \"" + text + "\"");
  VectorExpr v;
  v.x = Expr::parse(text.substr(0, comma));
  v.y = Expr::parse(text.substr(comma + 1));
  return v;
}

}  // namespace siglab
