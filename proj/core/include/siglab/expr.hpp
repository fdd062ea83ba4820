#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "siglab/vec2.hpp"

namespace siglab {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiled arithmetic expression in the variables x and y. Supports
/// numeric literals, pi, + - * /, unary minus, parentheses and the
/// functions sin, cos, ln. Evaluation throws ExprError when the result is
/// not finite (division by zero, ln of a nonpositive value).
class Expr {
 public:
  /// Throws ExprError with a position hint on malformed input.
  static Expr parse(const std::string& text);

  double eval(Vec2 p) const;
  const std::string& text() const { return text_; }

 private:
  enum class Op : std::uint8_t {
    kPushConst,
    kPushX,
    kPushY,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kNeg,
    kSin,
    kCos,
    kLn,
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  friend class ExprParser;
  std::string text_;
  std::vector<Instr> program_;  // postfix order
};

/// Comma-separated pair of scalar expressions, evaluated as a vector field.
struct VectorExpr {
  Expr x, y;

  static VectorExpr parse(const std::string& text);
  Vec2 eval(Vec2 p) const { return {x.eval(p), y.eval(p)}; }
};

}  // namespace siglab
