#pragma once

#include <memory>
#include <string>

namespace transmission {

// Closed-form scalar field over (x, y). Grammar: + - * / ^, unary minus,
// parentheses, numbers, x, y, pi, and sin cos tan exp log sqrt abs tanh.
class Expression {
 public:
  // Throws ConfigError with the offending position on malformed input.
  static Expression parse(const std::string& text);

  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace transmission
