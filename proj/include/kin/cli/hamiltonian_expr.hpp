#pragma once

// Text form of Hamiltonians: a small arithmetic grammar over the ambient
// coordinates x1, y1, z1, x2, y2, z2.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | primary
//   primary := number | variable | '(' expr ')'

#include <memory>
#include <string>
#include <string_view>

#include "kin/hamiltonian_flow.hpp"

namespace kin::cli {

class HamiltonianExpr {
 public:
  enum class Kind { Number, Variable, Add, Sub, Mul, Neg };

  struct Node {
    Kind kind = Kind::Number;
    double value = 0.0;  // Number
    int variable = 0;    // Variable, index into kAmbientNames
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;  // unused by Neg
  };

  static constexpr std::size_t kMaxInputBytes = 4096;
  /// Cap on the degree of intermediate products during expansion.
  static constexpr int kMaxIntermediateDegree = 12;

  /// Throws SyntaxError (byte offset, expected tokens) or UnknownVariable.
  static HamiltonianExpr parse(std::string_view text);

  const Node& root() const { return *root_; }

  /// Canonical text; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

  /// Expanded polynomial. Throws DegreeTooHigh when an intermediate product
  /// exceeds degree 12 or a surviving monomial exceeds degree 3.
  HamiltonianFunction expand() const;

  friend bool operator==(const HamiltonianExpr& a, const HamiltonianExpr& b);

 private:
  explicit HamiltonianExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

/// parse(text).expand()
HamiltonianFunction parse_hamiltonian(std::string_view text);

}  // namespace kin::cli
