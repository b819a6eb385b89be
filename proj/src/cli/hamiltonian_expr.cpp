#include "kin/cli/hamiltonian_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

namespace kin::cli {

namespace {

using Node = HamiltonianExpr::Node;
using Kind = HamiltonianExpr::Kind;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Kind k, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail({"+", "-", "*", "end of input"}, "unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) {
    std::string msg = what + " at byte " + std::to_string(pos_) + "; expected one of:";
    for (const auto& e : expected) msg += " '" + e + "'";
    throw SyntaxError(pos_, std::move(expected), msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (accept('*')) lhs = make(Kind::Mul, lhs, unary());
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    return primary();
  }

  NodePtr primary() {
    skip_space();
    static const std::vector<std::string> kExpected = {"number", "variable", "(", "-"};
    if (pos_ >= text_.size()) fail(kExpected, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      skip_space();
      if (!accept(')')) fail({"+", "-", "*", ")"}, "unbalanced parenthesis");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return variable();
    fail(kExpected, "unexpected character");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail({"number", "variable", "(", "-"}, "malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail({"exponent digits"}, "malformed exponent");
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value)) {
      pos_ = start;
      fail({"finite number"}, "number out of range");
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = value;
    return n;
  }

  NodePtr variable() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    for (int i = 0; i < 6; ++i) {
      if (name == kAmbientNames[static_cast<std::size_t>(i)]) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->variable = i;
        return n;
      }
    }
    throw UnknownVariable("unknown variable '" + std::string(name) + "' at byte " + std::to_string(start) +
                          "; expected one of x1 y1 z1 x2 y2 z2");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
      return 2;
    case Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print(const Node& n, std::string& out) {
  auto child = [&out](const Node& c, bool paren) {
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Kind::Variable:
      out += kAmbientNames[static_cast<std::size_t>(n.variable)];
      return;
    case Kind::Neg:
      out += '-';
      child(*n.lhs, precedence(n.lhs->kind) < 3);
      return;
    default: {
      const int p = precedence(n.kind);
      child(*n.lhs, precedence(n.lhs->kind) < p);
      out += n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : " * ";
      child(*n.rhs, precedence(n.rhs->kind) <= p);
      return;
    }
  }
}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Number:
      return a.value == b.value;
    case Kind::Variable:
      return a.variable == b.variable;
    case Kind::Neg:
      return equal(*a.lhs, *b.lhs);
    default:
      return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

using Exponents = std::array<std::uint8_t, 6>;
using Poly = std::map<Exponents, double>;

int degree(const Exponents& e) {
  int d = 0;
  for (auto x : e) d += x;
  return d;
}

Poly expand_node(const Node& n) {
  switch (n.kind) {
    case Kind::Number:
      return n.value == 0.0 ? Poly{} : Poly{{Exponents{}, n.value}};
    case Kind::Variable: {
      Exponents e{};
      e[static_cast<std::size_t>(n.variable)] = 1;
      return {{e, 1.0}};
    }
    case Kind::Neg: {
      Poly p = expand_node(*n.lhs);
      for (auto& [e, c] : p) c = -c;
      return p;
    }
    case Kind::Add:
    case Kind::Sub: {
      Poly p = expand_node(*n.lhs);
      const double sign = n.kind == Kind::Add ? 1.0 : -1.0;
      for (const auto& [e, c] : expand_node(*n.rhs)) p[e] += sign * c;
      std::erase_if(p, [](const auto& kv) { return kv.second == 0.0; });
      return p;
    }
    case Kind::Mul: {
      const Poly a = expand_node(*n.lhs);
      const Poly b = expand_node(*n.rhs);
      Poly p;
      for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
          if (degree(ea) + degree(eb) > HamiltonianExpr::kMaxIntermediateDegree) {
            throw DegreeTooHigh("intermediate product exceeds degree " +
                                std::to_string(HamiltonianExpr::kMaxIntermediateDegree));
          }
          Exponents e{};
          for (std::size_t i = 0; i < 6; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
          p[e] += ca * cb;
        }
      }
      std::erase_if(p, [](const auto& kv) { return kv.second == 0.0; });
      return p;
    }
  }
  return {};
}

}  // namespace

HamiltonianExpr HamiltonianExpr::parse(std::string_view text) {
  if (text.size() > kMaxInputBytes) {
    throw SyntaxError(kMaxInputBytes, {"end of input"}, "expression longer than 4096 bytes");
  }
  return HamiltonianExpr(Parser(text).parse_all());
}

std::string HamiltonianExpr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

HamiltonianFunction HamiltonianExpr::expand() const {
  std::vector<Monomial> terms;
  for (const auto& [e, c] : expand_node(*root_)) terms.push_back({c, e});
  return HamiltonianFunction(std::move(terms));
}

bool operator==(const HamiltonianExpr& a, const HamiltonianExpr& b) { return equal(*a.root_, *b.root_); }

HamiltonianFunction parse_hamiltonian(std::string_view text) { return HamiltonianExpr::parse(text).expand(); }

}  // namespace kin::cli
