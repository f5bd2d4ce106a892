#ifndef GRAVCHECK_EXPR_HPP
#define GRAVCHECK_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gravcheck {

/// Thrown by the parser; `position` is a 0-based offset into the input text.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, std::size_t position)
      : std::runtime_error(std::move(msg)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Thrown on numeric domain faults (sqrt of a negative, log of a nonpositive,
/// division by zero, non-finite intermediate). Carries the offending
/// subexpression, pretty-printed.
class EvalError : public std::runtime_error {
public:
  EvalError(std::string msg, std::string subexpr)
      : std::runtime_error(msg + " in '" + subexpr + "'"),
        subexpr_(std::move(subexpr)) {}
  const std::string& subexpression() const { return subexpr_; }

private:
  std::string subexpr_;
};

enum class NodeKind : std::uint8_t {
  Number,
  Symbol,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Call,
};

enum class Func : std::uint8_t {
  Sin,
  Cos,
  Tan,
  Exp,
  Log,
  Sqrt,
  Sinh,
  Cosh,
  Tanh,
  Abs,
};

const char* func_name(Func f);

struct Node;
using NodePtr = std::shared_ptr<const Node>;

std::string to_string(const Node& n);

/// Immutable expression node. Nodes are shared freely; identical subtrees
/// produced by differentiation alias the same object, which the tape
/// compiler later exploits for common-subexpression elimination.
struct Node {
  NodeKind kind;
  Func func = Func::Sin;  // Call only
  double value = 0.0;     // Number only
  std::string name;       // Symbol only
  NodePtr a, b;

  Node(NodeKind k) : kind(k) {}
};

/// A scalar field over a chart: a symbolic expression in coordinate and
/// parameter symbols, immutable after construction.
class ScalarField {
public:
  ScalarField() : node_(nullptr) {}
  explicit ScalarField(NodePtr n) : node_(std::move(n)) {}

  static ScalarField number(double v);
  static ScalarField symbol(const std::string& name);

  const NodePtr& node() const { return node_; }
  bool is_zero() const;              // structurally the constant 0
  bool is_number(double* out = nullptr) const;

  std::string str() const;           // pretty-print, re-parsable

private:
  NodePtr node_;
};

// Arithmetic with light simplification (constant folding, 0/1 identities,
// x*x^n merge). Never canonicalizes beyond that.
ScalarField operator+(const ScalarField&, const ScalarField&);
ScalarField operator-(const ScalarField&, const ScalarField&);
ScalarField operator*(const ScalarField&, const ScalarField&);
ScalarField operator/(const ScalarField&, const ScalarField&);
ScalarField operator-(const ScalarField&);
ScalarField pow(const ScalarField& base, const ScalarField& exponent);
ScalarField pow(const ScalarField& base, double exponent);
ScalarField apply(Func f, const ScalarField& arg);

inline ScalarField sin(const ScalarField& x) { return apply(Func::Sin, x); }
inline ScalarField cos(const ScalarField& x) { return apply(Func::Cos, x); }
inline ScalarField exp(const ScalarField& x) { return apply(Func::Exp, x); }
inline ScalarField log(const ScalarField& x) { return apply(Func::Log, x); }
inline ScalarField sqrt(const ScalarField& x) { return apply(Func::Sqrt, x); }
inline ScalarField abs(const ScalarField& x) { return apply(Func::Abs, x); }

/// Exact symbolic partial derivative with respect to `coord`. Closed under
/// repeated application; no truncation error at any order.
ScalarField differentiate(const ScalarField& f, const std::string& coord);

/// Point in the chart plus parameter bindings, for direct evaluation.
struct Bindings {
  std::map<std::string, double> values;  // symbol -> value
};

/// Direct recursive evaluation with per-call memoization on shared subtrees.
/// Deterministic: same tree + same bindings -> bit-identical result.
/// Throws EvalError on domain faults; NaN/Inf never escape silently.
double evaluate(const ScalarField& f, const Bindings& env);

/// Parse per the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-' unary | atom
///   atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
/// with '^' right-associative and binding tighter than unary minus.
/// Identifiers must be declared coordinates, parameters, or function names.
ScalarField parse_expression(const std::string& text,
                             const std::vector<std::string>& coords,
                             const std::vector<std::string>& params);

}  // namespace gravcheck

#endif
