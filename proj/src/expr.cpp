#include "gravcheck/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace gravcheck {

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>(NodeKind::Number);
  n->value = v;
  return n;
}

bool as_number(const NodePtr& n, double* out) {
  if (n && n->kind == NodeKind::Number) {
    if (out) *out = n->value;
    return true;
  }
  return false;
}

bool is_const(const NodePtr& n, double v) {
  double x;
  return as_number(n, &x) && x == v;
}

bool is_integer_value(double v) {
  return std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e9;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b);
NodePtr make_neg(NodePtr a);
NodePtr make_call(Func f, NodePtr a);

NodePtr make_add(NodePtr a, NodePtr b) {
  double x, y;
  if (as_number(a, &x) && as_number(b, &y)) return make_number(x + y);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr make_sub(NodePtr a, NodePtr b) {
  double x, y;
  if (as_number(a, &x) && as_number(b, &y)) return make_number(x - y);
  if (is_const(b, 0.0)) return a;
  if (a.get() == b.get()) return make_number(0.0);
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr make_pow(NodePtr base, NodePtr expn);

NodePtr make_mul(NodePtr a, NodePtr b) {
  double x, y;
  if (as_number(a, &x) && as_number(b, &y)) return make_number(x * y);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_number(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return make_neg(std::move(b));
  if (is_const(b, -1.0)) return make_neg(std::move(a));
  // x * x^n and x * x merges (pointer identity only)
  if (a.get() == b.get()) return make_pow(a, make_number(2.0));
  if (b->kind == NodeKind::Pow && b->a.get() == a.get() &&
      b->b->kind == NodeKind::Number)
    return make_pow(a, make_number(b->b->value + 1.0));
  if (a->kind == NodeKind::Pow && a->a.get() == b.get() &&
      a->b->kind == NodeKind::Number)
    return make_pow(b, make_number(a->b->value + 1.0));
  return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr make_div(NodePtr a, NodePtr b) {
  double x, y;
  if (as_number(a, &x) && as_number(b, &y) && y != 0.0)
    return make_number(x / y);
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_number(0.0);
  if (is_const(b, 1.0)) return a;
  return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr make_neg(NodePtr a) {
  double x;
  if (as_number(a, &x)) return make_number(-x);
  if (a->kind == NodeKind::Neg) return a->a;
  auto n = std::make_shared<Node>(NodeKind::Neg);
  n->a = std::move(a);
  return n;
}

NodePtr make_pow(NodePtr base, NodePtr expn) {
  double b, e;
  bool bn = as_number(base, &b), en = as_number(expn, &e);
  if (en) {
    if (e == 0.0) return make_number(1.0);
    if (e == 1.0) return base;
    if (bn && (b > 0.0 || is_integer_value(e))) {
      double v = std::pow(b, e);
      if (std::isfinite(v)) return make_number(v);
    }
  }
  if (bn && b == 1.0) return make_number(1.0);
  return make_binary(NodeKind::Pow, std::move(base), std::move(expn));
}

double call_value(Func f, double x, bool* ok) {
  *ok = true;
  switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Tan: return std::tan(x);
    case Func::Exp: return std::exp(x);
    case Func::Log:
      if (x <= 0.0) { *ok = false; return 0.0; }
      return std::log(x);
    case Func::Sqrt:
      if (x < 0.0) { *ok = false; return 0.0; }
      return std::sqrt(x);
    case Func::Sinh: return std::sinh(x);
    case Func::Cosh: return std::cosh(x);
    case Func::Tanh: return std::tanh(x);
    case Func::Abs: return std::fabs(x);
  }
  *ok = false;
  return 0.0;
}

NodePtr make_call(Func f, NodePtr a) {
  double x;
  if (as_number(a, &x)) {
    bool ok;
    double v = call_value(f, x, &ok);
    if (ok && std::isfinite(v)) return make_number(v);
  }
  auto n = std::make_shared<Node>(NodeKind::Call);
  n->func = f;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>(k);
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

// ---------------------------------------------------------------------------
// printing

int precedence_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& child, int parent_prec, bool tight,
                 std::string& out) {
  bool parens = precedence_of(child) < parent_prec ||
                (tight && precedence_of(child) == parent_prec);
  if (parens) out += '(';
  print_node(child, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: {
      char buf[32];
      if (n.value == std::floor(n.value) && std::fabs(n.value) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", n.value);
      else
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::Symbol: out += n.name; return;
    case NodeKind::Add:
      print_child(*n.a, 1, false, out);
      out += '+';
      print_child(*n.b, 1, true, out);
      return;
    case NodeKind::Sub:
      print_child(*n.a, 1, false, out);
      out += '-';
      print_child(*n.b, 1, true, out);
      return;
    case NodeKind::Mul:
      print_child(*n.a, 2, false, out);
      out += '*';
      print_child(*n.b, 2, true, out);
      return;
    case NodeKind::Div:
      print_child(*n.a, 2, false, out);
      out += '/';
      print_child(*n.b, 2, true, out);
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(*n.a, 4, true, out);  // parenthesize -(x^y) and -(a*b)? keep ^ safe
      return;
    case NodeKind::Pow:
      print_child(*n.a, 5, false, out);  // base always atom-like or parenthesized
      out += '^';
      print_child(*n.b, 4, false, out);
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
  }
}

std::string truncated_str(const Node& n) {
  std::string s;
  print_node(n, s);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

}  // namespace

std::string to_string(const Node& n) {
  std::string s;
  print_node(n, s);
  return s;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Abs: return "abs";
  }
  return "?";
}

ScalarField ScalarField::number(double v) { return ScalarField(make_number(v)); }

ScalarField ScalarField::symbol(const std::string& name) {
  auto n = std::make_shared<Node>(NodeKind::Symbol);
  n->name = name;
  return ScalarField(n);
}

bool ScalarField::is_zero() const { return node_ && is_const(node_, 0.0); }

bool ScalarField::is_number(double* out) const {
  return node_ && as_number(node_, out);
}

std::string ScalarField::str() const {
  if (!node_) return "<empty>";
  std::string s;
  print_node(*node_, s);
  return s;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_add(a.node(), b.node()));
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_sub(a.node(), b.node()));
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_mul(a.node(), b.node()));
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return ScalarField(make_div(a.node(), b.node()));
}
ScalarField operator-(const ScalarField& a) {
  return ScalarField(make_neg(a.node()));
}
ScalarField pow(const ScalarField& base, const ScalarField& exponent) {
  return ScalarField(make_pow(base.node(), exponent.node()));
}
ScalarField pow(const ScalarField& base, double exponent) {
  return ScalarField(make_pow(base.node(), make_number(exponent)));
}
ScalarField apply(Func f, const ScalarField& arg) {
  return ScalarField(make_call(f, arg.node()));
}

// ---------------------------------------------------------------------------
// differentiation

namespace {

using DiffMemo = std::unordered_map<const Node*, NodePtr>;

NodePtr diff_node(const NodePtr& n, const std::string& coord, DiffMemo& memo) {
  auto it = memo.find(n.get());
  if (it != memo.end()) return it->second;
  NodePtr r;
  switch (n->kind) {
    case NodeKind::Number: r = make_number(0.0); break;
    case NodeKind::Symbol: r = make_number(n->name == coord ? 1.0 : 0.0); break;
    case NodeKind::Add:
      r = make_add(diff_node(n->a, coord, memo), diff_node(n->b, coord, memo));
      break;
    case NodeKind::Sub:
      r = make_sub(diff_node(n->a, coord, memo), diff_node(n->b, coord, memo));
      break;
    case NodeKind::Mul: {
      auto da = diff_node(n->a, coord, memo);
      auto db = diff_node(n->b, coord, memo);
      r = make_add(make_mul(da, n->b), make_mul(n->a, db));
      break;
    }
    case NodeKind::Div: {
      auto da = diff_node(n->a, coord, memo);
      auto db = diff_node(n->b, coord, memo);
      r = make_div(make_sub(make_mul(da, n->b), make_mul(n->a, db)),
                   make_pow(n->b, make_number(2.0)));
      break;
    }
    case NodeKind::Pow: {
      auto da = diff_node(n->a, coord, memo);
      double e;
      if (as_number(n->b, &e)) {
        // d(u^c) = c u^(c-1) u'
        r = make_mul(make_number(e),
                     make_mul(make_pow(n->a, make_number(e - 1.0)), da));
      } else {
        // d(u^v) = u^v (v' log u + v u'/u)
        auto db = diff_node(n->b, coord, memo);
        auto t1 = make_mul(db, make_call(Func::Log, n->a));
        auto t2 = make_mul(n->b, make_div(da, n->a));
        r = make_mul(n, make_add(t1, t2));
      }
      break;
    }
    case NodeKind::Neg: r = make_neg(diff_node(n->a, coord, memo)); break;
    case NodeKind::Call: {
      auto da = diff_node(n->a, coord, memo);
      NodePtr g;
      switch (n->func) {
        case Func::Sin: g = make_call(Func::Cos, n->a); break;
        case Func::Cos: g = make_neg(make_call(Func::Sin, n->a)); break;
        case Func::Tan:
          g = make_div(make_number(1.0),
                       make_pow(make_call(Func::Cos, n->a), make_number(2.0)));
          break;
        case Func::Exp: g = n; break;
        case Func::Log: g = make_div(make_number(1.0), n->a); break;
        case Func::Sqrt:
          g = make_div(make_number(0.5), n);
          break;
        case Func::Sinh: g = make_call(Func::Cosh, n->a); break;
        case Func::Cosh: g = make_call(Func::Sinh, n->a); break;
        case Func::Tanh:
          g = make_sub(make_number(1.0), make_pow(n, make_number(2.0)));
          break;
        case Func::Abs: g = make_div(n->a, n); break;  // sign(u), faults at 0
      }
      r = make_mul(g, da);
      break;
    }
  }
  memo.emplace(n.get(), r);
  return r;
}

}  // namespace

ScalarField differentiate(const ScalarField& f, const std::string& coord) {
  DiffMemo memo;
  return ScalarField(diff_node(f.node(), coord, memo));
}

// ---------------------------------------------------------------------------
// direct evaluation

namespace {

double eval_node(const Node& n, const Bindings& env,
                 std::unordered_map<const Node*, double>& memo) {
  auto it = memo.find(&n);
  if (it != memo.end()) return it->second;
  double r = 0.0;
  switch (n.kind) {
    case NodeKind::Number: r = n.value; break;
    case NodeKind::Symbol: {
      auto v = env.values.find(n.name);
      if (v == env.values.end())
        throw EvalError("unbound symbol", n.name);
      r = v->second;
      break;
    }
    case NodeKind::Add:
      r = eval_node(*n.a, env, memo) + eval_node(*n.b, env, memo);
      break;
    case NodeKind::Sub:
      r = eval_node(*n.a, env, memo) - eval_node(*n.b, env, memo);
      break;
    case NodeKind::Mul:
      r = eval_node(*n.a, env, memo) * eval_node(*n.b, env, memo);
      break;
    case NodeKind::Div: {
      double num = eval_node(*n.a, env, memo);
      double den = eval_node(*n.b, env, memo);
      if (den == 0.0) throw EvalError("division by zero", truncated_str(n));
      r = num / den;
      break;
    }
    case NodeKind::Pow: {
      double b = eval_node(*n.a, env, memo);
      double e = eval_node(*n.b, env, memo);
      if (is_integer_value(e)) {
        if (b == 0.0 && e < 0.0)
          throw EvalError("zero base with negative exponent", truncated_str(n));
        r = std::pow(b, e);
      } else {
        if (b <= 0.0)
          throw EvalError("nonpositive base with non-integer exponent",
                          truncated_str(n));
        r = std::exp(e * std::log(b));
      }
      break;
    }
    case NodeKind::Neg: r = -eval_node(*n.a, env, memo); break;
    case NodeKind::Call: {
      double x = eval_node(*n.a, env, memo);
      bool ok;
      if (n.func == Func::Tan) {
        double c = std::cos(x);
        if (c == 0.0) throw EvalError("tan pole", truncated_str(n));
      }
      r = call_value(n.func, x, &ok);
      if (!ok) {
        const char* what = n.func == Func::Log ? "log of nonpositive value"
                                               : "sqrt of negative value";
        throw EvalError(what, truncated_str(n));
      }
      break;
    }
  }
  if (!std::isfinite(r)) throw EvalError("non-finite value", truncated_str(n));
  memo.emplace(&n, r);
  return r;
}

}  // namespace

double evaluate(const ScalarField& f, const Bindings& env) {
  std::unordered_map<const Node*, double> memo;
  return eval_node(*f.node(), env, memo);
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;
  const std::vector<std::string>& coords;
  const std::vector<std::string>& params;

  void skip_ws() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ParseError(msg + " at position " + std::to_string(at), at);
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = make_add(e, parse_term());
      else if (accept('-'))
        e = make_sub(e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = make_mul(e, parse_factor());
      else if (accept('/'))
        e = make_div(e, parse_factor());
      else
        return e;
    }
  }

  // '^' binds tighter than a leading unary minus: -2^2 == -(2^2).
  NodePtr parse_factor() {
    if (accept('-')) return make_neg(parse_factor());
    NodePtr base = parse_atom();
    if (accept('^')) return make_pow(base, parse_factor());
    return base;
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input", pos);
    char c = text[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = parse_expr();
      if (!accept(')')) fail("expected ')'", pos);
      return e;
    }
    if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
    if (std::isalpha((unsigned char)c) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  NodePtr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit((unsigned char)text[pos]) || text[pos] == '.'))
      ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t save = pos++;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit((unsigned char)text[pos])) {
        while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
      } else {
        pos = save;  // 'e' was not an exponent
      }
    }
    std::string tok = text.substr(start, pos - start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
      fail("malformed number '" + tok + "'", start);
    return make_number(v);
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum((unsigned char)text[pos]) ||
                                 text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);
    static const std::pair<const char*, Func> kFuncs[] = {
        {"sin", Func::Sin},   {"cos", Func::Cos},   {"tan", Func::Tan},
        {"exp", Func::Exp},   {"log", Func::Log},   {"sqrt", Func::Sqrt},
        {"sinh", Func::Sinh}, {"cosh", Func::Cosh}, {"tanh", Func::Tanh},
        {"abs", Func::Abs}};
    for (auto& [fn, f] : kFuncs) {
      if (name == fn) {
        if (!accept('('))
          fail("function '" + name + "' requires an argument list", pos);
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')' after function argument", pos);
        return make_call(f, arg);
      }
    }
    if (peek('('))
      fail("unknown function '" + name + "'", start);
    for (const auto& s : coords)
      if (s == name) {
        auto n = std::make_shared<Node>(NodeKind::Symbol);
        n->name = name;
        return n;
      }
    for (const auto& s : params)
      if (s == name) {
        auto n = std::make_shared<Node>(NodeKind::Symbol);
        n->name = name;
        return n;
      }
    fail("unknown identifier '" + name + "'", start);
  }
};

}  // namespace

ScalarField parse_expression(const std::string& text,
                             const std::vector<std::string>& coords,
                             const std::vector<std::string>& params) {
  Parser p{text, 0, coords, params};
  NodePtr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    p.fail("trailing input", p.pos);
  return ScalarField(e);
}

}  // namespace gravcheck
