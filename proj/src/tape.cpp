#include "gravcheck/tape.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

namespace gravcheck {

namespace {

struct OpKey {
  std::uint8_t kind;
  std::uint8_t func;
  std::uint32_t a;
  std::uint32_t b;
  std::uint64_t bits;  // number payload / input slot

  bool operator==(const OpKey& o) const {
    return kind == o.kind && func == o.func && a == o.a && b == o.b &&
           bits == o.bits;
  }
};

struct OpKeyHash {
  std::size_t operator()(const OpKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    mix(k.kind);
    mix(k.func);
    mix(k.a);
    mix(k.b);
    mix(k.bits);
    return static_cast<std::size_t>(h);
  }
};

std::uint64_t double_bits(double v) {
  std::uint64_t b;
  std::memcpy(&b, &v, sizeof b);
  return b;
}

std::string node_str(const Node* n) {
  if (!n) return "?";
  std::string s = to_string(*n);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

bool integer_exponent(double e) {
  return std::isfinite(e) && e == std::floor(e) && std::fabs(e) < 1e9;
}

}  // namespace

Tape::Tape(std::span<const ScalarField> roots,
           const std::vector<std::string>& symbols) {
  num_inputs_ = symbols.size();
  std::unordered_map<std::string, std::uint32_t> input_slot;
  for (std::uint32_t i = 0; i < symbols.size(); ++i)
    input_slot.emplace(symbols[i], i);

  std::unordered_map<OpKey, std::uint32_t, OpKeyHash> cse;
  std::unordered_map<const Node*, std::uint32_t> visited;

  // Iterative post-order; expression DAGs can be deep after repeated
  // differentiation.
  struct Frame {
    const Node* node;
    bool expanded;
  };
  std::vector<Frame> stack;

  auto emit = [&](const Node* n) -> std::uint32_t {
    OpKey key{};
    key.kind = static_cast<std::uint8_t>(n->kind);
    switch (n->kind) {
      case NodeKind::Number:
        key.bits = double_bits(n->value);
        break;
      case NodeKind::Symbol: {
        auto it = input_slot.find(n->name);
        if (it == input_slot.end())
          throw EvalError("unbound symbol", n->name);
        key.bits = it->second;
        break;
      }
      case NodeKind::Call:
        key.func = static_cast<std::uint8_t>(n->func);
        key.a = visited.at(n->a.get());
        break;
      case NodeKind::Neg:
        key.a = visited.at(n->a.get());
        break;
      default:
        key.a = visited.at(n->a.get());
        key.b = visited.at(n->b.get());
        break;
    }
    auto it = cse.find(key);
    if (it != cse.end()) return it->second;
    Op op;
    op.kind = n->kind;
    op.func = n->kind == NodeKind::Call ? n->func : Func::Sin;
    op.a = key.a;
    op.b = key.b;
    op.value = n->kind == NodeKind::Symbol ? static_cast<double>(key.bits)
                                           : n->value;
    op.src = n;
    std::uint32_t slot = static_cast<std::uint32_t>(ops_.size());
    ops_.push_back(op);
    cse.emplace(key, slot);
    return slot;
  };

  for (const ScalarField& f : roots) {
    keep_alive_.push_back(f);
    const Node* root = f.node().get();
    if (!visited.count(root)) {
      stack.push_back({root, false});
      while (!stack.empty()) {
        Frame fr = stack.back();
        stack.pop_back();
        if (visited.count(fr.node)) continue;
        if (fr.expanded) {
          visited.emplace(fr.node, emit(fr.node));
          continue;
        }
        stack.push_back({fr.node, true});
        if (fr.node->a && !visited.count(fr.node->a.get()))
          stack.push_back({fr.node->a.get(), false});
        if (fr.node->b && !visited.count(fr.node->b.get()))
          stack.push_back({fr.node->b.get(), false});
      }
    }
    root_slots_.push_back(visited.at(root));
  }
}

void Tape::evaluate(std::span<const double> inputs,
                    std::vector<double>& scratch,
                    std::span<double> out) const {
  scratch.resize(ops_.size());
  double* v = scratch.data();
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    double r;
    switch (op.kind) {
      case NodeKind::Number: r = op.value; break;
      case NodeKind::Symbol: r = inputs[static_cast<std::size_t>(op.value)]; break;
      case NodeKind::Add: r = v[op.a] + v[op.b]; break;
      case NodeKind::Sub: r = v[op.a] - v[op.b]; break;
      case NodeKind::Mul: r = v[op.a] * v[op.b]; break;
      case NodeKind::Div:
        if (v[op.b] == 0.0)
          throw EvalError("division by zero", node_str(op.src));
        r = v[op.a] / v[op.b];
        break;
      case NodeKind::Pow: {
        double base = v[op.a], e = v[op.b];
        if (integer_exponent(e)) {
          if (base == 0.0 && e < 0.0)
            throw EvalError("zero base with negative exponent",
                            node_str(op.src));
          r = std::pow(base, e);
        } else {
          if (base <= 0.0)
            throw EvalError("nonpositive base with non-integer exponent",
                            node_str(op.src));
          r = std::exp(e * std::log(base));
        }
        break;
      }
      case NodeKind::Neg: r = -v[op.a]; break;
      case NodeKind::Call: {
        double x = v[op.a];
        switch (op.func) {
          case Func::Sin: r = std::sin(x); break;
          case Func::Cos: r = std::cos(x); break;
          case Func::Tan:
            if (std::cos(x) == 0.0)
              throw EvalError("tan pole", node_str(op.src));
            r = std::tan(x);
            break;
          case Func::Exp: r = std::exp(x); break;
          case Func::Log:
            if (x <= 0.0)
              throw EvalError("log of nonpositive value", node_str(op.src));
            r = std::log(x);
            break;
          case Func::Sqrt:
            if (x < 0.0)
              throw EvalError("sqrt of negative value", node_str(op.src));
            r = std::sqrt(x);
            break;
          case Func::Sinh: r = std::sinh(x); break;
          case Func::Cosh: r = std::cosh(x); break;
          case Func::Tanh: r = std::tanh(x); break;
          case Func::Abs: r = std::fabs(x); break;
          default: r = 0.0; break;
        }
        break;
      }
      default: r = 0.0; break;
    }
    if (!std::isfinite(r))
      throw EvalError("non-finite value", node_str(op.src));
    v[i] = r;
  }
  for (std::size_t i = 0; i < root_slots_.size(); ++i)
    out[i] = v[root_slots_[i]];
}

}  // namespace gravcheck
