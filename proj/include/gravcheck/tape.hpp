#ifndef GRAVCHECK_TAPE_HPP
#define GRAVCHECK_TAPE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gravcheck/expr.hpp"

namespace gravcheck {

/// Straight-line evaluation program compiled from a set of scalar fields.
///
/// Compilation hash-conses the expression DAG (structural common-subexpression
/// elimination), so repeated subtrees -- ubiquitous after symbolic
/// differentiation -- are computed once per point. Evaluation is allocation-
/// free given a scratch buffer and is bit-deterministic; the same program and
/// inputs always produce the same doubles.
class Tape {
public:
  /// `symbols[i]` is bound to `inputs[i]` at evaluation time. Throws
  /// EvalError at compile time if a field references an unlisted symbol.
  Tape(std::span<const ScalarField> roots,
       const std::vector<std::string>& symbols);

  std::size_t num_inputs() const { return num_inputs_; }
  std::size_t num_roots() const { return root_slots_.size(); }
  std::size_t size() const { return ops_.size(); }  // distinct DAG nodes

  /// Evaluates all roots at one point. `scratch` is reused across calls and
  /// may be shared by nothing else; one scratch per thread.
  void evaluate(std::span<const double> inputs, std::vector<double>& scratch,
                std::span<double> out) const;

private:
  struct Op {
    NodeKind kind;
    Func func;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double value = 0.0;       // Number payload, or input index for Symbol
    const Node* src = nullptr;  // for error reporting; roots keep DAG alive
  };

  std::vector<Op> ops_;
  std::vector<std::uint32_t> root_slots_;
  std::vector<ScalarField> keep_alive_;
  std::size_t num_inputs_ = 0;
};

}  // namespace gravcheck

#endif
