#pragma once

// Co-design diagrams as composition expressions over component slots. The wiring
// of resource outputs to functionality inputs is carried by the series/parallel
// structure (with arrow components for fan-out and arithmetic glue); feedback
// edges appear as trace nodes. Expressions are acyclic by construction, so the
// "acyclic after removing feedback edges" invariant holds structurally, and
// solving is plain structural recursion.

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/dp.hpp"

namespace cdu {

class Diagram {
 public:
  static Diagram leaf(std::size_t component) {
    Diagram d;
    d.node_ = std::make_shared<Node>();
    d.node_->kind = Kind::Leaf;
    d.node_->leaf = component;
    return d;
  }

  static Diagram series(Diagram a, Diagram b) { return binary(Kind::Series, a, b); }
  static Diagram parallel(Diagram a, Diagram b) { return binary(Kind::Parallel, a, b); }

  static Diagram union_of(std::vector<Diagram> alts) {
    require(!alts.empty(), "diagram union: need at least one alternative");
    return nary(Kind::Union, std::move(alts));
  }

  static Diagram intersection_of(std::vector<Diagram> parts) {
    require(!parts.empty(), "diagram intersection: need at least one operand");
    return nary(Kind::Intersection, std::move(parts));
  }

  static Diagram trace(Diagram inner, std::size_t fun_loop, std::size_t res_loop,
                       TraceOptions opt = {}) {
    Diagram d;
    d.node_ = std::make_shared<Node>();
    d.node_->kind = Kind::Trace;
    d.node_->children.push_back(std::move(inner));
    d.node_->fun_loop = fun_loop;
    d.node_->res_loop = res_loop;
    d.node_->trace_opt = opt;
    return d;
  }

  // Largest referenced component slot + 1 (0 when the diagram is empty).
  std::size_t component_count() const {
    std::size_t n = 0;
    walk_max_leaf(n);
    return n;
  }

  DesignProblem solve(const std::vector<DesignProblem>& components) const {
    require(static_cast<bool>(node_), "diagram solve: empty diagram");
    switch (node_->kind) {
      case Kind::Leaf:
        require(node_->leaf < components.size(), "diagram solve: component slot out of range");
        return components[node_->leaf];
      case Kind::Series:
        return cdu::series(node_->children[0].solve(components),
                           node_->children[1].solve(components));
      case Kind::Parallel:
        return cdu::parallel(node_->children[0].solve(components),
                             node_->children[1].solve(components));
      case Kind::Union: {
        std::vector<DesignProblem> parts;
        parts.reserve(node_->children.size());
        for (const Diagram& c : node_->children) parts.push_back(c.solve(components));
        return cdu::union_of(parts);
      }
      case Kind::Intersection: {
        DesignProblem acc = node_->children[0].solve(components);
        for (std::size_t i = 1; i < node_->children.size(); ++i) {
          acc = cdu::intersection_of(acc, node_->children[i].solve(components));
        }
        return acc;
      }
      case Kind::Trace:
        return cdu::trace(node_->children[0].solve(components), node_->fun_loop, node_->res_loop,
                          node_->trace_opt);
    }
    throw contract_error("diagram solve: corrupt node");
  }

 private:
  enum class Kind { Leaf, Series, Parallel, Union, Intersection, Trace };

  struct Node {
    Kind kind = Kind::Leaf;
    std::size_t leaf = 0;
    std::vector<Diagram> children;
    std::size_t fun_loop = 0;
    std::size_t res_loop = 0;
    TraceOptions trace_opt;
  };

  static Diagram binary(Kind kind, Diagram a, Diagram b) {
    Diagram d;
    d.node_ = std::make_shared<Node>();
    d.node_->kind = kind;
    d.node_->children.push_back(std::move(a));
    d.node_->children.push_back(std::move(b));
    return d;
  }

  static Diagram nary(Kind kind, std::vector<Diagram> children) {
    Diagram d;
    d.node_ = std::make_shared<Node>();
    d.node_->kind = kind;
    d.node_->children = std::move(children);
    return d;
  }

  void walk_max_leaf(std::size_t& n) const {
    if (!node_) return;
    if (node_->kind == Kind::Leaf) {
      n = std::max(n, node_->leaf + 1);
      return;
    }
    for (const Diagram& c : node_->children) c.walk_max_leaf(n);
  }

  std::shared_ptr<Node> node_;
};

// Evaluates a diagram against its component list by structural recursion:
// series/parallel/union/intersection on the DAG, trace on feedback edges.
inline DesignProblem solve_diagram(const Diagram& d, const std::vector<DesignProblem>& components) {
  return d.solve(components);
}

}  // namespace cdu
