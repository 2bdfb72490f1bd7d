#pragma once

// Interval (pessimistic/optimistic) design problems and parameter perturbation.
// A DPInterval brackets an unknown problem between two known ones: lower is the
// pessimistic bound (smallest feasibility relation), upper the optimistic one.
// All five composition operators preserve the bracket because they are monotone
// in the feasibility order.

#include <string>
#include <utility>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/diagram.hpp"
#include "cdu/dp.hpp"
#include "cdu/params.hpp"

namespace cdu {

struct DPInterval {
  DesignProblem lower;  // pessimistic
  DesignProblem upper;  // optimistic
};

// Spot check of the inclusion invariant on declared probe pairs: anything the
// pessimistic problem can do, the optimistic one can too.
inline bool check_interval_inclusion(const DPInterval& iv,
                                     const std::vector<std::pair<Point, Point>>& probes) {
  for (const auto& [f, r] : probes) {
    if (iv.lower.feasible(f, r) && !iv.upper.feasible(f, r)) return false;
  }
  return true;
}

inline DPInterval lift_series(const DPInterval& a, const DPInterval& b) {
  return {series(a.lower, b.lower), series(a.upper, b.upper)};
}
inline DPInterval lift_parallel(const DPInterval& a, const DPInterval& b) {
  return {parallel(a.lower, b.lower), parallel(a.upper, b.upper)};
}
inline DPInterval lift_union(const DPInterval& a, const DPInterval& b) {
  return {union_of(a.lower, b.lower), union_of(a.upper, b.upper)};
}
inline DPInterval lift_intersection(const DPInterval& a, const DPInterval& b) {
  return {intersection_of(a.lower, b.lower), intersection_of(a.upper, b.upper)};
}
inline DPInterval lift_trace(const DPInterval& a, std::size_t fun_loop, std::size_t res_loop,
                             TraceOptions opt = {}) {
  return {trace(a.lower, fun_loop, res_loop, opt), trace(a.upper, fun_loop, res_loop, opt)};
}

enum class DPOp { Series, Parallel, Union, Intersection };

inline DPInterval lift_op(DPOp op, const DPInterval& a, const DPInterval& b) {
  switch (op) {
    case DPOp::Series: return lift_series(a, b);
    case DPOp::Parallel: return lift_parallel(a, b);
    case DPOp::Union: return lift_union(a, b);
    case DPOp::Intersection: return lift_intersection(a, b);
  }
  throw contract_error("lift_op: unknown operator");
}

// Endpoint-wise diagram solve: the whole composite bracketed by composing all
// pessimistic endpoints and all optimistic endpoints.
inline DPInterval solve_interval(const Diagram& d, const std::vector<DPInterval>& components) {
  std::vector<DesignProblem> lo, hi;
  lo.reserve(components.size());
  hi.reserve(components.size());
  for (const DPInterval& c : components) {
    lo.push_back(c.lower);
    hi.push_back(c.upper);
  }
  return {solve_diagram(d, lo), solve_diagram(d, hi)};
}

// --- parameter perturbation ----------------------------------------------------

struct ParamCell {
  std::string name;
  double nominal = 0.0;
  ParamEffect effect = ParamEffect::Unspecified;
};
using ParamTable = std::vector<ParamCell>;

inline double perturb_value(double nominal, double frac, ParamEffect effect, bool pessimistic) {
  require(frac >= 0.0, "perturb: fraction must be >= 0");
  switch (effect) {
    case ParamEffect::Harmful:
      return pessimistic ? nominal * (1.0 + frac) : nominal * (1.0 - frac);
    case ParamEffect::Helpful:
      return pessimistic ? nominal * (1.0 - frac) : nominal * (1.0 + frac);
    case ParamEffect::Unspecified:
      break;
  }
  throw contract_error("perturb: parameter '" + std::string() +
                       "' has no declared monotone direction");
}

// Harmful parameters worsen pessimistically by (1+frac), helpful ones by
// (1-frac); the optimistic table is the mirror image.
inline std::pair<ParamTable, ParamTable> perturb_params(const ParamTable& nominal, double frac) {
  require(frac >= 0.0, "perturb_params: fraction must be >= 0");
  ParamTable pess = nominal, opt = nominal;
  for (std::size_t i = 0; i < nominal.size(); ++i) {
    if (nominal[i].effect == ParamEffect::Unspecified) {
      throw contract_error("perturb_params: parameter '" + nominal[i].name +
                           "' has no declared monotone direction");
    }
    pess[i].nominal = perturb_value(nominal[i].nominal, frac, nominal[i].effect, true);
    opt[i].nominal = perturb_value(nominal[i].nominal, frac, nominal[i].effect, false);
  }
  return {std::move(pess), std::move(opt)};
}

}  // namespace cdu
