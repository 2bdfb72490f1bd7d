#pragma once

// Monotone design problems and their composition algebra. A DesignProblem is an
// upper set of F^op x R represented by its evaluator: for a demanded
// functionality point it returns the antichain of minimal feasible resources.
// Monotonicity (more functionality -> no cheaper resources) is a stated contract
// on evaluators; the randomized suites probe it rather than every call enforcing it.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/poset.hpp"

namespace cdu {

class DesignProblem {
 public:
  using Evaluator = std::function<Antichain(const Point&)>;

  DesignProblem() = default;
  DesignProblem(PosetRef fun, PosetRef res, Evaluator eval, std::string label = {})
      : fun_(std::move(fun)), res_(std::move(res)), eval_(std::move(eval)),
        label_(std::move(label)) {}

  const PosetRef& fun() const { return fun_; }
  const PosetRef& res() const { return res_; }
  const std::string& label() const { return label_; }

  Antichain eval(const Point& f) const {
    require(static_cast<bool>(eval_), "dp eval: empty design problem");
    require(fun_->conforms(f), "dp eval: functionality point does not conform");
    Antichain out = eval_(f);
    require(out.desc() && out.desc()->same_structure(*res_),
            "dp eval: evaluator returned antichain of the wrong poset");
    return out;
  }

  // (f, r) lies in the feasibility relation; boundary points are feasible.
  bool feasible(const Point& f, const Point& r) const { return eval(f).dominates(r); }

 private:
  PosetRef fun_;
  PosetRef res_;
  Evaluator eval_;
  std::string label_;
};

inline bool feasible(const DesignProblem& dp, const Point& f, const Point& r) {
  return dp.feasible(f, r);
}

// --- small point/descriptor helpers used by the combinators -----------------

inline Point concat_point(const PosetRef& target, const Point& a, const Point& b) {
  std::vector<double> v;
  v.reserve(a.x.size() + b.x.size());
  v.insert(v.end(), a.x.begin(), a.x.end());
  v.insert(v.end(), b.x.begin(), b.x.end());
  return target->point(std::move(v));
}

inline std::pair<Point, Point> split_point(const PosetRef& left, const PosetRef& right,
                                           const Point& p) {
  require(p.x.size() == left->dim() + right->dim(), "split_point: dimension mismatch");
  std::vector<double> a(p.x.begin(), p.x.begin() + static_cast<long>(left->dim()));
  std::vector<double> b(p.x.begin() + static_cast<long>(left->dim()), p.x.end());
  return {left->point(std::move(a)), right->point(std::move(b))};
}

inline PosetRef remove_coord(const PosetRef& p, std::size_t idx, std::string name = {}) {
  require(idx < p->dim(), "remove_coord: index out of range");
  std::vector<Coord> coords = p->coords();
  coords.erase(coords.begin() + static_cast<long>(idx));
  if (name.empty()) name = p->name() + "\\" + p->coord(idx).name;
  return Poset::make(std::move(name), std::move(coords));
}

inline Point drop_coord(const PosetRef& target, const Point& p, std::size_t idx) {
  std::vector<double> v = p.x;
  v.erase(v.begin() + static_cast<long>(idx));
  return target->point(std::move(v));
}

inline Point splice_coord(const PosetRef& target, const Point& p, std::size_t idx, double value) {
  std::vector<double> v = p.x;
  v.insert(v.begin() + static_cast<long>(idx), value);
  return target->point(std::move(v));
}

// Deterministic monotone map as a design problem: eval(f) = { fn(f) }.
inline DesignProblem arrow_dp(PosetRef fun, PosetRef res,
                              std::function<std::vector<double>(const std::vector<double>&)> fn,
                              std::string label = "arrow") {
  PosetRef r = res;
  return DesignProblem(
      std::move(fun), res,
      [r, fn = std::move(fn)](const Point& f) {
        Antichain out(r);
        out.insert(r->point(fn(f.x)));
        return out;
      },
      std::move(label));
}

inline DesignProblem identity_dp(const PosetRef& p) {
  return arrow_dp(p, p, [](const std::vector<double>& v) { return v; }, "id");
}

// --- composition operators ---------------------------------------------------

// Series: b consumes what a provides. Feasible resources are the minimal
// elements of the union over intermediate witnesses q of b's requirements.
inline DesignProblem series(const DesignProblem& a, const DesignProblem& b) {
  require(a.res()->same_structure(*b.fun()),
          "series: a's resource poset must match b's functionality poset");
  PosetRef bfun = b.fun();
  PosetRef bres = b.res();
  DesignProblem acopy = a;
  DesignProblem bcopy = b;
  return DesignProblem(
      a.fun(), bres,
      [acopy, bcopy, bfun, bres](const Point& f) {
        Antichain out(bres);
        const Antichain mid = acopy.eval(f);
        for (const Point& q : mid.points()) {
          const Antichain back = bcopy.eval(bfun->point(q.x));
          for (const Point& r : back.points()) out.insert(r);
        }
        return out;
      },
      "(" + a.label() + ";" + b.label() + ")");
}

// Parallel (monoidal product): independent subsystems side by side.
inline DesignProblem parallel(const DesignProblem& a, const DesignProblem& b) {
  PosetRef fun = Poset::product(a.fun(), b.fun());
  PosetRef res = Poset::product(a.res(), b.res());
  PosetRef afun = a.fun();
  PosetRef bfun = b.fun();
  DesignProblem acopy = a;
  DesignProblem bcopy = b;
  return DesignProblem(
      fun, res,
      [acopy, bcopy, afun, bfun, res](const Point& f) {
        auto [fa, fb] = split_point(afun, bfun, f);
        const Antichain ra = acopy.eval(fa);
        const Antichain rb = bcopy.eval(fb);
        Antichain out(res);
        for (const Point& pa : ra.points()) {
          for (const Point& pb : rb.points()) out.insert(concat_point(res, pa, pb));
        }
        return out;
      },
      "(" + a.label() + "|" + b.label() + ")");
}

// Union: free choice between alternative implementations.
inline DesignProblem union_of(const DesignProblem& a, const DesignProblem& b) {
  require(a.fun()->same_structure(*b.fun()) && a.res()->same_structure(*b.res()),
          "dp union: operands must share functionality and resource posets");
  DesignProblem acopy = a;
  DesignProblem bcopy = b;
  return DesignProblem(
      a.fun(), a.res(),
      [acopy, bcopy](const Point& f) { return union_of(acopy.eval(f), bcopy.eval(f)); },
      "(" + a.label() + "+" + b.label() + ")");
}

inline DesignProblem union_of(const std::vector<DesignProblem>& dps) {
  require(!dps.empty(), "dp union: need at least one operand");
  DesignProblem acc = dps.front();
  for (std::size_t i = 1; i < dps.size(); ++i) acc = union_of(acc, dps[i]);
  return acc;
}

// Intersection: both problems must be satisfied by the same resources.
inline DesignProblem intersection_of(const DesignProblem& a, const DesignProblem& b) {
  require(a.fun()->same_structure(*b.fun()) && a.res()->same_structure(*b.res()),
          "dp intersection: operands must share functionality and resource posets");
  DesignProblem acopy = a;
  DesignProblem bcopy = b;
  return DesignProblem(
      a.fun(), a.res(),
      [acopy, bcopy](const Point& f) { return intersection_of(acopy.eval(f), bcopy.eval(f)); },
      "(" + a.label() + "&" + b.label() + ")");
}

// Minimal resources feasible for every functionality point in fs.
inline Antichain fix_fun_min_res(const DesignProblem& dp, const std::vector<Point>& fs) {
  require(!fs.empty(), "fix_fun_min_res: need at least one functionality point");
  Antichain acc = dp.eval(fs.front());
  for (std::size_t i = 1; i < fs.size(); ++i) acc = intersection_of(acc, dp.eval(fs[i]));
  return acc;
}

// --- trace (feedback) ---------------------------------------------------------

struct TraceOptions {
  double tol = 1e-9;       // relative: |x_{k+1}-x_k| <= tol*max(1,x_k)
  int max_iter = 200;
  double ceiling = 1e9;    // declared divergence ceiling in loop units
};

// Closes the loop "provided functionality fun_loop is the required resource
// res_loop". Both looped coordinates must be increasing chains with bottom 0.
// Kleene iteration from the bottom computes the least fixpoint of the scalar
// loop map x -> min loop coordinate of eval(f, x). On convergence the returned
// resources are those feasible at their own witness: points at the fixpoint
// directly, points with a larger loop coordinate via one self-consistency check
// (this makes trace of a loop-independent problem the plain projection).
// Divergence, a breached ceiling, or running out of iterations yields the empty
// antichain; a decreasing loop map is reported as a numeric error.
inline DesignProblem trace(const DesignProblem& dp, std::size_t fun_loop, std::size_t res_loop,
                           TraceOptions opt = {}) {
  require(fun_loop < dp.fun()->dim(), "trace: fun_loop out of range");
  require(res_loop < dp.res()->dim(), "trace: res_loop out of range");
  require(dp.fun()->dir(fun_loop) == Dir::Increasing && dp.res()->dir(res_loop) == Dir::Increasing,
          "trace: looped coordinates must be increasing chains");
  PosetRef rfun = remove_coord(dp.fun(), fun_loop);
  PosetRef rres = remove_coord(dp.res(), res_loop);
  PosetRef ifun = dp.fun();
  DesignProblem inner = dp;
  return DesignProblem(
      rfun, rres,
      [inner, ifun, rres, fun_loop, res_loop, opt](const Point& f) {
        Antichain out(rres);
        auto feed = [&](double x) { return inner.eval(splice_coord(ifun, f, fun_loop, x)); };
        double x = 0.0;
        double witness = -1.0;
        Antichain at_witness;
        for (int k = 0; k < opt.max_iter; ++k) {
          const Antichain a = feed(x);
          if (a.empty()) return out;
          const double xn = a.min_coordinate(res_loop);
          if (xn > opt.ceiling) return out;
          if (xn < x - opt.tol * std::max(1.0, x)) {
            throw numeric_error("trace: non-monotone loop map (loop value decreased)");
          }
          if (std::abs(xn - x) <= opt.tol * std::max(1.0, x)) {
            witness = xn;
            at_witness = feed(xn);
            break;
          }
          x = xn;
        }
        if (witness < 0.0) return out;  // no convergence within max_iter
        const double slack = witness + 2.0 * opt.tol * std::max(1.0, witness);
        for (const Point& m : at_witness.points()) {
          const double loop_val = m.x[res_loop];
          if (loop_val <= slack) {
            out.insert(drop_coord(rres, m, res_loop));
          } else if (loop_val <= opt.ceiling) {
            // Candidate witnessed at its own (larger) loop value.
            const Antichain b = feed(loop_val);
            if (!b.empty() && b.dominates(m)) out.insert(drop_coord(rres, m, res_loop));
          }
        }
        return out;
      },
      "trace(" + dp.label() + ")");
}

}  // namespace cdu
