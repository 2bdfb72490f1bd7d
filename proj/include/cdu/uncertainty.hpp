#pragma once

// Distributional uncertainty over design problems: random problems realized from
// a sample space, Monte Carlo feasibility/minimum queries, and inner confidence
// bounds built from per-parameter central intervals.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/diagram.hpp"
#include "cdu/dp.hpp"
#include "cdu/interval.hpp"
#include "cdu/params.hpp"
#include "cdu/rng.hpp"

namespace cdu {

// A measurable family of design problems: realize maps a joint parameter draw to
// the concrete problem. depends_on names the independence blocks actually read.
struct RandomDP {
  std::shared_ptr<const SampleSpace> space;
  std::function<DesignProblem(const OmegaPoint&)> realize;
  std::vector<std::string> depends_on;
};

namespace detail {
inline void merge_blocks(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const std::string& b : from) {
    bool seen = false;
    for (const std::string& s : into) seen = seen || s == b;
    if (!seen) into.push_back(b);
  }
}
}  // namespace detail

// Independent components composed through a diagram: one joint draw realizes
// every component, then the diagram is solved. Components must not share
// independence blocks (that would silently correlate them).
inline RandomDP compose_random(const std::vector<RandomDP>& components, const Diagram& d) {
  require(!components.empty(), "compose_random: need at least one component");
  std::shared_ptr<const SampleSpace> space = components.front().space;
  std::set<std::string> seen;
  std::vector<std::string> depends;
  for (const RandomDP& c : components) {
    require(c.space == space, "compose_random: components must share one sample space");
    for (const std::string& b : c.depends_on) {
      if (!seen.insert(b).second) {
        throw contract_error("compose_random: independence block '" + b +
                             "' used by more than one component");
      }
    }
    detail::merge_blocks(depends, c.depends_on);
  }
  std::vector<RandomDP> comps = components;
  return RandomDP{space,
                  [comps, d](const OmegaPoint& w) {
                    std::vector<DesignProblem> realized;
                    realized.reserve(comps.size());
                    for (const RandomDP& c : comps) realized.push_back(c.realize(w));
                    return solve_diagram(d, realized);
                  },
                  std::move(depends)};
}

// Wait-and-see union: for each draw, the union of the realized alternatives
// (the same draw feeds every alternative; blocks may overlap).
inline RandomDP lifted_union_random(const std::vector<RandomDP>& alternatives) {
  require(!alternatives.empty(), "lifted_union_random: need at least one alternative");
  std::shared_ptr<const SampleSpace> space = alternatives.front().space;
  std::vector<std::string> depends;
  for (const RandomDP& c : alternatives) {
    require(c.space == space, "lifted_union_random: alternatives must share one sample space");
    detail::merge_blocks(depends, c.depends_on);
  }
  std::vector<RandomDP> alts = alternatives;
  return RandomDP{space,
                  [alts](const OmegaPoint& w) {
                    std::vector<DesignProblem> realized;
                    realized.reserve(alts.size());
                    for (const RandomDP& c : alts) realized.push_back(c.realize(w));
                    return union_of(realized);
                  },
                  std::move(depends)};
}

struct ProbabilityEstimate {
  double p_hat = 0.0;
  double ci_radius = 0.0;  // 95% normal-approximation binomial half-width
  std::uint64_t n = 0;
};

// P(every probe pair is feasible) by Monte Carlo.
inline ProbabilityEstimate feasibility_probability(const RandomDP& rdp,
                                                   const std::vector<std::pair<Point, Point>>& probes,
                                                   std::uint64_t n, std::uint64_t seed) {
  require(n >= 1, "feasibility_probability: n must be >= 1");
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const DesignProblem dp = rdp.realize(sample_omega(*rdp.space, seed, i));
    bool ok = true;
    for (const auto& [f, r] : probes) {
      if (!dp.feasible(f, r)) {
        ok = false;
        break;
      }
    }
    hits += ok ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double radius = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return {p, radius, n};
}

// Per-sample minima of one designated increasing resource coordinate, the other
// coordinates left free; +inf marks infeasible draws. Sample i always uses the
// same draw regardless of the caller's loop structure (common random numbers).
inline std::vector<double> min_resource_samples(const RandomDP& rdp, const std::vector<Point>& fs,
                                                std::size_t res_coord, std::uint64_t n,
                                                std::uint64_t seed) {
  require(n >= 1, "min_resource_samples: n must be >= 1");
  std::vector<double> out(n, kInf);
  for (std::uint64_t i = 0; i < n; ++i) {
    const DesignProblem dp = rdp.realize(sample_omega(*rdp.space, seed, i));
    out[i] = fix_fun_min_res(dp, fs).min_coordinate(res_coord);
  }
  return out;
}

// --- inner confidence bounds -----------------------------------------------------

// One component whose problem is a monotone function of a few space parameters.
struct BoundedComponent {
  std::vector<std::size_t> param_indices;  // into the shared sample space
  std::function<DesignProblem(const std::vector<double>&)> build;
};

struct ComponentBound {
  DPInterval interval;
  double level = 1.0;                // probability the realization is inside
  std::vector<std::string> blocks;   // independence blocks consumed
};

// Central interval of probability rho per parameter, endpoints assigned by the
// declared direction (harmful high -> pessimistic). level = rho^K for K bounded
// scalars; a parameter without a declared monotone direction is an error.
inline ComponentBound inner_bound_rect(const SampleSpace& space, const BoundedComponent& comp,
                                       double rho) {
  require(rho > 0.0 && rho < 1.0, "inner_bound_rect: rho must lie in (0,1)");
  std::vector<double> pess, opt;
  std::vector<std::string> blocks;
  pess.reserve(comp.param_indices.size());
  opt.reserve(comp.param_indices.size());
  for (std::size_t idx : comp.param_indices) {
    const ParamSpec& p = space.param(idx);
    if (p.effect == ParamEffect::Unspecified) {
      throw contract_error("inner_bound_rect: parameter '" + p.name +
                           "' has no declared monotone direction");
    }
    const double sigma = space.sigma(idx);
    const double lo = truncated_gaussian_quantile(p.nominal, sigma, p.lower_bound, 0.5 * (1.0 - rho));
    const double hi = truncated_gaussian_quantile(p.nominal, sigma, p.lower_bound, 0.5 * (1.0 + rho));
    const bool harmful = p.effect == ParamEffect::Harmful;
    pess.push_back(harmful ? hi : lo);
    opt.push_back(harmful ? lo : hi);
    detail::merge_blocks(blocks, {p.block});
  }
  DPInterval iv{comp.build(pess), comp.build(opt)};
  const double level = std::pow(rho, static_cast<double>(comp.param_indices.size()));
  return {std::move(iv), level, std::move(blocks)};
}

// Composes per-component bounds through a diagram. Independence of the bounded
// blocks is what lets the levels multiply.
inline ComponentBound compose_inner_bounds(const std::vector<ComponentBound>& bounds,
                                           const Diagram& d) {
  require(!bounds.empty(), "compose_inner_bounds: need at least one component");
  std::set<std::string> seen;
  std::vector<std::string> blocks;
  std::vector<DPInterval> intervals;
  double level = 1.0;
  intervals.reserve(bounds.size());
  for (const ComponentBound& b : bounds) {
    for (const std::string& blk : b.blocks) {
      if (!seen.insert(blk).second) {
        throw contract_error("compose_inner_bounds: independence block '" + blk +
                             "' bounded more than once");
      }
    }
    detail::merge_blocks(blocks, b.blocks);
    intervals.push_back(b.interval);
    level *= b.level;
  }
  return {solve_interval(d, intervals), level, std::move(blocks)};
}

struct OuterBoundCheck {
  double below_lower_frac = 0.0;   // realizations that fail to contain the lower bound
  double above_upper_frac = 0.0;   // realizations strictly containing the upper bound
};

// Empirical checker for a claimed outer bound, on a declared probe grid.
// (Outer-bound construction itself is not provided here.)
inline OuterBoundCheck check_outer_bound_empirical(const RandomDP& rdp, const DPInterval& claimed,
                                                   const std::vector<std::pair<Point, Point>>& probes,
                                                   std::uint64_t n, std::uint64_t seed) {
  require(n >= 1, "check_outer_bound_empirical: n must be >= 1");
  std::uint64_t below = 0, above = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const DesignProblem dp = rdp.realize(sample_omega(*rdp.space, seed, i));
    bool contains_lower = true;
    bool contains_upper = true;
    bool exceeds_upper = false;
    for (const auto& [f, r] : probes) {
      const bool real_ok = dp.feasible(f, r);
      if (claimed.lower.feasible(f, r) && !real_ok) contains_lower = false;
      if (claimed.upper.feasible(f, r) && !real_ok) contains_upper = false;
      if (real_ok && !claimed.upper.feasible(f, r)) exceeds_upper = true;
    }
    if (!contains_lower) ++below;
    if (contains_upper && exceeds_upper) ++above;
  }
  const double dn = static_cast<double>(n);
  return {static_cast<double>(below) / dn, static_cast<double>(above) / dn};
}

}  // namespace cdu
