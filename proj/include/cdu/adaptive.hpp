#pragma once

// Multi-stage adaptive decision processes: stochastic kernels, Kleisli
// composition, deterministic MAP policies estimated by nested Monte Carlo, and
// staged processes ending in the realization of a design problem.
//
// Stream threading rule: a composed pipeline applies its primitive kernels in
// sequence; the k-th stochastic application of sample i draws from the substream
// (master seed, kernel domain, k, i). The flat counter makes Kleisli composition
// associative sample-by-sample. Observation kernels do not consume kernel
// substreams at all: they reveal world-parameter draws keyed exactly like
// sample_omega, so every process level sees the same world.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/dp.hpp"
#include "cdu/params.hpp"
#include "cdu/poset.hpp"
#include "cdu/rng.hpp"

namespace cdu {

struct KernelCtx {
  std::uint64_t seed = 0;
  std::uint64_t sample_index = 0;
  std::uint32_t stage = 0;  // flat count of stochastic kernel applications

  Stream next_stage_stream() {
    return Stream(stream_key(seed, StreamDomain::Kernel, stage++, sample_index));
  }
};

// A measurable map from input points to distributions over output points,
// represented by its sampler.
class Kernel {
 public:
  using Sampler = std::function<Point(const Point&, KernelCtx&)>;

  Kernel() = default;
  Kernel(PosetRef in, PosetRef out, Sampler fn)
      : in_(std::move(in)), out_(std::move(out)), fn_(std::move(fn)) {}

  const PosetRef& in() const { return in_; }
  const PosetRef& out() const { return out_; }

  Point sample(const Point& x, KernelCtx& ctx) const {
    require(static_cast<bool>(fn_), "kernel sample: empty kernel");
    require(in_->conforms(x), "kernel sample: input does not conform");
    Point y = fn_(x, ctx);
    require(out_->conforms(y), "kernel sample: output does not conform");
    return y;
  }

  static Kernel deterministic(PosetRef in, PosetRef out,
                              std::function<std::vector<double>(const std::vector<double>&)> fn) {
    PosetRef o = out;
    return Kernel(std::move(in), out,
                  [o, fn = std::move(fn)](const Point& x, KernelCtx&) { return o->point(fn(x.x)); });
  }

  // A kernel that actually randomizes; it consumes the next pipeline substream.
  static Kernel stochastic(PosetRef in, PosetRef out,
                           std::function<Point(const Point&, Stream&)> fn) {
    return Kernel(std::move(in), std::move(out),
                  [fn = std::move(fn)](const Point& x, KernelCtx& ctx) {
                    Stream s = ctx.next_stage_stream();
                    return fn(x, s);
                  });
  }

 private:
  PosetRef in_;
  PosetRef out_;
  Sampler fn_;
};

// a then b, sampler chaining through the shared context.
inline Kernel kleisli_compose(const Kernel& a, const Kernel& b) {
  require(a.out()->same_structure(*b.in()),
          "kleisli_compose: a's output poset must match b's input poset");
  Kernel acopy = a, bcopy = b;
  return Kernel(a.in(), b.out(), [acopy, bcopy](const Point& x, KernelCtx& ctx) {
    return bcopy.sample(acopy.sample(x, ctx), ctx);
  });
}

// model after a deterministic change of input variables.
inline Kernel reparameterize(const Kernel& model, const Kernel& f) {
  return kleisli_compose(f, model);
}

// One item revealed by an observation kernel: either a constant specification
// entry or a world parameter of the sample space.
struct ObsItem {
  bool is_param = false;
  std::size_t param = 0;
  double constant = 0.0;

  static ObsItem param_index(std::size_t i) { return {true, i, 0.0}; }
  static ObsItem fixed(double v) { return {false, 0, v}; }
};

// Appends the component's realized specification to the staged point. Parameter
// items are keyed by (ctx.seed, parameter, sample) - the sample_omega keys - so
// observations are consistent across levels and with the benchmark draws.
inline Kernel observe_component(PosetRef in, PosetRef out,
                                std::shared_ptr<const SampleSpace> space,
                                std::vector<ObsItem> items) {
  require(in->dim() + items.size() == out->dim(),
          "observe_component: output poset must extend the input by the observed items");
  for (const ObsItem& it : items) {
    require(!it.is_param || it.param < space->size(), "observe_component: unknown parameter");
  }
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, space = std::move(space), items = std::move(items)](const Point& x,
                                                                        KernelCtx& ctx) {
                  std::vector<double> v = x.x;
                  v.reserve(v.size() + items.size());
                  for (const ObsItem& it : items) {
                    v.push_back(it.is_param
                                    ? space->sample_param(it.param, ctx.seed, ctx.sample_index)
                                    : it.constant);
                  }
                  return o->point(std::move(v));
                });
}

// A deterministic decision rule over an observation space.
struct Policy {
  PosetRef obs;
  std::size_t n_choices = 0;
  std::function<std::size_t(const Point&)> decide;
};

// MAP policy by nested Monte Carlo: for an observation, pick the candidate most
// likely to attain the minimal cost over inner_n conditional samples of the
// remaining uncertainty; ties go to the lower mean cost, then to catalog order.
// conditional_cost(c, obs, j) must derive its own draws from keys independent of
// the outer sample (PolicyInner domain), which is what makes the returned policy
// a total deterministic function of the observation. Decisions are memoized per
// observed point (policies that condition on a coarse observation are evaluated
// once per distinct value, not once per outer sample).
inline Policy estimate_map_policy(PosetRef obs, std::size_t n_candidates,
                                  std::function<double(std::size_t, const Point&, std::uint64_t)>
                                      conditional_cost,
                                  int inner_n = 200) {
  require(n_candidates >= 1, "estimate_map_policy: need at least one candidate");
  require(inner_n >= 1, "estimate_map_policy: inner_n must be >= 1");
  auto estimate = [n_candidates, conditional_cost = std::move(conditional_cost),
                   inner_n](const Point& o) {
    std::vector<std::uint64_t> wins(n_candidates, 0);
    std::vector<double> total(n_candidates, 0.0);
    std::vector<double> cost(n_candidates, 0.0);
    for (int j = 0; j < inner_n; ++j) {
      double best = kInf;
      for (std::size_t c = 0; c < n_candidates; ++c) {
        cost[c] = conditional_cost(c, o, static_cast<std::uint64_t>(j));
        best = std::min(best, cost[c]);
        total[c] += cost[c];
      }
      for (std::size_t c = 0; c < n_candidates; ++c) {
        if (cost[c] == best) ++wins[c];
      }
    }
    std::size_t pick = 0;
    for (std::size_t c = 1; c < n_candidates; ++c) {
      if (wins[c] > wins[pick] || (wins[c] == wins[pick] && total[c] < total[pick])) {
        pick = c;
      }
    }
    return pick;
  };
  struct Cache {
    std::mutex mu;
    std::map<std::vector<double>, std::size_t> seen;
  };
  auto cache = std::make_shared<Cache>();
  return Policy{obs, n_candidates, [estimate = std::move(estimate), cache](const Point& o) {
                  {
                    std::lock_guard<std::mutex> lock(cache->mu);
                    auto it = cache->seen.find(o.x);
                    if (it != cache->seen.end()) return it->second;
                  }
                  const std::size_t pick = estimate(o);
                  std::lock_guard<std::mutex> lock(cache->mu);
                  return cache->seen.emplace(o.x, pick).first->second;
                }};
}

// An ordered pipeline of kernels ending in a realization stage. observe maps the
// realized problem and the original input to the scalar outcome of interest.
struct StagedProcess {
  std::string name;
  PosetRef input;
  std::vector<Kernel> stages;
  std::function<DesignProblem(const Point&)> realize;
  std::function<double(const DesignProblem&, const Point&)> observe;

  void validate() const {
    require(static_cast<bool>(realize), "staged process: missing realization stage");
    require(static_cast<bool>(observe), "staged process: missing observation");
    const Poset* cur = input.get();
    for (const Kernel& k : stages) {
      require(cur->same_structure(*k.in()), "staged process: stage posets do not compose");
      cur = k.out().get();
    }
  }
};

struct RunSummary {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::uint64_t n = 0;
};

inline RunSummary summarize(const std::vector<double>& xs) {
  RunSummary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1 && std::isfinite(s.mean)) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (static_cast<double>(xs.size()) * (static_cast<double>(xs.size()) - 1.0)));
  }
  return s;
}

struct ProcessRun {
  std::vector<std::vector<double>> samples;  // [input][sample]
  std::vector<RunSummary> summary;           // per input
};

// Executes the process n times per input point. Sample i of any input uses
// KernelCtx{seed, i}; nothing depends on the input's position in the list or on
// how the loop is chunked across workers.
inline ProcessRun run_process(const StagedProcess& p, const std::vector<Point>& inputs,
                              std::uint64_t n, std::uint64_t seed, unsigned workers = 1) {
  p.validate();
  require(n >= 1, "run_process: n must be >= 1");
  ProcessRun out;
  out.samples.assign(inputs.size(), std::vector<double>(n, kInf));
  for (std::size_t pi = 0; pi < inputs.size(); ++pi) {
    const Point& input = inputs[pi];
    auto& row = out.samples[pi];
    parallel_for(n, workers, [&](std::size_t i) {
      KernelCtx ctx{seed, static_cast<std::uint64_t>(i), 0};
      Point x = input;
      for (const Kernel& k : p.stages) x = k.sample(x, ctx);
      row[i] = p.observe(p.realize(x), input);
    });
  }
  out.summary.reserve(inputs.size());
  for (const auto& row : out.samples) out.summary.push_back(summarize(row));
  return out;
}

}  // namespace cdu
