#pragma once

// Experiment orchestration: dispatch a RunConfig, shape results into tables,
// and write them in the requested formats. Table bytes depend only on the
// semantic config and seed — never on worker count or wall time.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cdu/common.hpp"
#include "cdu/config.hpp"
#include "cdu/diagram.hpp"
#include "cdu/dp.hpp"
#include "cdu/interval.hpp"
#include "cdu/poset.hpp"
#include "cdu/rng.hpp"
#include "cdu/table.hpp"
#include "cdu/uav.hpp"
#include "cdu/uncertainty.hpp"

namespace cdu {

namespace detail {

inline uav::Catalog load_catalog_for(const RunConfig& cfg) {
  if (cfg.catalog_path.empty()) return uav::default_catalog();
  std::ifstream in(cfg.catalog_path);
  if (!in) throw config_error("cannot open catalog file '" + cfg.catalog_path + "'");
  return uav::parse_catalog(in);
}

inline void emit_table(const ResultTable& t, const SvgChart* chart, const RunConfig& cfg,
                       const std::string& basename) {
  const std::filesystem::path dir(cfg.resolved_out_dir());
  std::filesystem::create_directories(dir);
  for (const std::string& fmt : cfg.formats) {
    if (fmt == "csv") {
      write_text_file(dir / (basename + ".csv"), to_csv(t));
    } else if (fmt == "json") {
      write_text_file(dir / (basename + ".json"), to_json(t));
    } else if (fmt == "svg") {
      if (chart != nullptr) write_text_file(dir / (basename + ".svg"), render_svg(*chart));
    }
  }
}

inline SvgSeries curve_series(const std::string& label, const std::vector<uav::CurvePoint>& curve) {
  SvgSeries s;
  s.label = label;
  for (const uav::CurvePoint& p : curve) {
    s.xs.push_back(p.payload_g);
    s.ys.push_back(p.min_cost_usd);
  }
  return s;
}

}  // namespace detail

inline ResultTable tradeoff_table(const RunConfig& cfg,
                                  const std::vector<std::pair<std::string, std::vector<uav::CurvePoint>>>& curves) {
  ResultTable t;
  t.schema_id = "cdu.tradeoff.v1";
  t.meta = {config_hash(cfg), cfg.seed, kVersion};
  t.columns = {{"payload_g", "g", ColType::Number},
               {"min_cost_usd", "usd", ColType::Number},
               {"actuator", "name", ColType::Text},
               {"battery", "name", ColType::Text},
               {"curve", "name", ColType::Text}};
  for (const auto& [label, curve] : curves) {
    for (const uav::CurvePoint& p : curve) {
      t.add_row({p.payload_g, p.min_cost_usd, p.actuator, p.battery, label});
    }
  }
  return t;
}

inline ResultTable violin_table(const RunConfig& cfg, const uav::DistributionalResult& r) {
  ResultTable t;
  t.schema_id = "cdu.violin.v1";
  t.meta = {config_hash(cfg), cfg.seed, kVersion};
  t.columns = {{"payload_g", "g", ColType::Number},
               {"sample_idx", "1", ColType::Number},
               {"cost_usd", "usd", ColType::Number}};
  for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
    for (std::size_t i = 0; i < r.cost_samples[pi].size(); ++i) {
      t.add_row({r.payloads_g[pi], static_cast<double>(i), r.cost_samples[pi][i]});
    }
  }
  return t;
}

inline ResultTable bounds_table(const RunConfig& cfg, const uav::DistributionalResult& r) {
  ResultTable t;
  t.schema_id = "cdu.bounds.v1";
  t.meta = {config_hash(cfg), cfg.seed, kVersion};
  t.columns = {{"payload_g", "g", ColType::Number},
               {"lower_cost_usd", "usd", ColType::Number},
               {"upper_cost_usd", "usd", ColType::Number},
               {"level", "1", ColType::Number},
               {"out_of_bound_frac", "1", ColType::Number}};
  for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
    t.add_row({r.payloads_g[pi], r.bound_lower_cost_usd[pi], r.bound_upper_cost_usd[pi],
               r.bound_level, r.out_of_bound_frac[pi]});
  }
  return t;
}

inline ResultTable choices_table(const RunConfig& cfg, const uav::DistributionalResult& r) {
  ResultTable t;
  t.schema_id = "cdu.choices.v1";
  t.meta = {config_hash(cfg), cfg.seed, kVersion};
  t.columns = {{"payload_g", "g", ColType::Number},
               {"actuator", "name", ColType::Text},
               {"battery", "name", ColType::Text},
               {"optimality_prob", "1", ColType::Number}};
  for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
    for (const uav::ChoiceFreq& f : r.choice_freq[pi]) {
      t.add_row({r.payloads_g[pi], f.actuator, f.battery, f.prob});
    }
  }
  return t;
}

inline ResultTable adaptive_table(const RunConfig& cfg, const uav::AdaptiveResult& r) {
  ResultTable t;
  t.schema_id = "cdu.adaptive.v1";
  t.meta = {config_hash(cfg), cfg.seed, kVersion};
  t.columns = {{"level", "name", ColType::Text},
               {"payload_g", "g", ColType::Number},
               {"sample_idx", "1", ColType::Number},
               {"cost_usd", "usd", ColType::Number}};
  for (std::size_t li = 0; li < 3; ++li) {
    for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
      for (std::size_t i = 0; i < r.samples[li][pi].size(); ++i) {
        t.add_row({r.level_names[li], r.payloads_g[pi], static_cast<double>(i),
                   r.samples[li][pi][i]});
      }
    }
  }
  return t;
}

// --- experiment drivers -----------------------------------------------------------------

inline void run_deterministic(const RunConfig& cfg) {
  const uav::Catalog cat = detail::load_catalog_for(cfg);
  const uav::DeterministicResult r =
      uav::experiment_deterministic(cat, cfg.task, cfg.uav_params());
  const ResultTable t = tradeoff_table(cfg, {{"nominal", r.curve}});
  SvgChart chart{"minimal lifetime cost vs payload", "payload [g]", "min cost [usd]",
                 {detail::curve_series("nominal", r.curve)}};
  detail::emit_table(t, &chart, cfg, "tradeoff");
}

inline void run_interval(const RunConfig& cfg) {
  const uav::Catalog cat = detail::load_catalog_for(cfg);
  const uav::IntervalResult r =
      uav::experiment_interval(cat, cfg.task, cfg.uav_params(), cfg.fraction);
  const ResultTable t = tradeoff_table(
      cfg, {{"optimistic", r.optimistic}, {"nominal", r.nominal}, {"pessimistic", r.pessimistic}});
  SvgChart chart{"interval tradeoff curves", "payload [g]", "min cost [usd]",
                 {detail::curve_series("optimistic", r.optimistic),
                  detail::curve_series("nominal", r.nominal),
                  detail::curve_series("pessimistic", r.pessimistic)}};
  detail::emit_table(t, &chart, cfg, "tradeoff");
}

inline void run_distributional(const RunConfig& cfg) {
  const uav::Catalog cat = detail::load_catalog_for(cfg);
  const uav::DistributionalResult r = uav::experiment_distributional(
      cat, cfg.task, cfg.uav_params(), cfg.calibration, cfg.rho, cfg.n, cfg.seed, cfg.workers);

  SvgSeries cloud;
  cloud.label = "cost samples";
  cloud.scatter = true;
  for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
    for (double c : r.cost_samples[pi]) {
      if (std::isfinite(c)) {
        cloud.xs.push_back(r.payloads_g[pi]);
        cloud.ys.push_back(c);
      }
    }
  }
  SvgSeries lower{"bound lower", r.payloads_g, r.bound_lower_cost_usd, false};
  SvgSeries upper{"bound upper", r.payloads_g, r.bound_upper_cost_usd, false};
  SvgChart violin_chart{"cost distribution vs payload", "payload [g]", "cost [usd]",
                        {cloud, lower, upper}};
  detail::emit_table(violin_table(cfg, r), &violin_chart, cfg, "violin");

  SvgChart bounds_chart{"probabilistic cost bounds", "payload [g]", "cost [usd]", {lower, upper}};
  detail::emit_table(bounds_table(cfg, r), &bounds_chart, cfg, "bounds");

  // One series per pair that is ever optimal, in catalog order, then "none".
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
    for (const uav::ChoiceFreq& f : r.choice_freq[pi]) {
      std::pair<std::string, std::string> key{f.actuator, f.battery};
      bool seen = false;
      for (const auto& p : pairs) {
        if (p == key) {
          seen = true;
          break;
        }
      }
      if (!seen) pairs.push_back(key);
    }
  }
  SvgChart choices_chart{"optimality probability vs payload", "payload [g]", "probability", {}};
  for (const auto& [act, bat] : pairs) {
    SvgSeries s;
    s.label = act + "/" + bat;
    for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
      double prob = 0.0;
      for (const uav::ChoiceFreq& f : r.choice_freq[pi]) {
        if (f.actuator == act && f.battery == bat) prob = f.prob;
      }
      s.xs.push_back(r.payloads_g[pi]);
      s.ys.push_back(prob);
    }
    choices_chart.series.push_back(std::move(s));
  }
  detail::emit_table(choices_table(cfg, r), &choices_chart, cfg, "choices");
}

inline void run_adaptive(const RunConfig& cfg) {
  const uav::Catalog cat = detail::load_catalog_for(cfg);
  const uav::AdaptiveResult r =
      uav::experiment_adaptive(cat, cfg.task, cfg.uav_params(), cfg.calibration, cfg.n, cfg.seed,
                               cfg.inner_n, cfg.workers);
  SvgChart chart{"mean cost by adaptivity level", "payload [g]", "mean cost [usd]", {}};
  for (std::size_t li = 0; li < 3; ++li) {
    SvgSeries s;
    s.label = r.level_names[li];
    for (std::size_t pi = 0; pi < r.payloads_g.size(); ++pi) {
      s.xs.push_back(r.payloads_g[pi]);
      s.ys.push_back(r.summary[li][pi].mean);
    }
    chart.series.push_back(std::move(s));
  }
  detail::emit_table(adaptive_table(cfg, r), &chart, cfg, "adaptive");
}

// --- selftest ---------------------------------------------------------------------------

// Fast invariant sweep: exercises the algebra, the fixpoint, both solver
// routes, interval inclusion, the sampler, and the config parser. Throws on
// the first violated invariant; exits 0 through guarded_run otherwise.
inline void run_selftest(const RunConfig& cfg) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw numeric_error(std::string("selftest: ") + what);
    std::fprintf(stderr, "selftest: %s ok\n", what);
  };

  // Antichain algebra on random 2-d points.
  {
    PosetRef p = Poset::make("selftest", {{"a", "1", Dir::Increasing}, {"b", "1", Dir::Increasing}});
    Stream st(stream_key(cfg.seed, StreamDomain::Test, 1, 0));
    bool ok = true;
    for (int it = 0; it < 200 && ok; ++it) {
      Antichain u(p), v(p);
      for (int k = 0; k < 4; ++k) {
        u.insert(p->point({st.u01() * 4, st.u01() * 4}));
        v.insert(p->point({st.u01() * 4, st.u01() * 4}));
      }
      const Antichain uv = union_of(u, v);
      const Antichain vu = union_of(v, u);
      ok = ok && uv.same_elements(vu);
      const Antichain iu = intersection_of(u, u);
      ok = ok && iu.same_elements(u);
      const Antichain uu = union_of(u, u);
      ok = ok && uu.same_elements(u);
    }
    check(ok, "antichain algebra");
  }

  const uav::Catalog cat = detail::load_catalog_for(cfg);
  const uav::TaskProfile task = cfg.task;
  const uav::UavParams params = cfg.uav_params();

  // Fixpoint residual at one mid-grid payload for every feasible pair.
  {
    bool ok = true;
    for (const auto& a : cat.actuators) {
      for (const auto& b : cat.batteries) {
        const uav::ChoiceParams cp = uav::choice_params(a, b, task, params);
        const uav::ChoiceSolution s = uav::solve_choice(cp, 1000.0);
        if (!s.feasible) continue;
        const double m_in = s.battery_mass_g;
        const uav::ChoiceSolution again = uav::solve_choice(cp, 1000.0);
        ok = ok && again.feasible && again.battery_mass_g == m_in;
      }
    }
    check(ok, "fixpoint determinism");
  }

  // Route equality: diagram solve equals the scalar solver.
  {
    bool ok = true;
    for (double payload : {0.0, 1500.0, 3000.0}) {
      const uav::CurvePoint direct = uav::min_cost_at(cat, task, params, payload);
      const DesignProblem dia =
          uav::uav_diagram(cat, uav::all_actuators(cat), uav::all_batteries(cat), task, params);
      const Antichain res = dia.eval(uav::payload_poset()->point({payload}));
      const double via = res.min_coordinate(0);
      if (std::isinf(direct.min_cost_usd)) {
        ok = ok && std::isinf(via);
      } else {
        ok = ok && std::abs(via - direct.min_cost_usd) <=
                       1e-9 * std::max(1.0, std::abs(direct.min_cost_usd));
      }
    }
    check(ok, "route equality");
  }

  // Interval inclusion: nominal curve lies within [optimistic, pessimistic].
  {
    const uav::IntervalResult r = uav::experiment_interval(cat, task, params, cfg.fraction);
    bool ok = true;
    for (std::size_t i = 0; i < r.nominal.size(); ++i) {
      ok = ok && r.optimistic[i].min_cost_usd <= r.nominal[i].min_cost_usd;
      ok = ok && r.nominal[i].min_cost_usd <= r.pessimistic[i].min_cost_usd;
    }
    check(ok, "interval inclusion");
  }

  // Sampler: deterministic streams, truncation respected.
  {
    auto space = uav::build_sample_space(cat, task, cfg.calibration);
    bool ok = space->size() == cat.actuators.size() * 2 + cat.batteries.size() * 3 + 1;
    for (std::size_t i = 0; i < 64 && ok; ++i) {
      const OmegaPoint w1 = sample_omega(*space, cfg.seed, i);
      const OmegaPoint w2 = sample_omega(*space, cfg.seed, i);
      ok = ok && w1.value == w2.value;
      for (std::size_t k = 0; k < space->size(); ++k) {
        ok = ok && w1.value[k] >= space->param(k).lower_bound;
      }
    }
    check(ok, "sampler determinism");
  }

  // Config canon: defaults round-trip, unknown keys rejected.
  {
    std::istringstream empty("");
    const RunConfig d = parse_config(empty);
    bool ok = config_hash(d) == config_hash(RunConfig{});
    std::istringstream bad("no_such_key = 1\n");
    try {
      parse_config(bad);
      ok = false;
    } catch (const config_error&) {
    }
    check(ok, "config canon");
  }
}

// Runs a validated config. Wall time goes to stderr only; it never enters
// the serialized outputs.
inline void run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  switch (cfg.experiment) {
    case Experiment::Deterministic: run_deterministic(cfg); break;
    case Experiment::Interval: run_interval(cfg); break;
    case Experiment::Distributional: run_distributional(cfg); break;
    case Experiment::Adaptive: run_adaptive(cfg); break;
    case Experiment::Selftest: run_selftest(cfg); break;
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  std::fprintf(stderr, "%s: done in %.1f ms\n", experiment_name(cfg.experiment), ms);
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

inline int guarded_run(const RunConfig& cfg) {
  try {
    run_experiment(cfg);
    return kExitOk;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}

}  // namespace cdu
