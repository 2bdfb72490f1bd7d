#pragma once

// Task-driven UAV sizing benchmark: component catalog, closed-form component
// models, the composed system problem (battery-mass feedback closed by trace),
// and the four experiments built on it.
//
// Two routes compute the same system. The diagram route composes antichain
// evaluators through series/parallel/trace/union and is the definitional
// semantics. solve_choice is a scalar mirror of one traced alternative, written
// so that both routes execute the same floating-point operations in the same
// order; the hot Monte Carlo loops run on it. Tests pin the routes together.

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cdu/adaptive.hpp"
#include "cdu/common.hpp"
#include "cdu/diagram.hpp"
#include "cdu/dp.hpp"
#include "cdu/interval.hpp"
#include "cdu/params.hpp"
#include "cdu/poset.hpp"
#include "cdu/uncertainty.hpp"

namespace cdu::uav {

// --- catalog ---------------------------------------------------------------------

struct ActuatorModel {
  std::string name;
  double mass_g = 0.0;
  double cost_usd = 0.0;
  double v_max_mps = 0.0;
  double p0_w = 0.0;         // idle power
  double p1_w_per_n2 = 0.0;  // power per squared lift
};

struct BatteryTech {
  std::string name;
  double energy_density_wh_per_kg = 0.0;
  double energy_per_cost_wh_per_usd = 0.0;
  double cycle_life = 0.0;
};

struct Catalog {
  std::vector<ActuatorModel> actuators;
  std::vector<BatteryTech> batteries;

  std::size_t n_pairs() const { return actuators.size() * batteries.size(); }
};

inline Catalog default_catalog() {
  Catalog c;
  c.actuators = {
      {"a1", 50.0, 50.0, 3.0, 1.0, 2.0},
      {"a2", 100.0, 100.0, 3.0, 2.0, 1.5},
      {"a3", 150.0, 150.0, 3.0, 3.0, 1.5},
  };
  c.batteries = {
      {"NiMH", 100.0, 3.41, 500.0}, {"NiH2", 45.0, 10.50, 20000.0},
      {"LCO", 195.0, 2.84, 750.0},  {"LMO", 150.0, 2.84, 500.0},
      {"NiCad", 30.0, 7.50, 500.0}, {"SLA", 30.0, 7.00, 500.0},
      {"LiPo", 150.0, 2.50, 600.0}, {"LFP", 90.0, 1.50, 1500.0},
  };
  return c;
}

// Whitespace-separated rows: "actuator <name> <mass_g> <cost_usd> <v_max_mps>
// <p0_w> <p1_w_per_n2>" and "battery <name> <wh_per_kg> <wh_per_usd> <cycles>".
// '#' starts a comment.
inline Catalog parse_catalog(std::istream& in) {
  Catalog c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string kind;
    if (!(row >> kind)) continue;
    auto fail = [lineno](const std::string& what) {
      throw config_error("catalog line " + std::to_string(lineno) + ": " + what);
    };
    if (kind == "actuator") {
      ActuatorModel a;
      if (!(row >> a.name >> a.mass_g >> a.cost_usd >> a.v_max_mps >> a.p0_w >> a.p1_w_per_n2)) {
        fail("expected: actuator <name> <mass_g> <cost_usd> <v_max_mps> <p0_w> <p1_w_per_n2>");
      }
      if (a.mass_g <= 0 || a.cost_usd <= 0 || a.v_max_mps <= 0 || a.p0_w <= 0 ||
          a.p1_w_per_n2 <= 0) {
        fail("actuator parameters must be positive");
      }
      c.actuators.push_back(std::move(a));
    } else if (kind == "battery") {
      BatteryTech b;
      if (!(row >> b.name >> b.energy_density_wh_per_kg >> b.energy_per_cost_wh_per_usd >>
            b.cycle_life)) {
        fail("expected: battery <name> <wh_per_kg> <wh_per_usd> <cycles>");
      }
      if (b.energy_density_wh_per_kg <= 0 || b.energy_per_cost_wh_per_usd <= 0 ||
          b.cycle_life <= 0) {
        fail("battery parameters must be positive");
      }
      c.batteries.push_back(std::move(b));
    } else {
      fail("unknown row kind '" + kind + "' (expected 'actuator' or 'battery')");
    }
  }
  if (c.actuators.empty() || c.batteries.empty()) {
    throw config_error("catalog: need at least one actuator and one battery");
  }
  return c;
}

inline std::vector<std::size_t> all_actuators(const Catalog& c) {
  std::vector<std::size_t> v(c.actuators.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}
inline std::vector<std::size_t> all_batteries(const Catalog& c) {
  std::vector<std::size_t> v(c.batteries.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// --- task profile and shared parameters --------------------------------------------

struct TaskProfile {
  double num_missions = 1000.0;
  double distance_m = 1000.0;
  double mission_frequency_per_day = 1.0;  // recorded but unused by the cost model
};

inline std::vector<double> default_payload_grid() {
  std::vector<double> g(8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = 3000.0 * static_cast<double>(i) / 7.0;
  }
  return g;
}

struct UavParams {
  double gravity_m_per_s2 = 9.81;
  double frame_mass_g = 0.0;
  double perception_c0_w = 5.0;
  double perception_c1_w_per_mps = 2.0;
  double cruise_velocity_mps = 3.0;  // demanded exactly of the actuator
  std::vector<double> payload_grid_g = default_payload_grid();
  TraceOptions trace;
};

// --- scalar per-alternative solver ---------------------------------------------------

struct ChoiceParams {
  // actuator
  double act_mass_g = 0.0;
  double act_cost_usd = 0.0;
  double v_max_mps = 0.0;
  double p0_w = 0.0;
  double p1_w_per_n2 = 0.0;
  // battery
  double rho_e_wh_per_kg = 1.0;
  double alpha_wh_per_usd = 1.0;
  double cycles = 1.0;
  // task (missions already integral)
  double missions = 0.0;
  double distance_m = 0.0;
  // shared
  double velocity_mps = 0.0;
  double gravity_m_per_s2 = 9.81;
  double frame_mass_g = 0.0;
  double c0_w = 0.0;
  double c1_w_per_mps = 0.0;
  TraceOptions trace;
};

struct ChoiceSolution {
  bool feasible = false;
  double cost_usd = kInf;       // lifetime: actuator + battery replacements
  double self_weight_g = kInf;  // actuator + battery + frame
  double battery_mass_g = 0.0;
  double capacity_wh = 0.0;
  double power_w = 0.0;
  int iterations = 0;  // loop-map evaluations, including the one at the witness
};

inline ChoiceParams choice_params(const ActuatorModel& a, const BatteryTech& b,
                                  const TaskProfile& t, const UavParams& u) {
  ChoiceParams cp;
  cp.act_mass_g = a.mass_g;
  cp.act_cost_usd = a.cost_usd;
  cp.v_max_mps = a.v_max_mps;
  cp.p0_w = a.p0_w;
  cp.p1_w_per_n2 = a.p1_w_per_n2;
  cp.rho_e_wh_per_kg = b.energy_density_wh_per_kg;
  cp.alpha_wh_per_usd = b.energy_per_cost_wh_per_usd;
  cp.cycles = b.cycle_life;
  cp.missions = t.num_missions;
  cp.distance_m = t.distance_m;
  cp.velocity_mps = u.cruise_velocity_mps;
  cp.gravity_m_per_s2 = u.gravity_m_per_s2;
  cp.frame_mass_g = u.frame_mass_g;
  cp.c0_w = u.perception_c0_w;
  cp.c1_w_per_mps = u.perception_c1_w_per_mps;
  cp.trace = u.trace;
  return cp;
}

// One actuator/battery alternative at one payload: Kleene iteration on the
// battery-mass loop from the bottom, then one evaluation at the witness.
// Exhausting max_iter counts as infeasible, exactly as trace does.
inline ChoiceSolution solve_choice(const ChoiceParams& cp, double payload_g) {
  ChoiceSolution sol;
  if (cp.velocity_mps > cp.v_max_mps) return sol;  // velocity demand unmet
  const double endurance_s = cp.distance_m / cp.velocity_mps;
  const double p_per_w = cp.c0_w + cp.c1_w_per_mps * cp.velocity_mps;
  double capacity_wh = 0.0;
  double power_w = 0.0;
  auto loop_map = [&](double m_fed_g) {
    const double mass_g = ((payload_g + cp.frame_mass_g) + cp.act_mass_g) + m_fed_g;
    const double lift_n = cp.gravity_m_per_s2 * mass_g / 1000.0;
    const double p_act_w = cp.p0_w + cp.p1_w_per_n2 * (lift_n * lift_n);
    power_w = p_act_w + p_per_w;
    capacity_wh = (power_w * endurance_s) / 3600.0;
    return (capacity_wh / cp.rho_e_wh_per_kg) * 1000.0;
  };
  double x = 0.0;
  bool converged = false;
  int used = 0;
  for (int k = 0; k < cp.trace.max_iter; ++k) {
    const double x1 = loop_map(x);
    ++used;
    if (x1 > cp.trace.ceiling) return sol;
    if (x1 < x - cp.trace.tol * std::max(1.0, x)) {
      throw numeric_error("uav weight loop: non-monotone loop map");
    }
    if (std::abs(x1 - x) <= cp.trace.tol * std::max(1.0, x)) {
      x = x1;
      converged = true;
      break;
    }
    x = x1;
  }
  if (!converged) return sol;
  const double m_final_g = loop_map(x);  // evaluation at the witness
  ++used;
  const double replacements = std::ceil(cp.missions / cp.cycles);
  const double battery_cost_usd = (capacity_wh / cp.alpha_wh_per_usd) * replacements;
  sol.feasible = true;
  sol.iterations = used;
  sol.battery_mass_g = m_final_g;
  sol.capacity_wh = capacity_wh;
  sol.power_w = power_w;
  sol.cost_usd = cp.act_cost_usd + battery_cost_usd;
  sol.self_weight_g = (cp.act_mass_g + m_final_g) + cp.frame_mass_g;
  return sol;
}

// --- component design problems -------------------------------------------------------

inline PosetRef actuator_fun_poset() {
  return Poset::make("act_fun", {{"velocity", "m/s", Dir::Increasing},
                                 {"lift", "N", Dir::Increasing}});
}
inline PosetRef actuator_res_poset() {
  return Poset::make("act_res", {{"power", "W", Dir::Increasing},
                                 {"cost", "usd", Dir::Increasing},
                                 {"mass", "g", Dir::Increasing}});
}

// eval(v, F) = {(p0 + p1 F^2, cost, mass)} when v <= v_max, else empty.
inline DesignProblem actuator_dp(const ActuatorModel& a) {
  PosetRef res = actuator_res_poset();
  return DesignProblem(
      actuator_fun_poset(), res,
      [a, res](const Point& f) {
        Antichain out(res);
        const double v = f.x[0], lift = f.x[1];
        if (v > a.v_max_mps) return out;
        out.insert(res->point({a.p0_w + a.p1_w_per_n2 * (lift * lift), a.cost_usd, a.mass_g}));
        return out;
      },
      "act:" + a.name);
}

inline PosetRef battery_fun_poset() {
  return Poset::make("bat_fun", {{"capacity", "Wh", Dir::Increasing},
                                 {"missions", "count", Dir::Increasing}});
}
inline PosetRef battery_res_poset() {
  return Poset::make("bat_res", {{"mass", "g", Dir::Increasing},
                                 {"cost", "usd", Dir::Increasing}});
}

// eval(C, N) = {(C/rho_e in grams, (C/alpha) * ceil(N / cycles))}.
inline DesignProblem battery_dp(const BatteryTech& b) {
  PosetRef res = battery_res_poset();
  return DesignProblem(
      battery_fun_poset(), res,
      [b, res](const Point& f) {
        const double capacity_wh = f.x[0], missions = f.x[1];
        Antichain out(res);
        out.insert(res->point({(capacity_wh / b.energy_density_wh_per_kg) * 1000.0,
                               (capacity_wh / b.energy_per_cost_wh_per_usd) *
                                   std::ceil(missions / b.cycle_life)}));
        return out;
      },
      "bat:" + b.name);
}

// eval(v) = {c0 + c1 v}.
inline DesignProblem perception_dp(double c0_w, double c1_w_per_mps) {
  PosetRef fun = Poset::make("per_fun", {{"velocity", "m/s", Dir::Increasing}});
  PosetRef res = Poset::make("per_res", {{"power", "W", Dir::Increasing}});
  return DesignProblem(
      fun, res,
      [c0_w, c1_w_per_mps, res](const Point& f) {
        Antichain out(res);
        out.insert(res->point({c0_w + c1_w_per_mps * f.x[0]}));
        return out;
      },
      "perception");
}

// Task profile to intermediate requirements: (missions, distance) ->
// (missions, endurance = distance / cruise velocity, cruise velocity).
inline DesignProblem task_management_dp(double cruise_velocity_mps) {
  PosetRef fun = Poset::make("task_fun", {{"missions", "count", Dir::Increasing},
                                          {"distance", "m", Dir::Increasing}});
  PosetRef res = Poset::make("task_res", {{"missions", "count", Dir::Increasing},
                                          {"endurance", "s", Dir::Increasing},
                                          {"velocity", "m/s", Dir::Increasing}});
  return DesignProblem(
      fun, res,
      [cruise_velocity_mps, res](const Point& f) {
        Antichain out(res);
        out.insert(res->point({f.x[0], f.x[1] / cruise_velocity_mps, cruise_velocity_mps}));
        return out;
      },
      "task_mgmt");
}

// --- system posets -----------------------------------------------------------------

inline PosetRef payload_poset() {
  return Poset::make("uav_fun", {{"payload", "g", Dir::Increasing}});
}
inline PosetRef system_res_poset() {
  return Poset::make("uav_res", {{"lifetime_cost", "usd", Dir::Increasing},
                                 {"self_weight", "g", Dir::Increasing}});
}

// --- sample space -------------------------------------------------------------------

// Parameter layout: missions first, then (rho_e, alpha, cycles) per battery in
// catalog order, then (p0, p1) per actuator. Actuator mass, cost, and v_max are
// treated as deterministic specification entries.
inline std::size_t missions_param_index() { return 0; }
inline std::size_t battery_param_index(std::size_t bat, std::size_t which) {
  return 1 + bat * 3 + which;  // which: 0 rho_e, 1 alpha, 2 cycles
}
inline std::size_t actuator_param_index(const Catalog& cat, std::size_t act, std::size_t which) {
  return 1 + cat.batteries.size() * 3 + act * 2 + which;  // which: 0 p0, 1 p1
}

inline std::shared_ptr<const SampleSpace> build_sample_space(const Catalog& cat,
                                                             const TaskProfile& task,
                                                             const Calibration& calib) {
  auto space = std::make_shared<SampleSpace>();
  space->add({"task.missions", "count", task.num_missions, calib, 0.0, ParamEffect::Harmful,
              "task"});
  for (const BatteryTech& b : cat.batteries) {
    space->add({"bat." + b.name + ".rho_e", "Wh/kg", b.energy_density_wh_per_kg, calib, 0.0,
                ParamEffect::Helpful, "bat:" + b.name});
    space->add({"bat." + b.name + ".alpha", "Wh/usd", b.energy_per_cost_wh_per_usd, calib, 0.0,
                ParamEffect::Helpful, "bat:" + b.name});
    space->add({"bat." + b.name + ".cycles", "count", b.cycle_life, calib, 0.0,
                ParamEffect::Helpful, "bat:" + b.name});
  }
  for (const ActuatorModel& a : cat.actuators) {
    space->add({"act." + a.name + ".p0", "W", a.p0_w, calib, 0.0, ParamEffect::Harmful,
                "act:" + a.name});
    space->add({"act." + a.name + ".p1", "W/N^2", a.p1_w_per_n2, calib, 0.0, ParamEffect::Harmful,
                "act:" + a.name});
  }
  return space;
}

// Mission-count draws are rounded up to whole missions.
inline double missions_from_draw(double raw) { return std::ceil(raw); }

// Realized per-alternative parameters under one joint draw.
inline ChoiceParams choice_params_from_draw(const Catalog& cat, std::size_t a, std::size_t b,
                                            const std::vector<double>& w, const TaskProfile& task,
                                            const UavParams& u) {
  ChoiceParams cp = choice_params(cat.actuators[a], cat.batteries[b], task, u);
  cp.p0_w = w[actuator_param_index(cat, a, 0)];
  cp.p1_w_per_n2 = w[actuator_param_index(cat, a, 1)];
  cp.rho_e_wh_per_kg = w[battery_param_index(b, 0)];
  cp.alpha_wh_per_usd = w[battery_param_index(b, 1)];
  cp.cycles = w[battery_param_index(b, 2)];
  cp.missions = missions_from_draw(w[missions_param_index()]);
  return cp;
}

// --- the composed system, diagram route ------------------------------------------------

// The system composition as an expression over explicit component slots, plus
// aligned random and bounded views of the same slots. Slot 0 is the task source
// (the only place the mission count enters the diagram).
struct UavSystem {
  Diagram diagram;
  std::vector<DesignProblem> components;        // deterministic instantiation
  std::vector<RandomDP> random_components;      // aligned; empty when no space given
  std::vector<ComponentBound> bound_templates;  // aligned degenerate bounds at level 1
  std::vector<std::size_t> bounded_slots;       // slots with genuine parameter bounds
  std::vector<BoundedComponent> bounded_builders;  // aligned with bounded_slots
  std::shared_ptr<const SampleSpace> space;     // null when deterministic-only
};

namespace detail {

struct SlotRegistry {
  std::vector<DesignProblem> dets;
  std::vector<RandomDP> rands;
  std::vector<ComponentBound> bounds;
  std::shared_ptr<const SampleSpace> space;

  std::size_t add_const(const DesignProblem& dp) {
    dets.push_back(dp);
    if (space) {
      rands.push_back(RandomDP{space, [dp](const OmegaPoint&) { return dp; }, {}});
      bounds.push_back(ComponentBound{{dp, dp}, 1.0, {}});
    }
    return dets.size() - 1;
  }
};

}  // namespace detail

// Builds the composed system over the selected alternatives. When space is
// non-null, the aligned RandomDP slots and the per-component bound builders are
// filled in as well.
inline UavSystem build_uav_system(const Catalog& cat, const std::vector<std::size_t>& act_sel,
                                  const std::vector<std::size_t>& bat_sel, const TaskProfile& task,
                                  const UavParams& params,
                                  std::shared_ptr<const SampleSpace> space = nullptr) {
  require(!act_sel.empty() && !bat_sel.empty(), "uav system: empty alternative selection");
  detail::SlotRegistry reg;
  reg.space = space;
  UavSystem out;
  out.space = space;

  PosetRef p_payload = payload_poset();
  PosetRef p_src = Poset::make("src_res", {{"payload", "g", Dir::Increasing},
                                           {"missions", "count", Dir::Increasing},
                                           {"distance", "m", Dir::Increasing}});

  // Slot 0: task source. Injects the demanded mission count and distance next
  // to the payload; under uncertainty the mission count is the realized draw.
  const double dist = task.distance_m;
  auto make_source = [p_payload, p_src, dist](double n) {
    return arrow_dp(
        p_payload, p_src,
        [n, dist](const std::vector<double>& v) {
          return std::vector<double>{v[0], n, dist};
        },
        "task_source");
  };
  const DesignProblem source = make_source(task.num_missions);
  reg.dets.push_back(source);
  if (space) {
    const std::size_t mi = missions_param_index();
    reg.rands.push_back(RandomDP{space,
                                 [make_source, mi](const OmegaPoint& w) {
                                   return make_source(missions_from_draw(w.value[mi]));
                                 },
                                 {"task"}});
    // The mission count is excluded from the bound rectangle; both endpoints
    // keep the nominal source.
    reg.bounds.push_back(ComponentBound{{source, source}, 1.0, {}});
  }

  const std::size_t slot_task = reg.add_const(task_management_dp(params.cruise_velocity_mps));
  const std::size_t slot_id_payload = reg.add_const(identity_dp(p_payload));
  const std::size_t slot_perception =
      reg.add_const(perception_dp(params.perception_c0_w, params.perception_c1_w_per_mps));

  PosetRef p_nt = Poset::make("nt", {{"missions", "count", Dir::Increasing},
                                     {"endurance", "s", Dir::Increasing}});
  PosetRef p_cw = Poset::make("cw", {{"cost", "usd", Dir::Increasing},
                                     {"mass", "g", Dir::Increasing}});
  const std::size_t slot_id_nt = reg.add_const(identity_dp(p_nt));
  const std::size_t slot_id_cw = reg.add_const(identity_dp(p_cw));

  // Energy glue: (P_act, cost_act, mass_act, P_per, N, T) -> (capacity, N, cost_act, mass_act).
  PosetRef p_b_in = Poset::make("b_in", {{"p_act", "W", Dir::Increasing},
                                         {"cost", "usd", Dir::Increasing},
                                         {"mass", "g", Dir::Increasing},
                                         {"p_per", "W", Dir::Increasing},
                                         {"missions", "count", Dir::Increasing},
                                         {"endurance", "s", Dir::Increasing}});
  PosetRef p_b_out = Poset::make("b_out", {{"capacity", "Wh", Dir::Increasing},
                                           {"missions", "count", Dir::Increasing},
                                           {"cost", "usd", Dir::Increasing},
                                           {"mass", "g", Dir::Increasing}});
  const std::size_t slot_energy = reg.add_const(arrow_dp(
      p_b_in, p_b_out,
      [](const std::vector<double>& v) {
        return std::vector<double>{((v[0] + v[3]) * v[5]) / 3600.0, v[4], v[1], v[2]};
      },
      "energy"));

  // Totals glue: (m_bat, cost_bat, cost_act, mass_act) -> (cost, self weight, loop out).
  PosetRef p_c_in = Poset::make("c_in", {{"m_bat", "g", Dir::Increasing},
                                         {"cost_bat", "usd", Dir::Increasing},
                                         {"cost_act", "usd", Dir::Increasing},
                                         {"mass_act", "g", Dir::Increasing}});
  PosetRef p_c_out = Poset::make("c_out", {{"lifetime_cost", "usd", Dir::Increasing},
                                           {"self_weight", "g", Dir::Increasing},
                                           {"m_loop", "g", Dir::Increasing}});
  const double frame = params.frame_mass_g;
  const std::size_t slot_totals = reg.add_const(arrow_dp(
      p_c_in, p_c_out,
      [frame](const std::vector<double>& v) {
        return std::vector<double>{v[2] + v[1], (v[3] + v[0]) + frame, v[0]};
      },
      "totals"));

  // Catalog leaves, one slot per selected entry.
  std::vector<std::size_t> act_slots(cat.actuators.size(), 0);
  std::vector<std::size_t> bat_slots(cat.batteries.size(), 0);
  for (std::size_t ai : act_sel) {
    require(ai < cat.actuators.size(), "uav system: actuator index out of range");
    const ActuatorModel a = cat.actuators[ai];
    act_slots[ai] = reg.dets.size();
    reg.dets.push_back(actuator_dp(a));
    if (space) {
      const std::size_t i0 = actuator_param_index(cat, ai, 0);
      const std::size_t i1 = actuator_param_index(cat, ai, 1);
      auto build = [a](const std::vector<double>& p) {
        ActuatorModel r = a;
        r.p0_w = p[0];
        r.p1_w_per_n2 = p[1];
        return actuator_dp(r);
      };
      reg.rands.push_back(RandomDP{space,
                                   [build, i0, i1](const OmegaPoint& w) {
                                     return build({w.value[i0], w.value[i1]});
                                   },
                                   {"act:" + a.name}});
      reg.bounds.push_back(ComponentBound{{reg.dets.back(), reg.dets.back()}, 1.0, {}});
      out.bounded_slots.push_back(act_slots[ai]);
      out.bounded_builders.push_back(BoundedComponent{{i0, i1}, build});
    }
  }
  for (std::size_t bi : bat_sel) {
    require(bi < cat.batteries.size(), "uav system: battery index out of range");
    const BatteryTech b = cat.batteries[bi];
    bat_slots[bi] = reg.dets.size();
    reg.dets.push_back(battery_dp(b));
    if (space) {
      const std::size_t j0 = battery_param_index(bi, 0);
      const std::size_t j1 = battery_param_index(bi, 1);
      const std::size_t j2 = battery_param_index(bi, 2);
      auto build = [b](const std::vector<double>& p) {
        BatteryTech r = b;
        r.energy_density_wh_per_kg = p[0];
        r.energy_per_cost_wh_per_usd = p[1];
        r.cycle_life = p[2];
        return battery_dp(r);
      };
      reg.rands.push_back(RandomDP{space,
                                   [build, j0, j1, j2](const OmegaPoint& w) {
                                     return build({w.value[j0], w.value[j1], w.value[j2]});
                                   },
                                   {"bat:" + b.name}});
      reg.bounds.push_back(ComponentBound{{reg.dets.back(), reg.dets.back()}, 1.0, {}});
      out.bounded_slots.push_back(bat_slots[bi]);
      out.bounded_builders.push_back(BoundedComponent{{j0, j1, j2}, build});
    }
  }

  // Lift glue, one slot per selected actuator (depends on its mass):
  // (payload, N, T, v, m_fed) -> (v, lift, v, N, T).
  PosetRef p_a_in = Poset::make("a_in", {{"payload", "g", Dir::Increasing},
                                         {"missions", "count", Dir::Increasing},
                                         {"endurance", "s", Dir::Increasing},
                                         {"velocity", "m/s", Dir::Increasing},
                                         {"m_fed", "g", Dir::Increasing}});
  PosetRef p_a_out = Poset::make("a_out", {{"velocity", "m/s", Dir::Increasing},
                                           {"lift", "N", Dir::Increasing},
                                           {"velocity_per", "m/s", Dir::Increasing},
                                           {"missions", "count", Dir::Increasing},
                                           {"endurance", "s", Dir::Increasing}});
  std::vector<std::size_t> lift_slots(cat.actuators.size(), 0);
  const double gravity = params.gravity_m_per_s2;
  for (std::size_t ai : act_sel) {
    const double act_mass = cat.actuators[ai].mass_g;
    lift_slots[ai] = reg.add_const(arrow_dp(
        p_a_in, p_a_out,
        [act_mass, frame, gravity](const std::vector<double>& v) {
          const double mass_g = ((v[0] + frame) + act_mass) + v[4];
          return std::vector<double>{v[3], gravity * mass_g / 1000.0, v[3], v[1], v[2]};
        },
        "lift"));
  }

  // Expression: task stage feeding the union of traced alternatives.
  Diagram stage0 = Diagram::series(
      Diagram::leaf(0),
      Diagram::parallel(Diagram::leaf(slot_id_payload), Diagram::leaf(slot_task)));
  std::vector<Diagram> alternatives;
  alternatives.reserve(act_sel.size() * bat_sel.size());
  for (std::size_t ai : act_sel) {
    for (std::size_t bi : bat_sel) {
      Diagram stage2 = Diagram::parallel(
          Diagram::parallel(Diagram::leaf(act_slots[ai]), Diagram::leaf(slot_perception)),
          Diagram::leaf(slot_id_nt));
      Diagram inner = Diagram::series(
          Diagram::series(
              Diagram::series(Diagram::series(Diagram::leaf(lift_slots[ai]), stage2),
                              Diagram::leaf(slot_energy)),
              Diagram::parallel(Diagram::leaf(bat_slots[bi]), Diagram::leaf(slot_id_cw))),
          Diagram::leaf(slot_totals));
      alternatives.push_back(Diagram::trace(inner, 4, 2, params.trace));
    }
  }
  out.diagram = Diagram::series(stage0, Diagram::union_of(std::move(alternatives)));
  out.components = std::move(reg.dets);
  out.random_components = std::move(reg.rands);
  out.bound_templates = std::move(reg.bounds);
  return out;
}

// Definitional route: solve the composed diagram over nominal components.
inline DesignProblem uav_diagram(const Catalog& cat, const std::vector<std::size_t>& act_sel,
                                 const std::vector<std::size_t>& bat_sel, const TaskProfile& task,
                                 const UavParams& params) {
  const UavSystem sys = build_uav_system(cat, act_sel, bat_sel, task, params);
  return solve_diagram(sys.diagram, sys.components);
}

// The same system as one joint random problem (diagram route).
inline RandomDP uav_random_system(const UavSystem& sys) {
  require(sys.space != nullptr, "uav_random_system: system was built without a sample space");
  return compose_random(sys.random_components, sys.diagram);
}

// Composed inner confidence bound over the same diagram.
inline ComponentBound uav_inner_bound(const UavSystem& sys, double rho) {
  require(sys.space != nullptr, "uav_inner_bound: system was built without a sample space");
  std::vector<ComponentBound> bounds = sys.bound_templates;
  for (std::size_t k = 0; k < sys.bounded_slots.size(); ++k) {
    bounds[sys.bounded_slots[k]] = inner_bound_rect(*sys.space, sys.bounded_builders[k], rho);
  }
  return compose_inner_bounds(bounds, sys.diagram);
}

// --- fast route ---------------------------------------------------------------------

// Single alternative as a payload -> (cost, weight) problem.
inline DesignProblem choice_dp_from_params(const ChoiceParams& cp, const std::string& label) {
  PosetRef res = system_res_poset();
  return DesignProblem(
      payload_poset(), res,
      [cp, res](const Point& f) {
        Antichain out(res);
        const ChoiceSolution s = solve_choice(cp, f.x[0]);
        if (s.feasible) out.insert(res->point({s.cost_usd, s.self_weight_g}));
        return out;
      },
      label);
}

inline DesignProblem uav_choice_dp(const ActuatorModel& a, const BatteryTech& b,
                                   const TaskProfile& task, const UavParams& params) {
  return choice_dp_from_params(choice_params(a, b, task, params), a.name + "+" + b.name);
}

// Free choice over the selected alternatives; pointwise equal to uav_diagram.
inline DesignProblem uav_system_dp(const Catalog& cat, const std::vector<std::size_t>& act_sel,
                                   const std::vector<std::size_t>& bat_sel,
                                   const TaskProfile& task, const UavParams& params) {
  std::vector<ChoiceParams> cps;
  cps.reserve(act_sel.size() * bat_sel.size());
  for (std::size_t ai : act_sel) {
    for (std::size_t bi : bat_sel) {
      cps.push_back(choice_params(cat.actuators.at(ai), cat.batteries.at(bi), task, params));
    }
  }
  PosetRef res = system_res_poset();
  return DesignProblem(
      payload_poset(), res,
      [cps, res](const Point& f) {
        Antichain out(res);
        for (const ChoiceParams& cp : cps) {
          const ChoiceSolution s = solve_choice(cp, f.x[0]);
          if (s.feasible) out.insert(res->point({s.cost_usd, s.self_weight_g}));
        }
        return out;
      },
      "uav_system");
}

// --- deterministic and interval experiments ----------------------------------------------

struct CurvePoint {
  double payload_g = 0.0;
  double min_cost_usd = kInf;
  std::string actuator = "none";
  std::string battery = "none";
};

// Minimal lifetime cost and its argmin labels; ties resolve in catalog order
// (actuators outer, batteries inner).
inline CurvePoint min_cost_at(const Catalog& cat, const TaskProfile& task, const UavParams& params,
                              double payload_g) {
  CurvePoint out;
  out.payload_g = payload_g;
  for (const ActuatorModel& a : cat.actuators) {
    for (const BatteryTech& b : cat.batteries) {
      const ChoiceSolution s = solve_choice(choice_params(a, b, task, params), payload_g);
      if (s.feasible && s.cost_usd < out.min_cost_usd) {
        out.min_cost_usd = s.cost_usd;
        out.actuator = a.name;
        out.battery = b.name;
      }
    }
  }
  return out;
}

inline std::vector<CurvePoint> min_cost_curve(const Catalog& cat, const TaskProfile& task,
                                              const UavParams& params) {
  std::vector<CurvePoint> curve;
  curve.reserve(params.payload_grid_g.size());
  for (double p : params.payload_grid_g) curve.push_back(min_cost_at(cat, task, params, p));
  return curve;
}

struct DeterministicResult {
  std::vector<CurvePoint> curve;
};

inline DeterministicResult experiment_deterministic(const Catalog& cat, const TaskProfile& task,
                                                    const UavParams& params) {
  return {min_cost_curve(cat, task, params)};
}

// Flat view of the catalog's perturbable parameters, with the direction each
// one hurts. Order: per actuator (mass, cost, v_max, p0, p1), then per battery
// (rho_e, alpha, cycles); reconstruction is by position.
inline ParamTable catalog_param_table(const Catalog& cat) {
  ParamTable t;
  for (const ActuatorModel& a : cat.actuators) {
    t.push_back({"act." + a.name + ".mass", a.mass_g, ParamEffect::Harmful});
    t.push_back({"act." + a.name + ".cost", a.cost_usd, ParamEffect::Harmful});
    t.push_back({"act." + a.name + ".v_max", a.v_max_mps, ParamEffect::Helpful});
    t.push_back({"act." + a.name + ".p0", a.p0_w, ParamEffect::Harmful});
    t.push_back({"act." + a.name + ".p1", a.p1_w_per_n2, ParamEffect::Harmful});
  }
  for (const BatteryTech& b : cat.batteries) {
    t.push_back({"bat." + b.name + ".rho_e", b.energy_density_wh_per_kg, ParamEffect::Helpful});
    t.push_back({"bat." + b.name + ".alpha", b.energy_per_cost_wh_per_usd, ParamEffect::Helpful});
    t.push_back({"bat." + b.name + ".cycles", b.cycle_life, ParamEffect::Helpful});
  }
  return t;
}

inline Catalog catalog_from_table(const Catalog& base, const ParamTable& t) {
  require(t.size() == base.actuators.size() * 5 + base.batteries.size() * 3,
          "catalog_from_table: table does not match the catalog layout");
  Catalog c = base;
  std::size_t k = 0;
  for (ActuatorModel& a : c.actuators) {
    a.mass_g = t[k++].nominal;
    a.cost_usd = t[k++].nominal;
    a.v_max_mps = t[k++].nominal;
    a.p0_w = t[k++].nominal;
    a.p1_w_per_n2 = t[k++].nominal;
  }
  for (BatteryTech& b : c.batteries) {
    b.energy_density_wh_per_kg = t[k++].nominal;
    b.energy_per_cost_wh_per_usd = t[k++].nominal;
    b.cycle_life = t[k++].nominal;
  }
  return c;
}

struct IntervalResult {
  double fraction = 0.0;
  std::vector<CurvePoint> optimistic;
  std::vector<CurvePoint> nominal;
  std::vector<CurvePoint> pessimistic;
};

// Wait-and-see curves: each endpoint catalog is solved on its own, so the
// argmin labels may differ between curves.
inline IntervalResult experiment_interval(const Catalog& cat, const TaskProfile& task,
                                          const UavParams& params, double fraction) {
  const auto [pess_t, opt_t] = perturb_params(catalog_param_table(cat), fraction);
  IntervalResult out;
  out.fraction = fraction;
  out.optimistic = min_cost_curve(catalog_from_table(cat, opt_t), task, params);
  out.nominal = min_cost_curve(cat, task, params);
  out.pessimistic = min_cost_curve(catalog_from_table(cat, pess_t), task, params);
  return out;
}

// --- distributional experiment --------------------------------------------------------

struct ChoiceFreq {
  std::string actuator;
  std::string battery;
  double prob = 0.0;
};

struct DistributionalResult {
  std::vector<double> payloads_g;
  std::vector<std::vector<double>> cost_samples;  // [payload][sample]
  std::vector<std::vector<int>> argmin_pair;      // flat a*n_bat+b; -1 when infeasible
  std::vector<std::vector<ChoiceFreq>> choice_freq;
  std::vector<double> bound_lower_cost_usd;  // optimistic endpoint (cheaper)
  std::vector<double> bound_upper_cost_usd;  // pessimistic endpoint (dearer)
  double bound_level = 1.0;
  std::vector<double> out_of_bound_frac;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo over the joint parameter draw, common random numbers across
// payloads (sample i sees one world at every payload). The cost samples come
// from the scalar route; the bound curves come from the diagram route.
inline DistributionalResult experiment_distributional(const Catalog& cat, const TaskProfile& task,
                                                      const UavParams& params,
                                                      const Calibration& calib, double rho,
                                                      std::uint64_t n, std::uint64_t seed,
                                                      unsigned workers = 1) {
  require(n >= 1, "experiment_distributional: n must be >= 1");
  auto space = build_sample_space(cat, task, calib);
  const std::size_t n_payload = params.payload_grid_g.size();
  const std::size_t n_bat = cat.batteries.size();

  DistributionalResult out;
  out.payloads_g = params.payload_grid_g;
  out.n = n;
  out.seed = seed;
  out.cost_samples.assign(n_payload, std::vector<double>(n, kInf));
  out.argmin_pair.assign(n_payload, std::vector<int>(n, -1));

  parallel_for(n, workers, [&](std::size_t i) {
    const OmegaPoint w = sample_omega(*space, seed, i);
    for (std::size_t pi = 0; pi < n_payload; ++pi) {
      const double payload = params.payload_grid_g[pi];
      double best = kInf;
      int arg = -1;
      for (std::size_t a = 0; a < cat.actuators.size(); ++a) {
        for (std::size_t b = 0; b < n_bat; ++b) {
          const ChoiceParams cp = choice_params_from_draw(cat, a, b, w.value, task, params);
          const ChoiceSolution s = solve_choice(cp, payload);
          if (s.feasible && s.cost_usd < best) {
            best = s.cost_usd;
            arg = static_cast<int>(a * n_bat + b);
          }
        }
      }
      out.cost_samples[pi][i] = best;
      out.argmin_pair[pi][i] = arg;
    }
  });

  // Optimality frequencies (the partition includes an explicit "none" bucket).
  out.choice_freq.assign(n_payload, {});
  for (std::size_t pi = 0; pi < n_payload; ++pi) {
    std::vector<std::uint64_t> counts(cat.n_pairs(), 0);
    std::uint64_t none = 0;
    for (int a : out.argmin_pair[pi]) {
      if (a < 0) {
        ++none;
      } else {
        ++counts[static_cast<std::size_t>(a)];
      }
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
      if (counts[c] == 0) continue;
      out.choice_freq[pi].push_back({cat.actuators[c / n_bat].name, cat.batteries[c % n_bat].name,
                                     static_cast<double>(counts[c]) / static_cast<double>(n)});
    }
    if (none > 0) {
      out.choice_freq[pi].push_back(
          {"none", "none", static_cast<double>(none) / static_cast<double>(n)});
    }
  }

  // Composed inner bound at rho, evaluated on the payload grid.
  const UavSystem sys =
      build_uav_system(cat, all_actuators(cat), all_batteries(cat), task, params, space);
  const ComponentBound composed = uav_inner_bound(sys, rho);
  out.bound_level = composed.level;
  out.bound_lower_cost_usd.resize(n_payload);
  out.bound_upper_cost_usd.resize(n_payload);
  out.out_of_bound_frac.resize(n_payload);
  PosetRef p_payload = payload_poset();
  for (std::size_t pi = 0; pi < n_payload; ++pi) {
    const Point f = p_payload->point({params.payload_grid_g[pi]});
    const double hi = composed.interval.lower.eval(f).min_coordinate(0);  // pessimistic
    const double lo = composed.interval.upper.eval(f).min_coordinate(0);  // optimistic
    out.bound_lower_cost_usd[pi] = lo;
    out.bound_upper_cost_usd[pi] = hi;
    std::uint64_t outside = 0;
    for (double c : out.cost_samples[pi]) {
      if (c < lo || c > hi) ++outside;
    }
    out.out_of_bound_frac[pi] = static_cast<double>(outside) / static_cast<double>(n);
  }
  return out;
}

// --- adaptive decision processes -------------------------------------------------------

enum class AdaptLevel { NonAdaptive, PartlyAdaptive, FullyAdaptive };

inline const char* level_name(AdaptLevel l) {
  switch (l) {
    case AdaptLevel::NonAdaptive: return "non_adaptive";
    case AdaptLevel::PartlyAdaptive: return "partly_adaptive";
    case AdaptLevel::FullyAdaptive: return "fully_adaptive";
  }
  throw contract_error("level_name: unknown adaptivity level");
}

struct ScenarioOptions {
  std::uint64_t seed = 0;  // binds the MAP policies' inner draws
  int inner_n = 200;
};

namespace detail {

// Inner conditional draw for policy estimation; keys are independent of the
// outer sample index, which is what keeps the estimated policies deterministic.
inline double policy_inner_param(const SampleSpace& space, std::uint64_t seed, std::size_t param,
                                 std::uint64_t j) {
  const ParamSpec& p = space.param(param);
  Stream s(stream_key(seed, StreamDomain::PolicyInner, param, j));
  return s.truncated_gaussian(p.nominal, space.sigma(param), p.lower_bound);
}

inline PosetRef extend_poset(const PosetRef& base, const std::string& name,
                             const std::vector<Coord>& extra) {
  std::vector<Coord> coords = base->coords();
  coords.insert(coords.end(), extra.begin(), extra.end());
  return Poset::make(name, std::move(coords));
}

inline std::vector<Coord> actuator_spec_coords() {
  return {{"act_mass", "g", Dir::Increasing},
          {"act_cost", "usd", Dir::Increasing},
          {"act_v_max", "m/s", Dir::Increasing},
          {"act_p0", "W", Dir::Increasing},
          {"act_p1", "W/N^2", Dir::Increasing}};
}
inline std::vector<Coord> battery_spec_coords() {
  return {{"bat_rho_e", "Wh/kg", Dir::Increasing},
          {"bat_alpha", "Wh/usd", Dir::Increasing},
          {"bat_cycles", "count", Dir::Increasing}};
}

// Kernel appending a policy's decision, encoded by `encode`.
inline Kernel decision_kernel(PosetRef in, PosetRef out, Policy pol,
                              std::function<std::vector<double>(std::size_t)> encode) {
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, pol = std::move(pol), encode = std::move(encode)](const Point& x, KernelCtx&) {
                  std::vector<double> v = x.x;
                  for (double e : encode(pol.decide(x))) v.push_back(e);
                  return o->point(v);
                });
}

// Observation kernels reveal the realized world, so they draw with the
// sample_omega keys (ctx.seed, parameter, ctx.sample_index) rather than a stage
// stream; the same sample index sees the same world at every level.
inline Kernel observe_chosen_actuator(PosetRef in, PosetRef out,
                                      std::shared_ptr<const SampleSpace> space, Catalog cat,
                                      std::size_t a_coord) {
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, space = std::move(space), cat = std::move(cat), a_coord](const Point& x,
                                                                             KernelCtx& ctx) {
                  const auto a = static_cast<std::size_t>(x.x[a_coord]);
                  require(a < cat.actuators.size(), "observe actuator: choice out of range");
                  const ActuatorModel& m = cat.actuators[a];
                  std::vector<double> v = x.x;
                  v.push_back(m.mass_g);
                  v.push_back(m.cost_usd);
                  v.push_back(m.v_max_mps);
                  v.push_back(space->sample_param(actuator_param_index(cat, a, 0), ctx.seed,
                                                  ctx.sample_index));
                  v.push_back(space->sample_param(actuator_param_index(cat, a, 1), ctx.seed,
                                                  ctx.sample_index));
                  return o->point(v);
                });
}

inline Kernel observe_chosen_battery(PosetRef in, PosetRef out,
                                     std::shared_ptr<const SampleSpace> space, std::size_t n_bat,
                                     std::size_t b_coord) {
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, space = std::move(space), n_bat, b_coord](const Point& x, KernelCtx& ctx) {
                  const auto b = static_cast<std::size_t>(x.x[b_coord]);
                  require(b < n_bat, "observe battery: choice out of range");
                  std::vector<double> v = x.x;
                  for (std::size_t which = 0; which < 3; ++which) {
                    v.push_back(space->sample_param(battery_param_index(b, which), ctx.seed,
                                                    ctx.sample_index));
                  }
                  return o->point(v);
                });
}

inline Kernel observe_mission_count(PosetRef in, PosetRef out,
                                    std::shared_ptr<const SampleSpace> space) {
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, space = std::move(space)](const Point& x, KernelCtx& ctx) {
                  std::vector<double> v = x.x;
                  v.push_back(missions_from_draw(
                      space->sample_param(missions_param_index(), ctx.seed, ctx.sample_index)));
                  return o->point(v);
                });
}

// Reveals every world parameter in sample-space order (mission count rounded).
inline Kernel observe_world(PosetRef in, PosetRef out, std::shared_ptr<const SampleSpace> space) {
  PosetRef o = out;
  return Kernel(std::move(in), out,
                [o, space = std::move(space)](const Point& x, KernelCtx& ctx) {
                  std::vector<double> v = x.x;
                  for (std::size_t k = 0; k < space->size(); ++k) {
                    const double draw = space->sample_param(k, ctx.seed, ctx.sample_index);
                    v.push_back(k == missions_param_index() ? missions_from_draw(draw) : draw);
                  }
                  return o->point(v);
                });
}

}  // namespace detail

// Builds one of the three benchmark decision processes over <payload>. The
// policies are deterministic MAP estimates bound to opt.seed (fully adaptive
// uses the exact per-sample argmin instead); the world revealed by the
// observation stages is the same one the distributional benchmark draws.
inline StagedProcess build_scenario(AdaptLevel level, const Catalog& cat, const TaskProfile& task,
                                    const UavParams& params,
                                    std::shared_ptr<const SampleSpace> space,
                                    const ScenarioOptions& opt = {}) {
  require(space != nullptr, "build_scenario: sample space required");
  const std::size_t n_act = cat.actuators.size();
  const std::size_t n_bat = cat.batteries.size();
  const std::uint64_t seed = opt.seed;
  const int inner_n = opt.inner_n;

  PosetRef p0 = payload_poset();
  StagedProcess proc;
  proc.name = level_name(level);
  proc.input = p0;
  proc.observe = [](const DesignProblem& dp, const Point& input) {
    return dp.eval(input).min_coordinate(0);
  };

  // Inner conditional cost of one alternative with every random parameter
  // redrawn (used by the policies that commit before observing anything).
  auto blind_pair_cost = [cat, task, params, space, seed](std::size_t a, std::size_t b,
                                                          double payload, std::uint64_t j) {
    ChoiceParams cp = choice_params(cat.actuators[a], cat.batteries[b], task, params);
    cp.p0_w = detail::policy_inner_param(*space, seed, actuator_param_index(cat, a, 0), j);
    cp.p1_w_per_n2 = detail::policy_inner_param(*space, seed, actuator_param_index(cat, a, 1), j);
    cp.rho_e_wh_per_kg = detail::policy_inner_param(*space, seed, battery_param_index(b, 0), j);
    cp.alpha_wh_per_usd = detail::policy_inner_param(*space, seed, battery_param_index(b, 1), j);
    cp.cycles = detail::policy_inner_param(*space, seed, battery_param_index(b, 2), j);
    cp.missions =
        missions_from_draw(detail::policy_inner_param(*space, seed, missions_param_index(), j));
    return solve_choice(cp, payload).cost_usd;
  };

  switch (level) {
    case AdaptLevel::NonAdaptive: {
      // pi_{A,B} commits on payload alone; the world is observed afterwards
      // only so the realized cost can be evaluated.
      PosetRef p1 = detail::extend_poset(p0, "non_s1", {{"a_idx", "idx", Dir::Increasing},
                                                        {"b_idx", "idx", Dir::Increasing}});
      PosetRef p2 = detail::extend_poset(p1, "non_s2", detail::actuator_spec_coords());
      PosetRef p3 = detail::extend_poset(p2, "non_s3", detail::battery_spec_coords());
      PosetRef p4 = detail::extend_poset(p3, "non_s4", {{"missions", "count", Dir::Increasing}});
      Policy pi_ab = estimate_map_policy(
          p0, n_act * n_bat,
          [blind_pair_cost, n_bat](std::size_t c, const Point& obs, std::uint64_t j) {
            return blind_pair_cost(c / n_bat, c % n_bat, obs.x[0], j);
          },
          inner_n);
      proc.stages.push_back(
          detail::decision_kernel(p0, p1, std::move(pi_ab), [n_bat](std::size_t c) {
            return std::vector<double>{static_cast<double>(c / n_bat),
                                       static_cast<double>(c % n_bat)};
          }));
      proc.stages.push_back(detail::observe_chosen_actuator(p1, p2, space, cat, 1));
      proc.stages.push_back(detail::observe_chosen_battery(p2, p3, space, n_bat, 2));
      proc.stages.push_back(detail::observe_mission_count(p3, p4, space));
      // layout: [payload, a, b, mass, cost, v_max, p0, p1, rho, alpha, cyc, N]
      proc.realize = [task, params](const Point& x) {
        ChoiceParams cp;
        cp.act_mass_g = x.x[3];
        cp.act_cost_usd = x.x[4];
        cp.v_max_mps = x.x[5];
        cp.p0_w = x.x[6];
        cp.p1_w_per_n2 = x.x[7];
        cp.rho_e_wh_per_kg = x.x[8];
        cp.alpha_wh_per_usd = x.x[9];
        cp.cycles = x.x[10];
        cp.missions = x.x[11];
        cp.distance_m = task.distance_m;
        cp.velocity_mps = params.cruise_velocity_mps;
        cp.gravity_m_per_s2 = params.gravity_m_per_s2;
        cp.frame_mass_g = params.frame_mass_g;
        cp.c0_w = params.perception_c0_w;
        cp.c1_w_per_mps = params.perception_c1_w_per_mps;
        cp.trace = params.trace;
        return choice_dp_from_params(cp, "non_adaptive_choice");
      };
      break;
    }
    case AdaptLevel::PartlyAdaptive: {
      // pi_A commits on payload; the chosen actuator's realized specification
      // is observed; pi_B conditions on it by nested Monte Carlo.
      PosetRef p1 = detail::extend_poset(p0, "part_s1", {{"a_idx", "idx", Dir::Increasing}});
      PosetRef p2 = detail::extend_poset(p1, "part_s2", detail::actuator_spec_coords());
      PosetRef p3 = detail::extend_poset(p2, "part_s3", {{"b_idx", "idx", Dir::Increasing}});
      PosetRef p4 = detail::extend_poset(p3, "part_s4", detail::battery_spec_coords());
      PosetRef p5 = detail::extend_poset(p4, "part_s5", {{"missions", "count", Dir::Increasing}});
      Policy pi_a = estimate_map_policy(
          p0, n_act,
          [blind_pair_cost, n_bat](std::size_t a, const Point& obs, std::uint64_t j) {
            double best = kInf;
            for (std::size_t b = 0; b < n_bat; ++b) {
              best = std::min(best, blind_pair_cost(a, b, obs.x[0], j));
            }
            return best;
          },
          inner_n);
      // layout at p2: [payload, a, mass, cost, v_max, p0, p1]
      Policy pi_b = estimate_map_policy(
          p2, n_bat,
          [cat, task, params, space, seed](std::size_t b, const Point& obs, std::uint64_t j) {
            ChoiceParams cp = choice_params(cat.actuators[static_cast<std::size_t>(obs.x[1])],
                                            cat.batteries[b], task, params);
            cp.act_mass_g = obs.x[2];
            cp.act_cost_usd = obs.x[3];
            cp.v_max_mps = obs.x[4];
            cp.p0_w = obs.x[5];
            cp.p1_w_per_n2 = obs.x[6];
            cp.rho_e_wh_per_kg =
                detail::policy_inner_param(*space, seed, battery_param_index(b, 0), j);
            cp.alpha_wh_per_usd =
                detail::policy_inner_param(*space, seed, battery_param_index(b, 1), j);
            cp.cycles = detail::policy_inner_param(*space, seed, battery_param_index(b, 2), j);
            cp.missions = missions_from_draw(
                detail::policy_inner_param(*space, seed, missions_param_index(), j));
            return solve_choice(cp, obs.x[0]).cost_usd;
          },
          inner_n);
      proc.stages.push_back(detail::decision_kernel(
          p0, p1, std::move(pi_a),
          [](std::size_t a) { return std::vector<double>{static_cast<double>(a)}; }));
      proc.stages.push_back(detail::observe_chosen_actuator(p1, p2, space, cat, 1));
      proc.stages.push_back(detail::decision_kernel(
          p2, p3, std::move(pi_b),
          [](std::size_t b) { return std::vector<double>{static_cast<double>(b)}; }));
      proc.stages.push_back(detail::observe_chosen_battery(p3, p4, space, n_bat, 7));
      proc.stages.push_back(detail::observe_mission_count(p4, p5, space));
      // layout: [payload, a, mass, cost, v_max, p0, p1, b, rho, alpha, cyc, N]
      proc.realize = [task, params](const Point& x) {
        ChoiceParams cp;
        cp.act_mass_g = x.x[2];
        cp.act_cost_usd = x.x[3];
        cp.v_max_mps = x.x[4];
        cp.p0_w = x.x[5];
        cp.p1_w_per_n2 = x.x[6];
        cp.rho_e_wh_per_kg = x.x[8];
        cp.alpha_wh_per_usd = x.x[9];
        cp.cycles = x.x[10];
        cp.missions = x.x[11];
        cp.distance_m = task.distance_m;
        cp.velocity_mps = params.cruise_velocity_mps;
        cp.gravity_m_per_s2 = params.gravity_m_per_s2;
        cp.frame_mass_g = params.frame_mass_g;
        cp.c0_w = params.perception_c0_w;
        cp.c1_w_per_mps = params.perception_c1_w_per_mps;
        cp.trace = params.trace;
        return choice_dp_from_params(cp, "partly_adaptive_choice");
      };
      break;
    }
    case AdaptLevel::FullyAdaptive: {
      // Every world parameter is observed first; the pair decision is the
      // exact argmin under the observed parameters (no sampling).
      std::vector<Coord> world;
      world.reserve(space->size());
      for (std::size_t k = 0; k < space->size(); ++k) {
        world.push_back({space->param(k).name, space->param(k).unit, Dir::Increasing});
      }
      PosetRef p1 = detail::extend_poset(p0, "full_s1", world);
      PosetRef p2 = detail::extend_poset(p1, "full_s2", {{"a_idx", "idx", Dir::Increasing},
                                                         {"b_idx", "idx", Dir::Increasing}});
      proc.stages.push_back(detail::observe_world(p0, p1, space));
      auto cp_from_obs = [cat, task, params](const Point& x, std::size_t a, std::size_t b) {
        ChoiceParams cp = choice_params(cat.actuators[a], cat.batteries[b], task, params);
        cp.p0_w = x.x[1 + actuator_param_index(cat, a, 0)];
        cp.p1_w_per_n2 = x.x[1 + actuator_param_index(cat, a, 1)];
        cp.rho_e_wh_per_kg = x.x[1 + battery_param_index(b, 0)];
        cp.alpha_wh_per_usd = x.x[1 + battery_param_index(b, 1)];
        cp.cycles = x.x[1 + battery_param_index(b, 2)];
        cp.missions = x.x[1 + missions_param_index()];
        return cp;
      };
      PosetRef o2 = p2;
      proc.stages.push_back(
          Kernel(p1, p2, [o2, cp_from_obs, n_act, n_bat](const Point& x, KernelCtx&) {
            double best = kInf;
            std::size_t ba = 0, bb = 0;
            for (std::size_t a = 0; a < n_act; ++a) {
              for (std::size_t b = 0; b < n_bat; ++b) {
                const ChoiceSolution s = solve_choice(cp_from_obs(x, a, b), x.x[0]);
                if (s.feasible && s.cost_usd < best) {
                  best = s.cost_usd;
                  ba = a;
                  bb = b;
                }
              }
            }
            std::vector<double> v = x.x;
            v.push_back(static_cast<double>(ba));
            v.push_back(static_cast<double>(bb));
            return o2->point(v);
          }));
      const std::size_t a_coord = 1 + space->size();
      proc.realize = [cp_from_obs, a_coord](const Point& x) {
        const auto a = static_cast<std::size_t>(x.x[a_coord]);
        const auto b = static_cast<std::size_t>(x.x[a_coord + 1]);
        return choice_dp_from_params(cp_from_obs(x, a, b), "fully_adaptive_choice");
      };
      break;
    }
  }
  proc.validate();
  return proc;
}

struct AdaptiveResult {
  std::vector<double> payloads_g;
  std::array<std::string, 3> level_names = {"non_adaptive", "partly_adaptive", "fully_adaptive"};
  std::array<std::vector<std::vector<double>>, 3> samples;  // [level][payload][sample]
  std::array<std::vector<RunSummary>, 3> summary;           // [level][payload]
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

inline AdaptiveResult experiment_adaptive(const Catalog& cat, const TaskProfile& task,
                                          const UavParams& params, const Calibration& calib,
                                          std::uint64_t n, std::uint64_t seed, int inner_n = 200,
                                          unsigned workers = 1) {
  auto space = build_sample_space(cat, task, calib);
  std::vector<Point> inputs;
  PosetRef p0 = payload_poset();
  inputs.reserve(params.payload_grid_g.size());
  for (double p : params.payload_grid_g) inputs.push_back(p0->point({p}));

  AdaptiveResult out;
  out.payloads_g = params.payload_grid_g;
  out.n = n;
  out.seed = seed;
  const std::array<AdaptLevel, 3> levels = {AdaptLevel::NonAdaptive, AdaptLevel::PartlyAdaptive,
                                            AdaptLevel::FullyAdaptive};
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const StagedProcess proc =
        build_scenario(levels[li], cat, task, params, space, {seed, inner_n});
    ProcessRun run = run_process(proc, inputs, n, seed, workers);
    out.samples[li] = std::move(run.samples);
    out.summary[li] = std::move(run.summary);
  }
  return out;
}

}  // namespace cdu::uav
