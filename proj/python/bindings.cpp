// SPDX-License-Identifier: Apache-2.0
//
// Python bindings for the main operations: channel synthesis, RSMA rates,
// power terms, the MDP environment, MSAT/MMSAT training drivers and the
// complexity estimator.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aaris/harness.hpp"

namespace py = pybind11;
using namespace aaris;

namespace {

EnvConfig make_env_config(bool desk_scale) {
  ExperimentConfig cfg = default_experiment();
  if (desk_scale) apply_desk_scale(cfg);
  return cfg.env;
}

py::dict flags_to_dict(const ConstraintFlags& flags) {
  py::dict d;
  py::list sat;
  for (bool s : flags.sat) sat.append(s);
  d["sat"] = sat;
  d["violations"] = flags.violations();
  return d;
}

py::dict metrics_to_dict(const SlotMetrics& m) {
  py::dict d;
  d["r_total"] = m.r_total;
  d["p_total"] = m.p_total;
  d["p_uav"] = m.p_uav;
  d["p_ris"] = m.p_ris;
  d["p_out"] = m.p_out;
  d["ee"] = m.ee;
  d["reward"] = m.reward;
  d["flags"] = flags_to_dict(m.flags);
  return d;
}

py::dict record_to_dict(const MetricsRecord& r) {
  py::dict d;
  d["episode"] = r.episode;
  d["baseline"] = r.baseline;
  d["seed"] = r.seed;
  d["mean_reward"] = r.mean_reward;
  d["avg_ee"] = r.avg_ee;
  d["avg_sum_rate"] = r.avg_sum_rate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_aaris, m) {
  m.doc() = "RSMA aerial active-RIS network simulator with MSAT/MMSAT agents";

  // channel
  m.def("ula_steering", &ula_steering, py::arg("n"), py::arg("phase_arg"));
  m.def("upa_steering", &upa_steering, py::arg("mx"), py::arg("my"), py::arg("phase_arg"));
  m.def(
      "path_gain",
      [](double distance, double alpha, double c0, double d0) {
        ChannelParams p;
        p.c0 = c0;
        p.d0 = d0;
        return path_gain(distance, alpha, p);
      },
      py::arg("distance"), py::arg("alpha"), py::arg("c0") = 1e-3, py::arg("d0") = 1.0);

  // power
  py::class_<UavPowerParams>(m, "UavPowerParams")
      .def(py::init<>())
      .def_readwrite("p_b", &UavPowerParams::p_b)
      .def_readwrite("p_i", &UavPowerParams::p_i)
      .def_readwrite("omega", &UavPowerParams::omega)
      .def_readwrite("rotor_r", &UavPowerParams::rotor_r)
      .def_readwrite("d_ratio", &UavPowerParams::d_ratio)
      .def_readwrite("air_density", &UavPowerParams::air_density)
      .def_readwrite("solidity", &UavPowerParams::solidity)
      .def_readwrite("disk_area", &UavPowerParams::disk_area)
      .def_readwrite("v_induced", &UavPowerParams::v_induced);
  m.def("propulsion_power", &propulsion_power, py::arg("speed"),
        py::arg("params") = UavPowerParams{});
  m.def("hover_power", &hover_power, py::arg("params") = UavPowerParams{});
  m.def("energy_efficiency", &energy_efficiency, py::arg("rates"), py::arg("powers"));
  m.def("rate", &rate, py::arg("sinr"));
  m.def("dbm_to_watt", &dbm_to_watt);

  // environment
  py::class_<TaskSpec>(m, "TaskSpec")
      .def(py::init<>())
      .def_readwrite("id", &TaskSpec::id)
      .def_readwrite("mobility_seed", &TaskSpec::mobility_seed)
      .def_property(
          "user_init",
          [](const TaskSpec& t) {
            std::vector<std::pair<double, double>> out;
            for (const auto& u : t.user_init) out.emplace_back(u.x(), u.y());
            return out;
          },
          [](TaskSpec& t, const std::vector<std::pair<double, double>>& users) {
            t.user_init.clear();
            for (const auto& [x, y] : users) t.user_init.emplace_back(x, y);
          });

  py::class_<EnvConfig>(m, "EnvConfig")
      .def(py::init(&make_env_config), py::arg("desk_scale") = true)
      .def_readwrite("k_users", &EnvConfig::k_users)
      .def_readwrite("horizon_slots", &EnvConfig::horizon_slots)
      .def_readwrite("seed", &EnvConfig::seed)
      .def("state_dim", &EnvConfig::state_dim)
      .def("cont_action_dim", &EnvConfig::cont_action_dim)
      .def("mask_dim", &EnvConfig::mask_dim)
      .def("finalize", &EnvConfig::finalize);

  py::class_<Environment>(m, "Environment")
      .def(py::init<EnvConfig>())
      .def("reset", [](Environment& env) { return env.reset(); })
      .def("reset",
           [](Environment& env, const TaskSpec& task) { return env.reset(task); })
      .def(
          "step",
          [](Environment& env, const std::vector<int>& mask, const VectorXd& cont) {
            JointAction a;
            a.sel_mask.assign(mask.begin(), mask.end());
            a.raw_cont = cont;
            const StepResult res = env.step(a);
            return py::make_tuple(res.state, res.reward, res.done,
                                  metrics_to_dict(res.metrics));
          },
          py::arg("sel_mask"), py::arg("raw_cont"))
      .def("state_dim", &Environment::state_dim)
      .def("cont_action_dim", &Environment::cont_action_dim)
      .def("mask_dim", &Environment::mask_dim);

  m.def(
      "reward_from",
      [](double ee, const std::vector<bool>& sat) {
        ConstraintFlags flags;
        if (sat.size() != flags.sat.size())
          throw std::invalid_argument("reward_from: need 13 flags");
        for (std::size_t i = 0; i < sat.size(); ++i) flags.sat[i] = sat[i];
        return reward_from(ee, flags);
      },
      py::arg("ee"), py::arg("sat"));

  // harness
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init(&default_experiment))
      .def_readwrite("env", &ExperimentConfig::env)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_property(
          "episodes", [](const ExperimentConfig& c) { return c.agent.episodes; },
          [](ExperimentConfig& c, int e) { c.agent.episodes = e; })
      .def_property(
          "baseline", [](const ExperimentConfig& c) { return std::string(to_string(c.baseline)); },
          [](ExperimentConfig& c, const std::string& b) { c.baseline = baseline_from_string(b); })
      .def("apply_desk_scale", [](ExperimentConfig& c) { apply_desk_scale(c); });

  m.def("load_config", &load_config, py::arg("path"));
  m.def(
      "run_baseline",
      [](const ExperimentConfig& cfg, const std::string& baseline, std::uint64_t seed) {
        const RunResult res = run_baseline(cfg, baseline_from_string(baseline), seed);
        py::list out;
        for (const auto& r : res.records) out.append(record_to_dict(r));
        return out;
      },
      py::arg("config"), py::arg("baseline"), py::arg("seed"));
  m.def("complexity_product", &complexity_product, py::arg("layer_dims"), py::arg("batch"),
        py::arg("episodes"), py::arg("slots"), py::arg("tasks"));
  m.def("complexity_estimate", [](const ExperimentConfig& cfg) {
    const ComplexityEstimate est = complexity_estimate(cfg);
    py::dict d;
    d["meta_training_cost"] = est.meta_training_cost;
    d["meta_adaptation_cost"] = est.meta_adaptation_cost;
    return d;
  });
}
