// Copyright 2026 The wecest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wecest/csv.hpp"
#include "wecest/error.hpp"

namespace wecest::cli {

namespace pt = boost::property_tree;

std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::none: return "none";
    case SweepKind::rate: return "rate";
    case SweepKind::order: return "order";
    case SweepKind::noise: return "noise";
  }
  return "none";
}

SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "none") return SweepKind::none;
  if (s == "rate") return SweepKind::rate;
  if (s == "order") return SweepKind::order;
  if (s == "noise") return SweepKind::noise;
  throw ValidationError("unknown sweep kind '" + s + "' (expected none | rate | order | noise)");
}

namespace {

// Reads typed values and remembers which keys were consumed, so that typos
// surface as errors instead of silently falling back to defaults.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  void get(const std::string& section, const std::string& key, T& out) {
    const auto raw = raw_value(section, key);
    if (!raw) return;
    out = convert<T>(*raw, section + "." + key);
  }

  template <typename T>
  void get_list(const std::string& section, const std::string& key, std::vector<T>& out) {
    const auto raw = raw_value(section, key);
    if (!raw) return;
    out.clear();
    for (const auto& field : csv::split(*raw)) {
      const auto item = csv::trim(field);
      if (item.empty()) continue;
      out.push_back(convert<T>(std::string(item), section + "." + key));
    }
  }

  std::optional<std::string> raw_value(const std::string& section, const std::string& key) {
    seen_.insert(section + "." + key);
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto node = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!node) return std::nullopt;
    return std::string(csv::trim(node->data()));
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        throw ParseError("key '" + section + "' outside of any section", 0);
      }
      for (const auto& entry : body) {
        const std::string name = section + "." + entry.first;
        if (!seen_.contains(name)) throw ParseError("unknown key " + name, 0);
      }
    }
  }

 private:
  template <typename T>
  static T convert(const std::string& text, const std::string& name) {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
      if (text == "false" || text == "0" || text == "no" || text == "off") return false;
      throw ParseError(name + ": expected a boolean, got '" + text + "'", 0);
    } else {
      T value{};
      const auto* end = text.data() + text.size();
      const auto [ptr, ec] = std::from_chars(text.data(), end, value);
      if (ec != std::errc() || ptr != end) {
        throw ParseError(name + ": cannot parse '" + text + "' as a number", 0);
      }
      return value;
    }
  }

  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += csv::format(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

void check(std::vector<std::string>& out, bool ok, const std::string& field, const std::string& rule) {
  if (!ok) out.push_back(field + " must be " + rule);
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line());
  }

  ExperimentConfig c;
  Reader r(tree);

  r.get("run", "seed", c.seed);
  r.get("run", "jobs", c.jobs);

  auto& p = c.params;
  r.get("float", "mass", p.mass);
  r.get("float", "added_mass_inf", p.added_mass_inf);
  r.get("float", "waterplane_area", p.waterplane_area);
  r.get("float", "projected_area", p.projected_area);
  r.get("float", "drag_coeff", p.drag_coeff);
  r.get("float", "linear_damping", p.linear_damping);
  r.get("float", "mooring_stiffness", p.mooring_stiffness);
  r.get("float", "water_density", p.water_density);
  r.get("float", "gravity", p.gravity);

  std::string source = "analytic";
  r.get("hydro", "source", source);
  if (source != "analytic") {
    c.hydro_path = source;
    if (c.hydro_path.is_relative()) c.hydro_path = path.parent_path() / c.hydro_path;
  }
  r.get("hydro", "omega_min", c.grid.omega_min);
  r.get("hydro", "omega_max", c.grid.omega_max);
  r.get("hydro", "points", c.grid.n);
  r.get("hydro", "peak_frequency", c.shape.peak_frequency);
  r.get("hydro", "peak_damping", c.shape.peak_damping);
  r.get("hydro", "excitation_delay", c.shape.excitation_delay);
  r.get("hydro", "added_mass_excess", c.shape.added_mass_excess);

  r.get("radiation", "order", c.truth_order);
  r.get("radiation", "filter_order", c.filter_order);
  r.get("radiation", "irf_dt", c.radiation_irf.dt);
  r.get("radiation", "irf_duration", c.radiation_irf.duration);

  r.get("excitation", "irf_dt", c.excitation_irf_dt);
  r.get("excitation", "half_width", c.excitation_half_width);

  std::string mode = "catalog";
  r.get("wave", "mode", mode);
  if (mode == "catalog") {
    c.wave_mode = WaveMode::catalog;
  } else if (mode == "single") {
    c.wave_mode = WaveMode::single;
  } else {
    throw ParseError("wave.mode: expected catalog | single, got '" + mode + "'", 0);
  }
  r.get_list("wave", "runs", c.runs);
  r.get("wave", "hs", c.hs);
  r.get("wave", "tp", c.tp);
  r.get("wave", "components", c.wave_components);

  auto& e = c.estimator;
  std::string method = to_string(e.method);
  r.get("estimator", "method", method);
  try {
    e.method = parse_method(method);
  } catch (const ValidationError& err) {
    throw ParseError(std::string("estimator.method: ") + err.what(), 0);
  }
  r.get("estimator", "components", e.n_components);
  r.get("estimator", "fex_process_std", e.fex_process_std);
  r.get("estimator", "component_process_std", e.component_process_std);
  r.get("estimator", "fex_std_fraction", c.fex_std_fraction);
  r.get("estimator", "component_std_fraction", c.component_std_fraction);
  r.get("estimator", "power_threshold", e.power_threshold);
  r.get("estimator", "measurement_noise", e.measurement_noise);
  r.get("estimator", "max_step", e.max_step);
  r.get("estimator", "water_velocity", e.estimate_water_velocity);
  r.get("estimator", "water_velocity_delay", e.water_velocity_delay);
  r.get("estimator", "water_velocity_limit", e.water_velocity_limit);

  r.get("sim", "dt", c.sim.dt);
  r.get("sim", "duration", c.sim.duration);
  r.get("sim", "measurement_rate", c.sim.measurement_rate);
  r.get("sim", "noise_position", c.sim.noise_position);
  r.get("sim", "noise_velocity", c.sim.noise_velocity);
  r.get("sim", "initial_heave", c.sim.initial_heave);
  r.get("sim", "initial_velocity", c.sim.initial_velocity);
  r.get("sim", "calibration_duration", c.calibration_duration);

  std::string kind = "none";
  r.get("sweep", "kind", kind);
  try {
    c.sweep = parse_sweep_kind(kind);
  } catch (const ValidationError& err) {
    throw ParseError(std::string("sweep.kind: ") + err.what(), 0);
  }
  r.get_list("sweep", "values", c.sweep_values);
  std::vector<std::string> methods;
  r.get_list("sweep", "methods", methods);
  for (const auto& m : methods) {
    try {
      c.sweep_methods.push_back(parse_method(m));
    } catch (const ValidationError& err) {
      throw ParseError(std::string("sweep.methods: ") + err.what(), 0);
    }
  }

  std::string out = c.output_dir.string();
  r.get("output", "dir", out);
  c.output_dir = out;

  r.reject_unknown();
  return c;
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& c) {
  std::ostringstream o;
  const auto num = [](double v) { return csv::format(v); };
  o << "[run]\nseed = " << c.seed << "\njobs = " << c.jobs << "\n\n";
  const auto& p = c.params;
  o << "[float]\nmass = " << num(p.mass) << "\nadded_mass_inf = " << num(p.added_mass_inf)
    << "\nwaterplane_area = " << num(p.waterplane_area) << "\nprojected_area = " << num(p.projected_area)
    << "\ndrag_coeff = " << num(p.drag_coeff) << "\nlinear_damping = " << num(p.linear_damping)
    << "\nmooring_stiffness = " << num(p.mooring_stiffness) << "\nwater_density = " << num(p.water_density)
    << "\ngravity = " << num(p.gravity) << "\n\n";
  o << "[hydro]\nsource = " << (c.hydro_path.empty() ? std::string("analytic") : c.hydro_path.string())
    << "\nomega_min = " << num(c.grid.omega_min) << "\nomega_max = " << num(c.grid.omega_max)
    << "\npoints = " << c.grid.n << "\npeak_frequency = " << num(c.shape.peak_frequency)
    << "\npeak_damping = " << num(c.shape.peak_damping) << "\nexcitation_delay = " << num(c.shape.excitation_delay)
    << "\nadded_mass_excess = " << num(c.shape.added_mass_excess) << "\n\n";
  o << "[radiation]\norder = " << c.truth_order << "\nfilter_order = " << c.filter_order
    << "\nirf_dt = " << num(c.radiation_irf.dt) << "\nirf_duration = " << num(c.radiation_irf.duration) << "\n\n";
  o << "[excitation]\nirf_dt = " << num(c.excitation_irf_dt) << "\nhalf_width = " << num(c.excitation_half_width)
    << "\n\n";
  o << "[wave]\nmode = " << (c.wave_mode == WaveMode::catalog ? "catalog" : "single") << "\nruns = " << join(c.runs)
    << "\nhs = " << num(c.hs) << "\ntp = " << num(c.tp) << "\ncomponents = " << c.wave_components << "\n\n";
  const auto& e = c.estimator;
  o << "[estimator]\nmethod = " << to_string(e.method) << "\ncomponents = " << e.n_components
    << "\nfex_process_std = " << num(e.fex_process_std) << "\ncomponent_process_std = " << num(e.component_process_std)
    << "\nfex_std_fraction = " << num(c.fex_std_fraction)
    << "\ncomponent_std_fraction = " << num(c.component_std_fraction)
    << "\npower_threshold = " << num(e.power_threshold) << "\nmeasurement_noise = " << num(e.measurement_noise)
    << "\nmax_step = " << num(e.max_step) << "\nwater_velocity = " << (e.estimate_water_velocity ? "true" : "false")
    << "\nwater_velocity_delay = " << num(e.water_velocity_delay)
    << "\nwater_velocity_limit = " << num(e.water_velocity_limit) << "\n\n";
  o << "[sim]\ndt = " << num(c.sim.dt) << "\nduration = " << num(c.sim.duration)
    << "\nmeasurement_rate = " << num(c.sim.measurement_rate) << "\nnoise_position = " << num(c.sim.noise_position)
    << "\nnoise_velocity = " << num(c.sim.noise_velocity) << "\ninitial_heave = " << num(c.sim.initial_heave)
    << "\ninitial_velocity = " << num(c.sim.initial_velocity)
    << "\ncalibration_duration = " << num(c.calibration_duration) << "\n\n";
  std::string methods;
  for (std::size_t i = 0; i < c.sweep_methods.size(); ++i) {
    methods += (i ? "," : "") + to_string(c.sweep_methods[i]);
  }
  o << "[sweep]\nkind = " << to_string(c.sweep) << "\nvalues = " << join(c.sweep_values) << "\nmethods = " << methods
    << "\n\n";
  o << "[output]\ndir = " << c.output_dir.string() << "\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << o.str();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> out;
  const auto capture = [&](const std::string& section, auto&& fn) {
    try {
      fn();
    } catch (const Error& err) {
      std::string msg = err.what();
      if (msg.rfind("FloatParams.", 0) == 0) msg = msg.substr(12);
      if (msg.rfind(section + ".", 0) == 0) msg = msg.substr(section.size() + 1);
      out.push_back(section + "." + msg);
    }
  };
  capture("float", [&] { params.validate(); });

  if (!hydro_path.empty()) {
    if (!std::filesystem::is_regular_file(hydro_path)) {
      out.push_back("hydro.source: file not found: " + hydro_path.string());
    } else {
      capture("hydro", [&] { load_bem_table(hydro_path); });
    }
  } else {
    check(out, grid.omega_min > 0 && grid.omega_max > grid.omega_min, "hydro.omega_min/omega_max",
          "0 < omega_min < omega_max");
    check(out, grid.n >= 16, "hydro.points", ">= 16");
    check(out, shape.peak_frequency > 0, "hydro.peak_frequency", "> 0");
    check(out, shape.peak_damping >= 0, "hydro.peak_damping", ">= 0");
    check(out, shape.excitation_delay >= 0, "hydro.excitation_delay", ">= 0");
    check(out, shape.added_mass_excess >= 0, "hydro.added_mass_excess", ">= 0");
  }

  check(out, truth_order >= 1 && truth_order <= 6, "radiation.order", "in 1..6");
  check(out, filter_order >= 1 && filter_order <= 6, "radiation.filter_order", "in 1..6");
  check(out, radiation_irf.dt > 0, "radiation.irf_dt", "> 0");
  check(out, radiation_irf.duration > radiation_irf.dt, "radiation.irf_duration", "> irf_dt");
  check(out, excitation_irf_dt > 0, "excitation.irf_dt", "> 0");
  check(out, excitation_half_width > excitation_irf_dt, "excitation.half_width", "> irf_dt");

  if (wave_mode == WaveMode::single) {
    check(out, hs >= 0, "wave.hs", ">= 0");
    check(out, tp > 0, "wave.tp", "> 0");
  } else {
    capture("wave", [&] { select_runs(runs); });
  }
  check(out, wave_components >= 1, "wave.components", ">= 1");

  check(out, estimator.n_components >= 1, "estimator.components", ">= 1");
  check(out, estimator.fex_process_std >= 0, "estimator.fex_process_std", ">= 0 (0 selects the fraction)");
  check(out, estimator.component_process_std >= 0, "estimator.component_process_std",
        ">= 0 (0 selects the fraction)");
  check(out, fex_std_fraction >= 0, "estimator.fex_std_fraction", ">= 0");
  check(out, component_std_fraction >= 0, "estimator.component_std_fraction", ">= 0");
  check(out, estimator.power_threshold >= 0 && estimator.power_threshold < 1, "estimator.power_threshold",
        "in [0, 1)");
  check(out, estimator.measurement_noise > 0, "estimator.measurement_noise", "> 0");
  check(out, estimator.max_step >= 0, "estimator.max_step", ">= 0");
  check(out, estimator.water_velocity_delay >= 0, "estimator.water_velocity_delay", ">= 0");

  capture("sim", [&] { sim.validate(); });
  check(out, calibration_duration > 0, "sim.calibration_duration", "> 0");

  if (sweep != SweepKind::none && sweep_values.empty()) {
    out.push_back("sweep.values must list at least one value for sweep.kind = " + to_string(sweep));
  }
  for (double v : sweep_values) {
    if (sweep == SweepKind::rate) {
      const double stride = sim.measurement_rate / v;
      if (!(v > 0) || std::abs(stride - std::round(stride)) > 1e-9) {
        out.push_back("sweep.values: rate " + csv::format(v) + " Hz does not divide sim.measurement_rate");
      }
    } else if (sweep == SweepKind::order) {
      if (v != std::round(v) || v < 1 || v > 6) {
        out.push_back("sweep.values: order " + csv::format(v) + " not an integer in 1..6");
      }
    } else if (sweep == SweepKind::noise) {
      if (!(v >= 1)) out.push_back("sweep.values: noise factor " + csv::format(v) + " must be >= 1");
    }
  }
  check(out, jobs >= 1, "run.jobs", ">= 1");
  return out;
}

HydroCoeffs ExperimentConfig::coefficients() const {
  if (!hydro_path.empty()) return load_bem_table(hydro_path);
  return generate_analytic_coeffs(params, grid, shape);
}

HarnessConfig ExperimentConfig::harness() const {
  HarnessConfig h;
  h.params = params;
  h.coeffs = coefficients();
  h.truth_order = truth_order;
  h.filter_order = filter_order;
  h.radiation_irf = radiation_irf;
  h.excitation_irf_dt = excitation_irf_dt;
  h.excitation_half_width = excitation_half_width;
  h.wave_components = wave_components;
  h.sim = sim;
  h.calibration_duration = calibration_duration;
  h.estimator = estimator;
  h.fex_std_fraction = fex_std_fraction;
  h.component_std_fraction = component_std_fraction;
  h.master_seed = seed;
  h.jobs = jobs;
  return h;
}

std::vector<RunCatalogEntry> ExperimentConfig::entries() const {
  if (wave_mode == WaveMode::single) return {RunCatalogEntry{0, hs, tp}};
  return runs.empty() ? wave_catalog() : select_runs(runs);
}

std::vector<EstimatorConfig> ExperimentConfig::methods() const {
  std::vector<EstimatorConfig> out;
  if (sweep_methods.empty()) return {estimator};
  for (auto m : sweep_methods) {
    EstimatorConfig e = estimator;
    e.method = m;
    out.push_back(e);
  }
  return out;
}

}  // namespace wecest::cli
