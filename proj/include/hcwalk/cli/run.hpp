#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hcwalk/cli/table.hpp"
#include "hcwalk/closed_form.hpp"
#include "hcwalk/discrete_process.hpp"
#include "hcwalk/dynamics.hpp"
#include "hcwalk/qubit_network.hpp"

#ifndef HCWALK_VERSION
#define HCWALK_VERSION "unknown"
#endif

namespace hcwalk::cli {

using Json = nlohmann::json;

enum class Model {
  Unitary,
  VertexPerturbative,
  VertexNumeric,
  SubspaceClosed,
  SubspaceNumeric,
  DiscreteMeasured,
  NetworkIndependent,
  NetworkCollective
};

inline constexpr std::array<std::pair<const char*, Model>, 8> kModels{{
    {"unitary", Model::Unitary},
    {"vertex-perturbative", Model::VertexPerturbative},
    {"vertex-numeric", Model::VertexNumeric},
    {"subspace-closed", Model::SubspaceClosed},
    {"subspace-numeric", Model::SubspaceNumeric},
    {"discrete-measured", Model::DiscreteMeasured},
    {"network-independent", Model::NetworkIndependent},
    {"network-collective", Model::NetworkCollective},
}};

[[nodiscard]] inline const char* model_name(Model m) {
  for (const auto& [name, model] : kModels)
    if (model == m) return name;
  return "unknown";
}

[[nodiscard]] inline Model parse_model(const std::string& name) {
  for (const auto& [key, model] : kModels)
    if (name == key) return model;
  throw InvalidArgument("unknown model '" + name + "'");
}

[[nodiscard]] inline bool is_closed_form(Model m) {
  return m == Model::Unitary || m == Model::VertexPerturbative || m == Model::SubspaceClosed;
}

[[nodiscard]] inline bool is_network(Model m) {
  return m == Model::NetworkIndependent || m == Model::NetworkCollective;
}

[[nodiscard]] inline IntegrationMethod parse_method(const std::string& name) {
  if (name == "split" || name == "split-operator") return IntegrationMethod::SplitOperator;
  if (name == "rk4") return IntegrationMethod::RungeKutta4;
  throw InvalidArgument("unknown integration method '" + name + "' (split or rk4)");
}

struct OutputSet {
  bool hitting = true;
  bool entropy = false;
  bool diagnostics = false;
  bool ground = false;  // network models only

  [[nodiscard]] static OutputSet parse(const std::vector<std::string>& names) {
    OutputSet out{false, false, false, false};
    for (const auto& n : names) {
      if (n == "hitting") out.hitting = true;
      else if (n == "entropy") out.entropy = true;
      else if (n == "diagnostics") out.diagnostics = true;
      else if (n == "ground") out.ground = true;
      else throw InvalidArgument("unknown output '" + n + "' (hitting, entropy, diagnostics, ground)");
    }
    if (!out.hitting && !out.entropy && !out.diagnostics && !out.ground)
      throw InvalidArgument("no outputs requested");
    return out;
  }

  [[nodiscard]] std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (hitting) out.emplace_back("hitting");
    if (ground) out.emplace_back("ground");
    if (entropy) out.emplace_back("entropy");
    if (diagnostics) out.emplace_back("diagnostics");
    return out;
  }

  [[nodiscard]] std::vector<std::string> columns() const {
    std::vector<std::string> out{"t"};
    if (hitting) out.emplace_back("hitting");
    if (ground) out.emplace_back("ground");
    if (entropy) out.emplace_back("entropy");
    if (diagnostics) {
      out.emplace_back("trace_deviation");
      out.emplace_back("hermiticity_deviation");
      out.emplace_back("min_eigenvalue");
    }
    return out;
  }
};

struct DiscreteOptions {
  std::string family = "vertex";
  double step = 1e-2;
  std::optional<double> p;  // defaults to lambda * step
};

struct NetworkOptions {
  double t1 = kInfiniteTime;
  double tphi = kInfiniteTime;
  std::string coupling_path;  // empty: hypercube coupling from d and omega
  std::optional<Eigen::Index> source;
  std::optional<Eigen::Index> target;
  bool rescale = false;
};

struct RunSpec {
  Model model = Model::VertexNumeric;
  WalkParams params{1, 1.0, 0.0};
  double t_max = 10.0;
  double dt_sample = 0.05;
  std::optional<std::vector<double>> times;  // replaces the uniform grid when set
  OutputSet outputs;
  double dt = 1e-3;
  double trace_tolerance = 1e-9;
  std::optional<IntegrationMethod> method;
  DiscreteOptions discrete;
  NetworkOptions network;
};

struct RunResult {
  Table table;
  Json meta;
};

namespace detail {

inline Json time_constant(double t) { return std::isfinite(t) ? Json(t) : Json("inf"); }

inline Json integrator_json(const IntegratorConfig& c) {
  return {{"dt", c.dt}, {"method", to_string(c.method)}, {"trace_tolerance", c.trace_tolerance}};
}

struct Sample {
  double hitting = 0.0;
  double ground = 0.0;
  double entropy = 0.0;
  Diagnostics diagnostics;
};

inline void append(Table& table, const OutputSet& outputs, double t, const Sample& s, bool check_range) {
  if (outputs.hitting && check_range && (s.hitting < -kHittingSlack || s.hitting > 1.0 + kHittingSlack))
    throw IntegratorAbort("hitting probability left [0, 1]", t, s.diagnostics);
  std::vector<double> row{t};
  if (outputs.hitting) row.push_back(s.hitting);
  if (outputs.ground) row.push_back(s.ground);
  if (outputs.entropy) row.push_back(s.entropy);
  if (outputs.diagnostics) {
    row.push_back(s.diagnostics.trace_deviation);
    row.push_back(s.diagnostics.hermiticity_deviation);
    row.push_back(s.diagnostics.min_eigenvalue);
  }
  table.rows.push_back(std::move(row));
}

inline std::vector<double> sample_times(const RunSpec& spec) {
  if (spec.times) {
    hcwalk::detail::check_time_grid(*spec.times);
    return *spec.times;
  }
  if (!(spec.t_max > 0.0)) throw InvalidArgument("--t-max must be > 0");
  if (!(spec.dt_sample > 0.0)) throw InvalidArgument("--dt-sample must be > 0");
  return uniform_grid(spec.t_max, spec.dt_sample);
}

inline void run_closed_form(const RunSpec& spec, const std::vector<double>& grid, RunResult& r) {
  const WalkParams& p = spec.params;
  bool check = true;
  switch (spec.model) {
    case Model::Unitary:
      if (p.lambda != 0.0) throw InvalidArgument("the unitary model takes no decoherence rate");
      break;
    case Model::VertexPerturbative: {
      const bool valid = perturbative_valid(p);
      r.meta["flags"]["perturbative_valid"] = valid;
      // Outside the regime the series may leave [0, 1]; it is reported as is.
      check = valid;
      if (!valid)
        r.meta["warnings"].push_back("lambda/omega exceeds " + format_value(kPerturbativeValidityRatio) +
                                     "; the perturbative series is outside its validity regime");
      break;
    }
    case Model::SubspaceClosed:
      r.meta["flags"]["subspace_regime"] = to_string(subspace_regime(p));
      break;
    default:
      break;
  }
  std::optional<PerturbativeSeries> series;
  if (spec.model == Model::VertexPerturbative) series.emplace(p);
  for (const double t : grid) {
    Sample s;
    if (spec.model == Model::Unitary) s.hitting = unitary_hitting(p, t);
    else if (series) s.hitting = series->evaluate(t);
    else s.hitting = subspace_hitting(p, t);
    append(r.table, spec.outputs, t, s, check);
  }
}

inline void run_walk(const RunSpec& spec, const std::vector<double>& grid, RunResult& r) {
  const WalkParams& p = spec.params;
  const ModelKind kind = spec.model == Model::VertexNumeric ? ModelKind::Vertex : ModelKind::Subspace;
  const IntegratorConfig config(p, spec.dt, spec.method.value_or(IntegrationMethod::SplitOperator),
                                spec.trace_tolerance);
  r.meta["integrator"] = integrator_json(config);
  if (kind == ModelKind::Subspace) r.meta["flags"]["subspace_regime"] = to_string(subspace_regime(p));
  Observables obs;
  obs.entropy = spec.outputs.entropy;
  obs.diagnostics = spec.outputs.diagnostics;
  const Trajectory tr = evolve(DensityMatrix::vertex(p.d, corner_start()), p, kind, config, grid, obs);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    Sample s;
    s.hitting = tr.hitting[i];
    if (obs.entropy) s.entropy = tr.entropy[i];
    if (obs.diagnostics) s.diagnostics = tr.diagnostics[i];
    append(r.table, spec.outputs, tr.times[i], s, true);
  }
}

inline void run_discrete(const RunSpec& spec, const std::vector<double>& grid, RunResult& r) {
  const WalkParams& p = spec.params;
  const auto& opt = spec.discrete;
  MeasurementFamily family = [&] {
    if (opt.family == "vertex") return MeasurementFamily::vertex(p.d);
    if (opt.family == "subspace") return MeasurementFamily::subspace(p.d);
    throw InvalidArgument("unknown measurement family '" + opt.family + "' (vertex or subspace)");
  }();
  const double prob = opt.p.value_or(p.lambda * opt.step);
  r.meta["discrete"] = {{"family", opt.family},
                        {"step", opt.step},
                        {"p", prob},
                        {"measurement_count", family.measurement_count()}};
  Observables obs;
  obs.entropy = spec.outputs.entropy;
  obs.diagnostics = spec.outputs.diagnostics;
  const DiscreteTrajectory tr =
      evolve_discrete(DensityMatrix::vertex(p.d, corner_start()), p, family, opt.step, prob, grid, obs);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    Sample s;
    s.hitting = tr.hitting[i];
    if (obs.entropy) s.entropy = tr.entropy[i];
    if (obs.diagnostics) s.diagnostics = tr.diagnostics[i];
    append(r.table, spec.outputs, tr.times[i], s, true);
  }
}

inline void run_network(const RunSpec& spec, const std::vector<double>& grid, RunResult& r) {
  const auto& opt = spec.network;
  const bool collective = spec.model == Model::NetworkCollective;
  const CouplingMatrix coupling = opt.coupling_path.empty() ? hypercube_coupling(spec.params.d, spec.params.omega)
                                                            : load_coupling_csv(opt.coupling_path);
  const Eigen::Index n = coupling.size();
  const Eigen::Index source = opt.source.value_or(0);
  const Eigen::Index target = opt.target.value_or(n - 1);
  if (source < 0 || source >= n || target < 0 || target >= n)
    throw InvalidArgument("source and target must be network nodes in [0, " + std::to_string(n) + ")");
  const NoiseParams noise{opt.t1, opt.tphi, collective ? NoiseKind::Collective : NoiseKind::Independent};
  IntegratorConfig config = network_default_config(spec.dt);
  config.trace_tolerance = spec.trace_tolerance;
  if (spec.method) config.method = *spec.method;

  r.meta["network"] = {{"nodes", n},
                       {"coupling", opt.coupling_path.empty() ? Json("hypercube") : Json(opt.coupling_path)},
                       {"noise", collective ? "collective" : "independent"},
                       {"t1", time_constant(opt.t1)},
                       {"tphi", time_constant(opt.tphi)},
                       {"equivalent_lambda", std::isfinite(opt.tphi) ? 2.0 / opt.tphi : 0.0},
                       {"source", source},
                       {"target", target},
                       {"rescaled", opt.rescale}};
  r.meta["integrator"] = integrator_json(config);
  if (!opt.coupling_path.empty()) r.meta.erase("params");

  const ExcitationState start = ExcitationState::excited(n, source);
  NetworkTrajectory traj = collective ? evolve_collective(start, coupling, noise, grid, config)
                                      : evolve_independent(start, coupling, noise, grid, config);
  if (opt.rescale) traj = rescale_excited_block(std::move(traj), opt.t1);

  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ExcitationState& st = traj.states[i];
    Sample s;
    s.hitting = st.block(target, target).real();
    s.ground = st.ground;
    if (spec.outputs.entropy)
      s.entropy = opt.rescale ? entropy_from_eigenvalues(hcwalk::detail::hermitian_eigenvalues(st.block))
                              : network_entropy(st);
    if (spec.outputs.diagnostics) {
      ComplexMatrix full = ComplexMatrix::Zero(n + 1, n + 1);
      full(0, 0) = st.ground;
      full.bottomRightCorner(n, n) = st.block;
      s.diagnostics = diagnose(full);
    }
    append(r.table, spec.outputs, traj.times[i], s, true);
  }
}

}  // namespace detail

/// Metadata shared by every output: tool, model, parameters and grid.
[[nodiscard]] inline Json base_metadata(const RunSpec& spec, const std::vector<double>& grid) {
  Json meta;
  meta["tool"] = "hcwalk";
  meta["version"] = HCWALK_VERSION;
  meta["model"] = model_name(spec.model);
  meta["params"] = {{"d", spec.params.d}, {"omega", spec.params.omega}, {"lambda", spec.params.lambda}};
  meta["outputs"] = spec.outputs.names();
  meta["grid"] = {{"samples", grid.size()}, {"t_first", grid.front()}, {"t_last", grid.back()}};
  if (!spec.times) {
    meta["grid"]["t_max"] = spec.t_max;
    meta["grid"]["dt_sample"] = spec.dt_sample;
  }
  meta["flags"] = Json::object();
  meta["warnings"] = Json::array();
  return meta;
}

/// Runs one model over its time grid and returns the table plus metadata.
[[nodiscard]] inline RunResult execute(const RunSpec& spec) {
  if (!is_network(spec.model) || spec.network.coupling_path.empty()) spec.params.validate();
  if (is_closed_form(spec.model) && (spec.outputs.entropy || spec.outputs.diagnostics))
    throw InvalidArgument(std::string(model_name(spec.model)) + " is a closed form and reports hitting only");
  if (spec.outputs.ground && !is_network(spec.model))
    throw InvalidArgument("the ground output exists only for network models");
  const std::vector<double> grid = detail::sample_times(spec);

  RunResult r;
  r.table.columns = spec.outputs.columns();
  r.meta = base_metadata(spec, grid);
  r.meta["columns"] = r.table.columns;
  if (is_closed_form(spec.model)) detail::run_closed_form(spec, grid, r);
  else if (spec.model == Model::DiscreteMeasured) detail::run_discrete(spec, grid, r);
  else if (is_network(spec.model)) detail::run_network(spec, grid, r);
  else detail::run_walk(spec, grid, r);
  return r;
}

}  // namespace hcwalk::cli
