#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hcwalk/cli/run.hpp"

namespace hcwalk::cli {

/// Caption parameters shared by all four figures.
inline constexpr double kFigureOmega = 1.0;
inline constexpr double kFigureLambda = 0.2;

struct FigureOptions {
  std::optional<std::vector<int>> dims;
  std::optional<double> t_max;
  std::optional<double> dt_sample;
  double dt = 1e-3;
};

struct FigureFile {
  std::string name;
  Table table;
  Json meta;
};

namespace detail {

inline std::vector<int> figure_dims(const FigureOptions& opt, std::vector<int> fallback) {
  std::vector<int> dims = opt.dims.value_or(std::move(fallback));
  if (dims.empty()) throw InvalidArgument("--dims is empty");
  return dims;
}

// One CSV per dimension from a plain run of the given model.
inline std::vector<FigureFile> per_dimension(int id, Model model, const FigureOptions& opt, double t_max_default,
                                             double dt_sample_default) {
  std::vector<FigureFile> files;
  for (const int d : figure_dims(opt, {1, 4, 10})) {
    RunSpec spec;
    spec.model = model;
    spec.params = {d, kFigureOmega, kFigureLambda};
    spec.t_max = opt.t_max.value_or(t_max_default);
    spec.dt_sample = opt.dt_sample.value_or(dt_sample_default);
    spec.dt = opt.dt;
    RunResult run = execute(spec);
    run.meta["figure"] = id;
    files.push_back({"fig" + std::to_string(id) + "_d" + std::to_string(d) + ".csv", std::move(run.table),
                     std::move(run.meta)});
  }
  return files;
}

inline FigureFile hitting_time_table(const FigureOptions& opt) {
  const std::vector<int> dims = figure_dims(opt, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const double t = hitting_time({1, kFigureOmega, kFigureLambda});
  FigureFile file{"fig3.csv", {{"d", "p_v", "p_s", "bound"}, {}}, {}};
  for (const int d : dims) {
    const WalkParams p{d, kFigureOmega, kFigureLambda};
    p.validate();
    file.table.rows.push_back({static_cast<double>(d), vertex_hitting_perturbative(p, t), subspace_hitting(p, t),
                               vertex_hitting_lower_bound(p, t)});
  }
  file.meta = {{"tool", "hcwalk"},
               {"version", HCWALK_VERSION},
               {"figure", 3},
               {"columns", file.table.columns},
               {"params", {{"omega", kFigureOmega}, {"lambda", kFigureLambda}}},
               {"hitting_time", t},
               {"dims", dims},
               {"models", {{"p_v", "vertex-perturbative"}, {"p_s", "subspace-closed"}, {"bound", "exp(-lambda T)"}}}};
  return file;
}

inline std::vector<FigureFile> entropy_figure(const FigureOptions& opt) {
  const double t_max = opt.t_max.value_or(12.0);
  const double dt_sample = opt.dt_sample.value_or(0.05);
  std::vector<FigureFile> files;
  for (const int d : figure_dims(opt, {1, 4, 10})) {
    RunSpec spec;
    spec.model = Model::VertexNumeric;
    spec.params = {d, kFigureOmega, kFigureLambda};
    spec.t_max = t_max;
    spec.dt_sample = dt_sample;
    spec.dt = opt.dt;
    spec.outputs = OutputSet{false, true, false, false};
    RunResult run = execute(spec);
    Table scaled{{"t", "entropy_per_d"}, {}};
    for (const auto& row : run.table.rows) scaled.rows.push_back({row[0], row[1] / d});
    run.meta["figure"] = 4;
    run.meta["columns"] = scaled.columns;
    run.meta["scaling"] = "entropy divided by d";
    files.push_back({"fig4_d" + std::to_string(d) + ".csv", std::move(scaled), std::move(run.meta)});
  }
  const std::vector<double> grid = uniform_grid(t_max, dt_sample);
  FigureFile ref{"fig4_reference.csv", {{"t", "reference"}, {}}, {}};
  for (const double t : grid) ref.table.rows.push_back({t, 1.0 - std::exp(-kFigureLambda * t)});
  ref.meta = {{"tool", "hcwalk"},
              {"version", HCWALK_VERSION},
              {"figure", 4},
              {"columns", ref.table.columns},
              {"curve", "1 - exp(-lambda t)"},
              {"params", {{"lambda", kFigureLambda}}},
              {"grid", {{"t_max", t_max}, {"dt_sample", dt_sample}, {"samples", grid.size()}}}};
  files.push_back(std::move(ref));
  return files;
}

}  // namespace detail

/// Curves for one of the four figures (omega = 1, lambda = 1/5).
///   1: perturbative vertex-model hitting, d = 1, 4, 10, t in [0, 10]
///   2: exact subspace-model hitting, same dimensions and range
///   3: P_v(T), P_s(T) and exp(-lambda T) at T = pi/2 for d = 1..10
///   4: numerical vertex-model entropy / d for d = 1, 4, 10, t in [0, 12],
///      plus the curve 1 - exp(-lambda t)
[[nodiscard]] inline std::vector<FigureFile> reproduce_figure(int id, const FigureOptions& opt = {}) {
  switch (id) {
    case 1: return detail::per_dimension(1, Model::VertexPerturbative, opt, 10.0, 0.02);
    case 2: return detail::per_dimension(2, Model::SubspaceClosed, opt, 10.0, 0.02);
    case 3: return {detail::hitting_time_table(opt)};
    case 4: return detail::entropy_figure(opt);
    default: throw InvalidArgument("figure id must be 1, 2, 3 or 4");
  }
}

}  // namespace hcwalk::cli
