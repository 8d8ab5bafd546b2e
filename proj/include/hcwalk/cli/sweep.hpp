#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hcwalk/cli/run.hpp"

namespace hcwalk::cli {

enum class SweepAxis { Dimension, Lambda, Omega };

[[nodiscard]] inline SweepAxis parse_axis(const std::string& name) {
  if (name == "d") return SweepAxis::Dimension;
  if (name == "lambda") return SweepAxis::Lambda;
  if (name == "omega") return SweepAxis::Omega;
  throw InvalidArgument("unknown sweep axis '" + name + "' (d, lambda or omega)");
}

[[nodiscard]] inline const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Dimension: return "d";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Omega: return "omega";
  }
  return "unknown";
}

struct SweepSpec {
  RunSpec base;
  SweepAxis axis = SweepAxis::Dimension;
  std::vector<double> values;
  std::optional<double> at_time;  // report one sample per run
  bool at_hitting_time = false;   // report t = pi / (2 omega) per run
  unsigned jobs = 0;              // 0: hardware concurrency
};

/// Failure categories, in increasing severity for the exit code.
enum class FailureKind { Usage, Other, Integrator };

struct SweepFailure {
  double value = 0.0;
  FailureKind kind = FailureKind::Other;
  std::string message;
};

struct SweepResult {
  Table table;
  Json meta;
  std::vector<SweepFailure> failures;
};

namespace detail {

inline RunSpec sweep_point(const SweepSpec& sweep, double value) {
  RunSpec spec = sweep.base;
  switch (sweep.axis) {
    case SweepAxis::Dimension:
      if (value != std::floor(value) || value < 1.0) throw InvalidArgument("d values must be positive integers");
      spec.params.d = static_cast<int>(value);
      break;
    case SweepAxis::Lambda: spec.params.lambda = value; break;
    case SweepAxis::Omega: spec.params.omega = value; break;
  }
  if (sweep.at_hitting_time) {
    spec.params.validate();
    spec.times = std::vector<double>{0.0, hitting_time(spec.params)};
  } else if (sweep.at_time) {
    spec.times = *sweep.at_time > 0.0 ? std::vector<double>{0.0, *sweep.at_time} : std::vector<double>{0.0};
  }
  return spec;
}

}  // namespace detail

/// Runs the base spec once per axis value on a pool of worker threads. Each
/// run owns its state; rows are assembled afterwards in ascending axis value
/// then time, so the output does not depend on scheduling.
[[nodiscard]] inline SweepResult run_sweep(const SweepSpec& sweep) {
  if (sweep.values.empty()) throw InvalidArgument("sweep needs at least one value");
  if (sweep.at_time && sweep.at_hitting_time) throw InvalidArgument("--at-time and --at-hitting-time are exclusive");
  if (sweep.at_time && !(*sweep.at_time >= 0.0)) throw InvalidArgument("--at-time must be >= 0");
  std::vector<double> values = sweep.values;
  std::sort(values.begin(), values.end());

  struct Outcome {
    std::optional<RunResult> result;
    std::optional<SweepFailure> failure;
  };
  std::vector<Outcome> outcomes(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        outcomes[i].result = execute(detail::sweep_point(sweep, values[i]));
      } catch (const IntegratorAbort& e) {
        outcomes[i].failure = SweepFailure{values[i], FailureKind::Integrator, e.what()};
      } catch (const InvalidArgument& e) {
        outcomes[i].failure = SweepFailure{values[i], FailureKind::Usage, e.what()};
      } catch (const DimensionOverflow& e) {
        outcomes[i].failure = SweepFailure{values[i], FailureKind::Usage, e.what()};
      } catch (const std::exception& e) {
        outcomes[i].failure = SweepFailure{values[i], FailureKind::Other, e.what()};
      }
    }
  };
  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(sweep.jobs ? sweep.jobs : hw, values.size()));
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();

  SweepResult out;
  out.table.columns = sweep.base.outputs.columns();
  out.table.columns.insert(out.table.columns.begin(), axis_name(sweep.axis));
  const bool point = sweep.at_time || sweep.at_hitting_time;
  Json runs = Json::array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (outcomes[i].failure) {
      out.failures.push_back(*outcomes[i].failure);
      continue;
    }
    const RunResult& r = *outcomes[i].result;
    const auto& rows = r.table.rows;
    for (std::size_t k = point ? rows.size() - 1 : 0; k < rows.size(); ++k) {
      std::vector<double> row{values[i]};
      row.insert(row.end(), rows[k].begin(), rows[k].end());
      out.table.rows.push_back(std::move(row));
    }
    runs.push_back(r.meta);
  }

  out.meta = {{"tool", "hcwalk"},
              {"version", HCWALK_VERSION},
              {"model", model_name(sweep.base.model)},
              {"axis", axis_name(sweep.axis)},
              {"values", values},
              {"columns", out.table.columns},
              {"runs", runs}};
  if (sweep.at_hitting_time) out.meta["report"] = "hitting time pi/(2 omega)";
  else if (sweep.at_time) out.meta["report"] = *sweep.at_time;
  else out.meta["report"] = "full grid";
  Json failures = Json::array();
  for (const auto& f : out.failures) failures.push_back({{"value", f.value}, {"error", f.message}});
  out.meta["failures"] = failures;
  return out;
}

}  // namespace hcwalk::cli
