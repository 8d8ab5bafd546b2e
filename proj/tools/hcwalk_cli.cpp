// hcwalk: command-line front end for the hypercube walk library.
//
// Every option lives on the top-level app and falls through from the
// subcommands, so a --config file of plain key=value lines applies to any
// subcommand. Exit codes: 0 success, 1 runtime failure, 2 usage or invalid
// parameters, 3 integrator abort.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcwalk/cli/figures.hpp"
#include "hcwalk/cli/io.hpp"
#include "hcwalk/cli/run.hpp"
#include "hcwalk/cli/sweep.hpp"
#include "hcwalk/spectrum.hpp"

namespace {

using namespace hcwalk;
using namespace hcwalk::cli;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIntegrator = 3;

struct Options {
  std::string model = "vertex-numeric";
  int d = 1;
  double omega = 1.0;
  double lambda = 0.0;
  std::optional<double> t_max;
  std::optional<double> dt_sample;
  std::vector<std::string> outputs{"hitting"};
  double dt = 1e-3;
  double trace_tolerance = 1e-9;
  std::optional<std::string> method;

  std::string family = "vertex";
  double step = 1e-2;
  std::optional<double> p;

  double t1 = kInfiniteTime;
  double tphi = kInfiniteTime;
  std::string noise = "independent";
  std::string coupling;
  std::optional<long> source;
  std::optional<long> target;
  bool rescale = false;

  std::string out;
  std::string out_dir;

  int figure = 0;
  std::optional<std::vector<int>> dims;

  std::string axis = "d";
  std::vector<double> values;
  std::optional<double> at_time;
  bool at_hitting_time = false;
  unsigned jobs = 0;
};

RunSpec make_spec(const Options& o, Model model) {
  RunSpec spec;
  spec.model = model;
  spec.params = {o.d, o.omega, o.lambda};
  spec.t_max = o.t_max.value_or(10.0);
  spec.dt_sample = o.dt_sample.value_or(0.05);
  spec.outputs = OutputSet::parse(o.outputs);
  spec.dt = o.dt;
  spec.trace_tolerance = o.trace_tolerance;
  if (o.method) spec.method = parse_method(*o.method);
  spec.discrete = {o.family, o.step, o.p};
  spec.network.t1 = o.t1;
  spec.network.tphi = o.tphi;
  spec.network.coupling_path = o.coupling;
  if (o.source) spec.network.source = *o.source;
  if (o.target) spec.network.target = *o.target;
  spec.network.rescale = o.rescale;
  return spec;
}

void print_warnings(const Json& meta) {
  if (meta.contains("warnings"))
    for (const auto& w : meta["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
}

int do_run(const Options& o, Model model, const std::string& default_name) {
  const RunResult r = execute(make_spec(o, model));
  print_warnings(r.meta);
  const fs::path path = resolve_output(output_dir(o.out_dir), o.out.empty() ? default_name : o.out);
  write_with_sidecar(path, r.table, r.meta);
  std::cout << path.string() << '\n';
  return 0;
}

int do_figure(const Options& o) {
  FigureOptions fo;
  fo.dims = o.dims;
  fo.t_max = o.t_max;
  fo.dt_sample = o.dt_sample;
  fo.dt = o.dt;
  const fs::path dir = output_dir(o.out_dir);
  for (const FigureFile& f : reproduce_figure(o.figure, fo)) {
    print_warnings(f.meta);
    write_with_sidecar(dir / f.name, f.table, f.meta);
    std::cout << (dir / f.name).string() << '\n';
  }
  return 0;
}

int do_sweep(const Options& o) {
  SweepSpec sweep;
  sweep.base = make_spec(o, parse_model(o.model));
  sweep.axis = parse_axis(o.axis);
  sweep.values = o.values;
  sweep.at_time = o.at_time;
  sweep.at_hitting_time = o.at_hitting_time;
  sweep.jobs = o.jobs;
  const SweepResult r = run_sweep(sweep);
  const std::string name = std::string("sweep_") + axis_name(sweep.axis) + ".csv";
  const fs::path path = resolve_output(output_dir(o.out_dir), o.out.empty() ? name : o.out);
  write_with_sidecar(path, r.table, r.meta);
  std::cout << path.string() << '\n';
  int code = 0;
  for (const auto& f : r.failures) {
    std::cerr << "error: " << axis_name(sweep.axis) << '=' << format_value(f.value) << ": " << f.message << '\n';
    const int c = f.kind == FailureKind::Integrator ? kExitIntegrator
                  : f.kind == FailureKind::Usage    ? kExitUsage
                                                    : kExitFailure;
    if (code == 0 || c == kExitIntegrator) code = c;
  }
  return code;
}

int do_spectrum(const Options& o) {
  const SpectralReport report = verify_perturbative_spectrum({o.d, o.omega, o.lambda});
  const std::string text = spectrum_json(report).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    const fs::path path = resolve_output(output_dir(o.out_dir), o.out);
    write_text(path, text);
    std::cout << path.string() << '\n';
  }
  if (!report.passed()) {
    std::cerr << "error: spectral prediction not confirmed (max mismatch " << format_value(report.max_mismatch)
              << ")\n";
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence in continuous-time quantum walks on the hypercube", "hcwalk"};
  app.set_version_flag("--version", HCWALK_VERSION);
  app.set_config("--config", "", "Read options from a file of key=value lines (flags override it)");
  app.fallthrough();
  app.require_subcommand(1);
  Options o;

  auto* walk = app.add_option_group("Walk");
  walk->add_option("--model", o.model,
                   "unitary, vertex-perturbative, vertex-numeric, subspace-closed, subspace-numeric, "
                   "discrete-measured, network-independent, network-collective")
      ->capture_default_str();
  walk->add_option("--d", o.d, "Hypercube dimension")->capture_default_str();
  walk->add_option("--omega", o.omega, "Hopping rate")->capture_default_str();
  walk->add_option("--lambda", o.lambda, "Decoherence rate")->capture_default_str();

  auto* grid = app.add_option_group("Sampling");
  grid->add_option("--t-max", o.t_max, "Last sample time (default 10; figures use their own)");
  grid->add_option("--dt-sample", o.dt_sample, "Sample spacing (default 0.05; figures use their own)");
  grid->add_option("--outputs", o.outputs, "Comma list of hitting, entropy, diagnostics, ground")
      ->delimiter(',')
      ->capture_default_str();

  auto* integ = app.add_option_group("Integrator");
  integ->add_option("--dt", o.dt, "Internal step")->capture_default_str();
  integ->add_option("--trace-tolerance", o.trace_tolerance, "Abort when |tr(rho) - 1| exceeds this")
      ->capture_default_str();
  integ->add_option("--method", o.method, "split or rk4 (default split; rk4 for networks)");

  auto* disc = app.add_option_group("Discrete process");
  disc->add_option("--family", o.family, "Measurement family: vertex or subspace")->capture_default_str();
  disc->add_option("--step", o.step, "Discrete time step")->capture_default_str();
  disc->add_option("--p", o.p, "Measurement probability per step (default lambda * step)");

  auto* net = app.add_option_group("Network");
  net->add_option("--t1", o.t1, "Amplitude damping time (inf allowed)")->capture_default_str();
  net->add_option("--tphi", o.tphi, "Dephasing time (inf allowed)")->capture_default_str();
  net->add_option("--noise", o.noise, "independent or collective (network subcommand)")->capture_default_str();
  net->add_option("--coupling", o.coupling, "CSV coupling matrix (default: hypercube from --d, --omega)");
  net->add_option("--source", o.source, "Initially excited node (default 0)");
  net->add_option("--target", o.target, "Reported node (default N-1)");
  net->add_flag("--rescale", o.rescale, "Multiply the excited block by exp(t/T1)");

  auto* out = app.add_option_group("Output");
  out->add_option("--out", o.out, "Output file (relative paths resolve against the output directory)");
  out->add_option("--out-dir", o.out_dir, std::string("Output directory (default $") + kOutputDirEnv + " or .)");

  auto* fig = app.add_option_group("Figures");
  fig->add_option("--figure", o.figure, "Figure id 1-4");
  fig->add_option("--dims", o.dims, "Dimensions to emit")->delimiter(',');

  auto* sw = app.add_option_group("Sweep");
  sw->add_option("--axis", o.axis, "d, lambda or omega")->capture_default_str();
  sw->add_option("--values", o.values, "Comma list of axis values")->delimiter(',');
  sw->add_option("--at-time", o.at_time, "Report only this time per run");
  sw->add_flag("--at-hitting-time", o.at_hitting_time, "Report only t = pi/(2 omega) per run");
  sw->add_option("--jobs", o.jobs, "Worker threads (0: all cores)")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run one model and write <out>.csv plus a JSON sidecar");
  auto* figure = app.add_subcommand("reproduce-figure", "Write the curves of figure --figure");
  auto* sweep = app.add_subcommand("sweep", "Repeat a run over --axis/--values");
  auto* spectrum = app.add_subcommand("spectrum", "Check the perturbative decay rates against the exact spectrum");
  auto* network = app.add_subcommand("network", "Qubit-network run (--noise independent|collective)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) {
      const Model model = parse_model(o.model);
      return do_run(o, model, std::string(model_name(model)) + ".csv");
    }
    if (figure->parsed()) return do_figure(o);
    if (sweep->parsed()) return do_sweep(o);
    if (spectrum->parsed()) return do_spectrum(o);
    if (network->parsed()) {
      if (o.noise != "independent" && o.noise != "collective")
        throw InvalidArgument("--noise must be independent or collective");
      const Model model = o.noise == "collective" ? Model::NetworkCollective : Model::NetworkIndependent;
      return do_run(o, model, std::string(model_name(model)) + ".csv");
    }
  } catch (const IntegratorAbort& e) {
    const Diagnostics& d = e.diagnostics();
    std::cerr << "integrator abort: " << e.what() << "\n  trace_deviation=" << format_value(d.trace_deviation)
              << " hermiticity_deviation=" << format_value(d.hermiticity_deviation)
              << " min_eigenvalue=" << format_value(d.min_eigenvalue) << '\n';
    return kExitIntegrator;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionOverflow& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
