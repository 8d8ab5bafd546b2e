#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "hcwalk/cli/run.hpp"
#include "hcwalk/spectrum.hpp"

namespace hcwalk::cli {

namespace fs = std::filesystem;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "HCWALK_OUTPUT_DIR";

/// --out-dir if given, else $HCWALK_OUTPUT_DIR, else the working directory.
[[nodiscard]] inline fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

/// Relative output paths resolve against the output directory.
[[nodiscard]] inline fs::path resolve_output(const fs::path& dir, const fs::path& out) {
  return out.is_absolute() ? out : dir / out;
}

[[nodiscard]] inline fs::path sidecar_path(fs::path csv) { return csv.replace_extension(".json"); }

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

/// Writes the CSV and its JSON sidecar next to it.
inline void write_with_sidecar(const fs::path& csv, const Table& table, const Json& meta) {
  write_text(csv, to_csv(table));
  write_text(sidecar_path(csv), meta.dump(2) + "\n");
}

[[nodiscard]] inline Json spectrum_json(const SpectralReport& report) {
  auto clusters = [](const std::vector<EigenvalueCluster>& cs) {
    Json out = Json::array();
    for (const auto& c : cs) out.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}});
    return out;
  };
  Json subspaces = Json::array();
  for (const auto& s : report.subspaces)
    subspaces.push_back({{"n", s.n},
                         {"dimension", s.dimension},
                         {"expected_dimension", s.expected_dimension},
                         {"hamiltonian_eigenvalue_imag", 2.0 * report.params.omega * (report.params.d - s.n)},
                         {"hamiltonian_residual", s.hamiltonian_residual},
                         {"predicted", clusters(s.predicted)},
                         {"computed", clusters(s.computed)},
                         {"max_mismatch", s.max_mismatch},
                         {"multiplicities_match", s.multiplicities_match},
                         {"passed", s.passed()}});
  return {{"tool", "hcwalk"},
          {"version", HCWALK_VERSION},
          {"params", {{"d", report.params.d}, {"omega", report.params.omega}, {"lambda", report.params.lambda}}},
          {"tolerance", kSpectrumTolerance},
          {"total_dimension", report.total_dimension},
          {"max_mismatch", report.max_mismatch},
          {"passed", report.passed()},
          {"subspaces", subspaces}};
}

}  // namespace hcwalk::cli
