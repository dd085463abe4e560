#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spin1/io.hpp"
#include "spin1/spectra.hpp"

namespace spin1 {

enum class SweepDiagnostic { mean_r, mean_cos_theta };

// Axis over one coupling. `path` is one of jh, jc, jz, jn (first hop) or
// jn:<distance>. `display` picks the number written to sweep.csv: re, im,
// abs, ln_im or ln_abs.
struct SweepAxis {
  std::string path;
  std::vector<cplx> values;
  std::string display = "re";
};

struct SweepSpec {
  ChainConfig base;
  SweepAxis axis1;
  SweepAxis axis2;
  SweepDiagnostic diagnostic = SweepDiagnostic::mean_r;
  int magnetization = 0;
  int momentum = 0;
  double central_fraction = 0.8;
  std::uint64_t seed = 1;  // picks the cache spot-check cell

  void validate() const;
};

// Axis "values" entries may be numbers, [re, im] pairs or "RE,IM" strings,
// or the axis may give {"linspace": [a, b, count]} or {"logspace": [a, b,
// count]} (natural log) together with an optional "scale" multiplying every
// value, e.g. [0, 1] for a purely imaginary axis.
SweepSpec sweep_spec_from_json(const json& j);
json sweep_spec_to_json(const SweepSpec& spec);

// Returns cfg with the coupling addressed by `path` set to `value`.
ChainConfig with_parameter(ChainConfig cfg, const std::string& path, cplx value);
double display_value(cplx z, const std::string& display);

struct SweepCell {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;
  std::size_t dim = 0;
  std::size_t dropped = 0;
  double wall_seconds = 0.0;
  std::string status = "ok";  // "ok" or "failed: <reason>"

  json to_json() const;
  static SweepCell from_json(const json& j);
};

struct SweepResult {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<SweepCell> cells;  // row-major
  std::size_t recomputed = 0;
  std::optional<double> cache_check_difference;
  json manifest;

  const SweepCell& at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

struct SweepOptions {
  std::filesystem::path out_dir;
  bool resume = false;
  int threads = 1;
};

// Evaluates one cell from term blocks built once per sweep.
SweepCell evaluate_cell(const SweepSpec& spec, const TermBlocks& blocks, std::size_t i, std::size_t j);
double evaluate_from_scratch(const SweepSpec& spec, std::size_t i, std::size_t j);

// Checkpoints each finished cell under out_dir/cells/ and writes
// out_dir/sweep.csv and out_dir/sweep_manifest.json. With resume set,
// cells that already have a checkpoint are loaded instead of recomputed.
SweepResult run_sweep(const SweepSpec& spec, const SweepOptions& opts);

}  // namespace spin1
