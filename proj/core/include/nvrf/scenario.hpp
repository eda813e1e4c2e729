#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "field_geometry.hpp"
#include "pulse_compiler.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nvrf {

struct Table
{
  std::string name;
  std::vector<std::string> columns; ///< "name_unit"
  std::vector<std::vector<double>> data; ///< one vector per column
};

struct NamedMap
{
  std::string name;
  FieldMap map;
};

struct Provenance
{
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string experiment;
};

struct RunResult
{
  Experiment kind{};
  std::vector<Table> tables;
  std::vector<NamedMap> maps;
  std::vector<std::pair<std::string, FitResult>> fits;
  std::vector<std::pair<std::string, std::string>> report; ///< key = value lines
  std::optional<WaveformIQ> waveform;
  Provenance provenance;

  Table const *table(std::string const &name) const;
  NamedMap const *map(std::string const &name) const;
  std::string const *report_value(std::string const &key) const;
};

std::string tool_version();

/// Validates, dispatches on config.kind, and stamps provenance.
RunResult run_scenario(ScenarioConfig const &config);

// Pipelines, exposed for tests.
RunResult run_odmr(ScenarioConfig const &c);
RunResult run_rabi(ScenarioConfig const &c);
RunResult run_hahn(ScenarioConfig const &c);
RunResult run_id_sweep(ScenarioConfig const &c);
RunResult run_xy8_sweep(ScenarioConfig const &c);
RunResult run_xy8_image(ScenarioConfig const &c);
RunResult run_compile_waveform(ScenarioConfig const &c);

/// Single noisy field trace of the xy8 sweep; repeat k uses its own streams.
SweepCurve xy8_sweep_trace(ScenarioConfig const &c, int repeat);

/// Predicted per-binned-pixel field noise of the xy8-image pipeline at field b.
double image_pixel_sigma(ScenarioConfig const &c, double b);

/// Ground-truth NV-projected field averaged over each binned pixel.
FieldMap image_ground_truth(ScenarioConfig const &c);

} // namespace nvrf
