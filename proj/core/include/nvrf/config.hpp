#pragma once

#include "camera.hpp"
#include "field_geometry.hpp"
#include "physical_model.hpp"
#include "pulse_compiler.hpp"
#include "spin_dynamics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace nvrf {

enum class Experiment
{
  odmr,
  rabi,
  hahn_sweep,
  id_sweep,
  xy8_sweep,
  xy8_image,
  compile_waveform
};

std::string_view experiment_name(Experiment e);
/// Accepts CLI verbs and config spellings ("hahn", "hahn-sweep", ...).
std::optional<Experiment> parse_experiment(std::string_view s);

struct OdmrBlock
{
  double freq_start = 2.750e9;
  double freq_stop = 2.765e9;
  int points = 1501;
  double linewidth_lower = 0.31e6;
  double linewidth_upper = 0.34e6;
};

struct SequenceBlock
{
  int n_reps = 16;
  double t_pi = 12.5e-9;
  double tau = 26e-9;
  Envelope envelope = Envelope::cosine_square;
  double sample_rate = 1e9;
  double full_scale_rabi = 100e6;
  double readout_phase = 0;
  double rabi_frequency = 40e6; ///< drive used by the rabi experiment
};

struct SweepBlock
{
  double tau_start = 20e-9;
  double tau_stop = 32e-9;
  double tau_step = 100e-12;
  int region_pixels = 32; ///< probe region edge in raw pixels
  int repeats = 1;
};

struct HahnBlock
{
  double delay_start = 1e-6;
  double delay_stop = 300e-6;
  int points = 150;
  double center_angle = 3.14159265358979323846;
  int theta_points = 7; ///< id-sweep grid, evenly spaced in sin^2(theta/2)
};

struct ImageBlock
{
  double tau = 26e-9;
  double readout_phase = 1.57079632679489661923;
  int frames = 2000;
  bool calibrate_current = true;
  double target_field = 0.44e-6; ///< projected field at the -x edge extremum
};

struct ScenarioConfig
{
  Experiment kind = Experiment::xy8_sweep;
  NVParams nv{};
  double bias_field = 4.0286e-3; ///< T along the NV axis
  WireGeometry wire{};
  SequenceBlock sequence{};
  SweepBlock sweep{};
  HahnBlock hahn{};
  OdmrBlock odmr{};
  RFField rf{0.44e-6, 19.23e6, 0.0, PhaseMode::fixed};
  CameraBlock camera{496, 256};
  ImageBlock image{};
  std::uint64_t seed = 1;

  /// Throws ValidationError listing every offending key.
  void validate() const;
};

ScenarioConfig default_config(Experiment kind);

/// Parses the sectioned key = value text over default_config(kind).
/// Unknown sections/keys and unparsable values raise ValidationError.
ScenarioConfig parse_config(std::istream &is, Experiment kind);
ScenarioConfig load_config(std::string const &path, Experiment kind);

/// Canonical text form; parse_config(render_config(c)) == c.
std::string render_config(ScenarioConfig const &c);

/// FNV-1a 64 of render_config(c).
std::uint64_t config_hash(ScenarioConfig const &c);

} // namespace nvrf
