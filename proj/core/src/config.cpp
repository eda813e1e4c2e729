#include "nvrf/config.hpp"

#include "nvrf/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

namespace nvrf {

namespace {

constexpr double pi = std::numbers::pi;

std::string join(std::vector<std::string> const &v)
{
  std::string s;
  for (auto const &k : v) {
    if (!s.empty()) { s += ", "; }
    s += k;
  }
  return s;
}

std::string trim(std::string s)
{
  auto const b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) { return {}; }
  auto const e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(std::string const &s)
{
  std::string const t = trim(s);
  std::size_t pos = 0;
  double const v = std::stod(t, &pos);
  if (pos != t.size() || !std::isfinite(v)) { throw std::invalid_argument(t); }
  return v;
}

long long to_int(std::string const &s)
{
  std::string const t = trim(s);
  long long v = 0;
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) { throw std::invalid_argument(t); }
  return v;
}

std::uint64_t to_u64(std::string const &s)
{
  std::string const t = trim(s);
  std::uint64_t v = 0;
  auto const [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) { throw std::invalid_argument(t); }
  return v;
}

bool to_bool(std::string const &s)
{
  std::string const t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") { return true; }
  if (t == "false" || t == "0" || t == "no" || t == "off") { return false; }
  throw std::invalid_argument(t);
}

Eigen::Vector3d to_unit_vec(std::string const &s)
{
  std::istringstream is(s);
  Eigen::Vector3d v;
  if (!(is >> v.x() >> v.y() >> v.z())) { throw std::invalid_argument(s); }
  std::string rest;
  if (is >> rest) { throw std::invalid_argument(s); }
  double const n = v.norm();
  if (!(n > 0)) { throw std::invalid_argument(s); }
  return v / n;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string vec(Eigen::Vector3d const &v) { return fmt::format("{:.17g} {:.17g} {:.17g}", v.x(), v.y(), v.z()); }

struct Key
{
  std::string section;
  std::string name;
  std::function<std::string(ScenarioConfig const &)> get;
  std::function<void(ScenarioConfig &, std::string const &)> set;
};

#define NVRF_DOUBLE(sec, key, field)                                                                                   \
  Key { sec, key, [](ScenarioConfig const &c) { return num(c.field); },                                               \
        [](ScenarioConfig &c, std::string const &s) { c.field = to_double(s); } }
#define NVRF_INT(sec, key, field)                                                                                      \
  Key { sec, key, [](ScenarioConfig const &c) { return std::to_string(c.field); },                                    \
        [](ScenarioConfig &c, std::string const &s) { c.field = static_cast<int>(to_int(s)); } }
#define NVRF_BOOL(sec, key, field)                                                                                     \
  Key { sec, key, [](ScenarioConfig const &c) { return std::string(c.field ? "true" : "false"); },                   \
        [](ScenarioConfig &c, std::string const &s) { c.field = to_bool(s); } }

std::vector<Key> const &keys()
{
  static std::vector<Key> const k = {
    Key{"run", "experiment", [](ScenarioConfig const &c) { return std::string(experiment_name(c.kind)); },
        [](ScenarioConfig &c, std::string const &s) {
          auto const e = parse_experiment(trim(s));
          if (!e || *e != c.kind) { throw std::invalid_argument(s); }
        }},
    Key{"run", "seed", [](ScenarioConfig const &c) { return std::to_string(c.seed); },
        [](ScenarioConfig &c, std::string const &s) { c.seed = to_u64(s); }},

    NVRF_DOUBLE("constants", "gamma_e_hz_per_t", nv.consts.gamma_e),
    NVRF_DOUBLE("constants", "mu0_t_m_per_a", nv.consts.mu0),
    NVRF_DOUBLE("constants", "hbar_j_s", nv.consts.hbar),
    NVRF_DOUBLE("constants", "zero_field_splitting_hz", nv.consts.zero_field_splitting),
    NVRF_DOUBLE("constants", "carbon_density_m3", nv.consts.carbon_density),

    NVRF_DOUBLE("nv", "hyperfine_hz", nv.hyperfine_A),
    NVRF_DOUBLE("nv", "t2_fast_s", nv.t2_fast),
    NVRF_DOUBLE("nv", "t2_slow_s", nv.t2_slow),
    NVRF_DOUBLE("nv", "fast_weight", nv.fast_weight),
    NVRF_DOUBLE("nv", "contrast", nv.contrast),
    Key{"nv", "axis", [](ScenarioConfig const &c) { return vec(c.nv.nv_axis); },
        [](ScenarioConfig &c, std::string const &s) { c.nv.nv_axis = to_unit_vec(s); }},
    NVRF_DOUBLE("nv", "n_nv_ppm", nv.n_nv_ppm),
    NVRF_DOUBLE("nv", "id_constant", nv.id_constant),
    Key{"nv", "branch",
        [](ScenarioConfig const &c) { return std::string(c.nv.branch == SpinBranch::lower ? "lower" : "upper"); },
        [](ScenarioConfig &c, std::string const &s) {
          auto const t = trim(s);
          if (t == "lower") {
            c.nv.branch = SpinBranch::lower;
          } else if (t == "upper") {
            c.nv.branch = SpinBranch::upper;
          } else {
            throw std::invalid_argument(s);
          }
        }},
    NVRF_DOUBLE("nv", "bias_field_t", bias_field),

    NVRF_DOUBLE("wire", "width_m", wire.width),
    NVRF_DOUBLE("wire", "standoff_m", wire.standoff),
    NVRF_DOUBLE("wire", "lateral_offset_m", wire.lateral_offset),
    NVRF_DOUBLE("wire", "current_a", wire.current_amplitude),
    Key{"wire", "axis", [](ScenarioConfig const &c) { return vec(c.wire.wire_axis); },
        [](ScenarioConfig &c, std::string const &s) { c.wire.wire_axis = to_unit_vec(s); }},

    NVRF_INT("sequence", "n_reps", sequence.n_reps),
    NVRF_DOUBLE("sequence", "t_pi_s", sequence.t_pi),
    NVRF_DOUBLE("sequence", "tau_s", sequence.tau),
    Key{"sequence", "envelope",
        [](ScenarioConfig const &c) {
          return std::string(c.sequence.envelope == Envelope::cosine_square ? "cosine_square" : "rectangular");
        },
        [](ScenarioConfig &c, std::string const &s) {
          auto const t = trim(s);
          if (t == "cosine_square") {
            c.sequence.envelope = Envelope::cosine_square;
          } else if (t == "rectangular") {
            c.sequence.envelope = Envelope::rectangular;
          } else {
            throw std::invalid_argument(s);
          }
        }},
    NVRF_DOUBLE("sequence", "sample_rate_hz", sequence.sample_rate),
    NVRF_DOUBLE("sequence", "full_scale_rabi_hz", sequence.full_scale_rabi),
    NVRF_DOUBLE("sequence", "readout_phase_rad", sequence.readout_phase),
    NVRF_DOUBLE("sequence", "rabi_frequency_hz", sequence.rabi_frequency),

    NVRF_DOUBLE("sweep", "tau_start_s", sweep.tau_start),
    NVRF_DOUBLE("sweep", "tau_stop_s", sweep.tau_stop),
    NVRF_DOUBLE("sweep", "tau_step_s", sweep.tau_step),
    NVRF_INT("sweep", "region_pixels", sweep.region_pixels),
    NVRF_INT("sweep", "repeats", sweep.repeats),

    NVRF_DOUBLE("hahn", "delay_start_s", hahn.delay_start),
    NVRF_DOUBLE("hahn", "delay_stop_s", hahn.delay_stop),
    NVRF_INT("hahn", "points", hahn.points),
    NVRF_DOUBLE("hahn", "center_angle_rad", hahn.center_angle),
    NVRF_INT("hahn", "theta_points", hahn.theta_points),

    NVRF_DOUBLE("odmr", "freq_start_hz", odmr.freq_start),
    NVRF_DOUBLE("odmr", "freq_stop_hz", odmr.freq_stop),
    NVRF_INT("odmr", "points", odmr.points),
    NVRF_DOUBLE("odmr", "linewidth_lower_hz", odmr.linewidth_lower),
    NVRF_DOUBLE("odmr", "linewidth_upper_hz", odmr.linewidth_upper),

    NVRF_DOUBLE("rf", "frequency_hz", rf.frequency),
    NVRF_DOUBLE("rf", "amplitude_t", rf.amplitude),
    NVRF_DOUBLE("rf", "phase_rad", rf.phase),
    Key{"rf", "phase_mode",
        [](ScenarioConfig const &c) { return std::string(c.rf.phase_mode == PhaseMode::fixed ? "fixed" : "random"); },
        [](ScenarioConfig &c, std::string const &s) {
          auto const t = trim(s);
          if (t == "fixed") {
            c.rf.phase_mode = PhaseMode::fixed;
          } else if (t == "random") {
            c.rf.phase_mode = PhaseMode::uniform_random_averaged;
          } else {
            throw std::invalid_argument(s);
          }
        }},

    NVRF_INT("camera", "pixels_x", camera.pixels_x),
    NVRF_INT("camera", "pixels_y", camera.pixels_y),
    NVRF_DOUBLE("camera", "pixel_pitch_m", camera.pixel_pitch),
    NVRF_INT("camera", "binning", camera.binning),
    NVRF_DOUBLE("camera", "exposure_s", camera.exposure),
    NVRF_INT("camera", "frames", camera.frames),
    NVRF_DOUBLE("camera", "photons_per_pixel_per_frame", camera.photons_per_pixel_per_frame),
    NVRF_BOOL("camera", "shot_noise", camera.shot_noise),

    NVRF_DOUBLE("image", "tau_s", image.tau),
    NVRF_DOUBLE("image", "readout_phase_rad", image.readout_phase),
    NVRF_INT("image", "frames", image.frames),
    NVRF_BOOL("image", "calibrate_current", image.calibrate_current),
    NVRF_DOUBLE("image", "target_field_t", image.target_field),
  };
  return k;
}

#undef NVRF_DOUBLE
#undef NVRF_INT
#undef NVRF_BOOL

// Blocks each experiment reads.
struct Uses
{
  bool nv = true, odmr = false, sequence = false, sweep = false, hahn = false, rf = false, camera = false,
       wire = false, image = false;
};

Uses uses(Experiment e)
{
  Uses u;
  switch (e) {
  case Experiment::odmr:
    u.odmr = true;
    break;
  case Experiment::rabi:
    u.sequence = true;
    break;
  case Experiment::hahn_sweep:
  case Experiment::id_sweep:
    u.hahn = u.camera = true;
    break;
  case Experiment::xy8_sweep:
    u.sequence = u.sweep = u.rf = u.camera = true;
    break;
  case Experiment::xy8_image:
    u.sequence = u.rf = u.camera = u.wire = u.image = true;
    break;
  case Experiment::compile_waveform:
    u.nv = false;
    u.sequence = true;
    break;
  }
  return u;
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> keys)
  : Error("invalid configuration: " + join(keys))
  , keys_(std::move(keys))
{
}

std::string_view experiment_name(Experiment e)
{
  switch (e) {
  case Experiment::odmr: return "odmr";
  case Experiment::rabi: return "rabi";
  case Experiment::hahn_sweep: return "hahn";
  case Experiment::id_sweep: return "id-sweep";
  case Experiment::xy8_sweep: return "xy8-sweep";
  case Experiment::xy8_image: return "xy8-image";
  case Experiment::compile_waveform: return "compile-waveform";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view s)
{
  if (s == "odmr") { return Experiment::odmr; }
  if (s == "rabi") { return Experiment::rabi; }
  if (s == "hahn" || s == "hahn-sweep") { return Experiment::hahn_sweep; }
  if (s == "id-sweep") { return Experiment::id_sweep; }
  if (s == "xy8-sweep") { return Experiment::xy8_sweep; }
  if (s == "xy8-image") { return Experiment::xy8_image; }
  if (s == "compile-waveform") { return Experiment::compile_waveform; }
  return std::nullopt;
}

ScenarioConfig default_config(Experiment kind)
{
  ScenarioConfig c;
  c.kind = kind;
  return c;
}

void ScenarioConfig::validate() const
{
  std::vector<std::string> bad;
  auto check = [&bad](bool ok, char const *key) {
    if (!ok && std::find(bad.begin(), bad.end(), key) == bad.end()) { bad.emplace_back(key); }
  };
  Uses const u = uses(kind);

  if (u.nv) {
    auto const &k = nv.consts;
    check(k.gamma_e > 0 && std::abs(k.gamma_e / 28.02e9 - 1.0) <= 0.01, "constants.gamma_e_hz_per_t");
    check(k.mu0 > 0, "constants.mu0_t_m_per_a");
    check(k.hbar > 0, "constants.hbar_j_s");
    check(k.zero_field_splitting > 0, "constants.zero_field_splitting_hz");
    check(k.carbon_density > 0, "constants.carbon_density_m3");
    check(nv.hyperfine_A >= 0, "nv.hyperfine_hz");
    check(nv.t2_fast > 0 && nv.t2_fast <= nv.t2_slow, "nv.t2_fast_s");
    check(nv.t2_slow > 0, "nv.t2_slow_s");
    check(nv.fast_weight >= 0 && nv.fast_weight <= 1, "nv.fast_weight");
    check(nv.contrast > 0 && nv.contrast < 1, "nv.contrast");
    check(nv.n_nv_ppm >= 0, "nv.n_nv_ppm");
    check(nv.id_constant >= 0, "nv.id_constant");
    check(bias_field >= 0, "nv.bias_field_t");
    if (u.hahn && nv.t2_slow > 0 && nv.n_nv_ppm >= 0 && nv.id_constant >= 0) {
      check(id_rate(nv, pi) < 1.0 / nv.t2_slow, "nv.n_nv_ppm");
    }
  }
  double const min_tau = 1.5 * sequence.t_pi;
  if (u.sequence) {
    check(sequence.n_reps >= 1, "sequence.n_reps");
    check(sequence.t_pi > 0, "sequence.t_pi_s");
    check(sequence.sample_rate > 0, "sequence.sample_rate_hz");
    check(sequence.rabi_frequency > 0, "sequence.rabi_frequency_hz");
    double const peak = sequence.t_pi > 0 ? (sequence.envelope == Envelope::cosine_square ? 1.0 / sequence.t_pi
                                                                                         : 0.5 / sequence.t_pi)
                                          : 0.0;
    check(sequence.full_scale_rabi > 0 && peak <= sequence.full_scale_rabi * (1 + 1e-12),
          "sequence.full_scale_rabi_hz");
    if (kind == Experiment::rabi) {
      check(sequence.rabi_frequency <= sequence.full_scale_rabi, "sequence.rabi_frequency_hz");
    }
    if (kind == Experiment::compile_waveform) { check(sequence.tau >= min_tau, "sequence.tau_s"); }
  }
  if (u.sweep) {
    check(sweep.tau_start >= min_tau, "sweep.tau_start_s");
    check(sweep.tau_stop > sweep.tau_start, "sweep.tau_stop_s");
    check(sweep.tau_step > 0 && (sweep.tau_stop - sweep.tau_start) / sweep.tau_step <= 1e6, "sweep.tau_step_s");
    check(sweep.repeats >= 1, "sweep.repeats");
  }
  if (u.hahn || u.sweep) {
    check(sweep.region_pixels > 0 && camera.binning > 0 && sweep.region_pixels % camera.binning == 0,
          "sweep.region_pixels");
  }
  if (u.hahn) {
    check(hahn.delay_start > 0 && hahn.delay_stop > hahn.delay_start, "hahn.delay_stop_s");
    check(hahn.points >= 6, "hahn.points");
    check(hahn.center_angle >= 0 && hahn.center_angle <= 2 * pi, "hahn.center_angle_rad");
    check(hahn.theta_points >= 3, "hahn.theta_points");
  }
  if (u.odmr) {
    check(odmr.freq_stop > odmr.freq_start && odmr.freq_start > 0, "odmr.freq_stop_hz");
    check(odmr.points >= 16, "odmr.points");
    check(odmr.linewidth_lower > 0, "odmr.linewidth_lower_hz");
    check(odmr.linewidth_upper > 0, "odmr.linewidth_upper_hz");
  }
  if (u.rf) {
    check(rf.frequency > 0, "rf.frequency_hz");
    check(rf.amplitude >= 0, "rf.amplitude_t");
  }
  if (u.camera) {
    check(camera.pixels_x > 0, "camera.pixels_x");
    check(camera.pixels_y > 0, "camera.pixels_y");
    check(camera.binning > 0 && camera.pixels_x % std::max(camera.binning, 1) == 0 &&
            camera.pixels_y % std::max(camera.binning, 1) == 0,
          "camera.binning");
    check(camera.pixel_pitch > 0, "camera.pixel_pitch_m");
    check(camera.exposure > 0, "camera.exposure_s");
    check(camera.frames >= 1, "camera.frames");
    check(camera.photons_per_pixel_per_frame > 0, "camera.photons_per_pixel_per_frame");
  }
  if (u.wire) {
    check(wire.width > 0, "wire.width_m");
    check(wire.standoff > 0, "wire.standoff_m");
    check(std::abs(wire.wire_axis.z()) < 1e-12, "wire.axis");
  }
  if (u.image) {
    check(image.tau >= min_tau, "image.tau_s");
    check(image.frames >= 1, "image.frames");
    check(image.target_field >= 0, "image.target_field_t");
  }
  if (!bad.empty()) { throw ValidationError(std::move(bad)); }
}

ScenarioConfig parse_config(std::istream &is, Experiment kind)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (pt::ini_parser_error const &e) {
    throw ValidationError({fmt::format("syntax (line {}): {}", e.line(), e.message())});
  }

  ScenarioConfig c = default_config(kind);
  std::vector<std::string> bad;
  for (auto const &[section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      bad.push_back(section); // key outside any section
      continue;
    }
    for (auto const &[name, value] : body) {
      auto const &all = keys();
      auto const it = std::find_if(all.begin(), all.end(),
                                   [&](Key const &k) { return k.section == section && k.name == name; });
      std::string const full = section + "." + name;
      if (it == all.end()) {
        bad.push_back(full);
        continue;
      }
      try {
        it->set(c, value.data());
      } catch (std::exception const &) {
        bad.push_back(full);
      }
    }
  }
  if (!bad.empty()) { throw ValidationError(std::move(bad)); }
  c.validate();
  return c;
}

ScenarioConfig load_config(std::string const &path, Experiment kind)
{
  std::ifstream is(path);
  if (!is) { throw IoError("cannot read config " + path); }
  return parse_config(is, kind);
}

std::string render_config(ScenarioConfig const &c)
{
  std::string out;
  std::string current;
  for (auto const &k : keys()) {
    if (k.section != current) {
      if (!current.empty()) { out += '\n'; }
      out += "[" + k.section + "]\n";
      current = k.section;
    }
    out += k.name + " = " + k.get(c) + "\n";
  }
  return out;
}

std::uint64_t config_hash(ScenarioConfig const &c)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : render_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace nvrf
