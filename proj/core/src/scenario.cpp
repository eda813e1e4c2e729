#include "nvrf/scenario.hpp"

#include "nvrf/camera.hpp"
#include "nvrf/errors.hpp"
#include "nvrf/spin_dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nvrf {

namespace {

constexpr double pi = std::numbers::pi;

// Stream layout keeps every acquisition of a run statistically independent.
constexpr std::uint64_t stream_stride = 1u << 20;

std::vector<double> linspace(double a, double b, int n)
{
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) { v[i] = n == 1 ? a : a + (b - a) * i / (n - 1); }
  return v;
}

std::vector<double> tau_grid(SweepBlock const &s)
{
  auto const n = static_cast<int>(std::floor((s.tau_stop - s.tau_start) / s.tau_step + 1e-9)) + 1;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) { v[i] = s.tau_start + i * s.tau_step; }
  return v;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

RunResult start(ScenarioConfig const &c)
{
  RunResult r;
  r.kind = c.kind;
  r.provenance.config_hash = config_hash(c);
  r.provenance.seed = c.seed;
  r.provenance.tool_version = tool_version();
  r.provenance.experiment = std::string(experiment_name(c.kind));
  return r;
}

// Whole probe region binned into one value: estimated dark fraction.
double region_readout(double dark, int region, double contrast, CameraBlock cam, std::uint64_t seed,
                      std::uint64_t stream)
{
  RawMap raw{region, region, std::vector<double>(static_cast<std::size_t>(region) * region, dark)};
  cam.binning = region;
  return camera_readout(raw, contrast, cam, seed, stream).values.front();
}

BuildOptions sequence_options(SequenceBlock const &s, double readout_phase)
{
  BuildOptions o;
  o.envelope = s.envelope;
  o.readout_phase = readout_phase;
  return o;
}

// Keeps a noisy population difference inside the invertible band.
double clamp_signal(double delta, SequenceSpec const &seq, NVParams const &p)
{
  double const env = coherence_envelope(p, std::max(0.0, seq.sensing_time()));
  double const c = std::cos(seq.readout_phase);
  double const lo = 0.5 * env * (c - 1.0);
  double const hi = 0.5 * env * (c + 1.0);
  return std::clamp(delta, lo, hi);
}

double signal_to_field(double delta, SequenceSpec const &seq, NVParams const &p)
{
  return contrast_to_field(clamp_signal(delta, seq, p), seq, p);
}

CameraBlock image_camera(ScenarioConfig const &c)
{
  CameraBlock cam = c.camera;
  cam.frames = c.image.frames;
  return cam;
}

SequenceSpec image_sequence(ScenarioConfig const &c)
{
  return build_xy8(c.sequence.n_reps, c.image.tau, c.sequence.t_pi,
                   sequence_options(c.sequence, c.image.readout_phase));
}

WireGeometry image_wire(ScenarioConfig const &c)
{
  WireGeometry g = c.wire;
  if (c.image.calibrate_current) {
    g.current_amplitude = 1.0;
    g.current_amplitude =
      calibrate_current(c.image.target_field, projected_extremum_x(g), g, c.nv.nv_axis, c.nv.consts);
  }
  return g;
}

// Lab x of raw column i; the sensor is centered on x = 0.
double raw_x(ScenarioConfig const &c, int i)
{
  return (i - 0.5 * (c.camera.pixels_x - 1)) * c.camera.pixel_pitch;
}

Grid binned_grid(ScenarioConfig const &c)
{
  int const b = c.camera.binning;
  Grid g;
  g.spacing = b * c.camera.pixel_pitch;
  g.nx = c.camera.pixels_x / b;
  g.ny = c.camera.pixels_y / b;
  g.origin_x = (0.5 * (b - 1) - 0.5 * (c.camera.pixels_x - 1)) * c.camera.pixel_pitch;
  g.origin_y = (0.5 * (b - 1) - 0.5 * (c.camera.pixels_y - 1)) * c.camera.pixel_pitch;
  return g;
}

std::vector<double> raw_column_field(ScenarioConfig const &c, WireGeometry const &g)
{
  std::vector<double> b(static_cast<std::size_t>(c.camera.pixels_x));
  for (int i = 0; i < c.camera.pixels_x; ++i) {
    b[i] = project_to_nv(strip_field_vector(raw_x(c, i), g, c.nv.consts), c.nv.nv_axis);
  }
  return b;
}

} // namespace

Table const *RunResult::table(std::string const &name) const
{
  for (auto const &t : tables) {
    if (t.name == name) { return &t; }
  }
  return nullptr;
}

NamedMap const *RunResult::map(std::string const &name) const
{
  for (auto const &m : maps) {
    if (m.name == name) { return &m; }
  }
  return nullptr;
}

std::string const *RunResult::report_value(std::string const &key) const
{
  for (auto const &[k, v] : report) {
    if (k == key) { return &v; }
  }
  return nullptr;
}

std::string tool_version() { return NVRF_VERSION; }

RunResult run_scenario(ScenarioConfig const &config)
{
  config.validate();
  switch (config.kind) {
  case Experiment::odmr: return run_odmr(config);
  case Experiment::rabi: return run_rabi(config);
  case Experiment::hahn_sweep: return run_hahn(config);
  case Experiment::id_sweep: return run_id_sweep(config);
  case Experiment::xy8_sweep: return run_xy8_sweep(config);
  case Experiment::xy8_image: return run_xy8_image(config);
  case Experiment::compile_waveform: return run_compile_waveform(config);
  }
  throw DomainError("unknown experiment");
}

RunResult run_odmr(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const f = linspace(c.odmr.freq_start, c.odmr.freq_stop, c.odmr.points);
  auto const pl = simulate_odmr(c.nv, c.bias_field, f, c.odmr.linewidth_lower, c.odmr.linewidth_upper);
  r.tables.push_back({"odmr", {"frequency_Hz", "photoluminescence_norm"}, {f, pl}});

  auto const fit = fit_lorentzian_pair(SweepCurve{f, pl, {}});
  auto const [lo, hi] = resonance_frequencies(c.nv, c.bias_field);
  r.report.emplace_back("model_center_1_hz", num(lo));
  r.report.emplace_back("model_center_2_hz", num(hi));
  r.report.emplace_back("model_splitting_hz", num(hi - lo));
  if (fit.converged) {
    r.report.emplace_back("fit_splitting_hz", num(fit.value("center_2") - fit.value("center_1")));
  }
  r.fits.emplace_back("odmr", fit);
  return r;
}

RunResult run_rabi(ScenarioConfig const &c)
{
  RunResult r = start(c);
  double const rabi = c.sequence.rabi_frequency;
  double const dt = 1.0 / c.sequence.sample_rate;
  RFField const none{};
  PropagationOptions opt;
  opt.dephasing = false;

  std::vector<double> len;
  std::vector<double> pop;
  // a single pulse may rotate by at most 2 pi
  auto const n = static_cast<int>(std::floor(2.0 / (rabi * dt) * (1 + 1e-12)));
  for (int k = 1; k <= n; ++k) {
    double const l = 0.5 * dt * k;
    auto const seq = build_rabi(l, rabi, Envelope::rectangular);
    auto const wf = render_waveform(seq, c.sequence.sample_rate, c.sequence.full_scale_rabi);
    len.push_back(l);
    pop.push_back(bright_population(propagate_bloch(wf, 0.0, none, c.nv, opt)));
  }
  r.tables.push_back({"rabi", {"pulse_length_s", "bright_population"}, {len, pop}});
  r.report.emplace_back("rabi_frequency_hz", num(rabi));
  r.report.emplace_back("pi_length_s", num(pi_length_from_rabi(rabi)));
  return r;
}

namespace {

struct EchoRun
{
  std::vector<double> measured;
  std::vector<double> truth;
};

EchoRun echo_trace(ScenarioConfig const &c, std::vector<double> const &delays, double theta, std::uint64_t stream0)
{
  EchoRun e;
  e.truth = simulate_hahn_decay(c.nv, delays, theta);
  e.measured.resize(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    double const dark = 0.5 * (1.0 - e.truth[i]);
    double const s = region_readout(dark, c.sweep.region_pixels, c.nv.contrast, c.camera, c.seed, stream0 + i);
    e.measured[i] = 1.0 - 2.0 * s;
  }
  return e;
}

void report_fit(RunResult &r, std::string const &prefix, FitResult const &f)
{
  r.report.emplace_back(prefix + "converged", f.converged ? "true" : "false");
  for (auto const &p : f.params) {
    r.report.emplace_back(prefix + p.name, num(p.value));
    r.report.emplace_back(prefix + p.name + "_error", num(p.std_error));
  }
  for (auto const &w : f.warnings) { r.report.emplace_back(prefix + "warning", w); }
}

} // namespace

RunResult run_hahn(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const delays = linspace(c.hahn.delay_start, c.hahn.delay_stop, c.hahn.points);
  auto const e = echo_trace(c, delays, c.hahn.center_angle, 0);
  r.tables.push_back({"hahn", {"delay_s", "echo_norm", "echo_model_norm"}, {delays, e.measured, e.truth}});
  auto const fit = fit_double_exponential(SweepCurve{delays, e.measured, {}});
  report_fit(r, "", fit);
  r.fits.emplace_back("hahn", fit);
  return r;
}

RunResult run_id_sweep(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const delays = linspace(c.hahn.delay_start, c.hahn.delay_stop, c.hahn.points);
  auto const s2 = linspace(0.0, 1.0, c.hahn.theta_points);

  std::vector<double> theta;
  std::vector<double> fast;
  std::vector<double> fast_err;
  std::vector<double> slow;
  std::vector<double> slow_err;
  Table curves{"id_decays", {"delay_s"}, {delays}};
  for (std::size_t k = 0; k < s2.size(); ++k) {
    double const th = 2.0 * std::asin(std::sqrt(s2[k]));
    auto const e = echo_trace(c, delays, th, k * stream_stride);
    auto const fit = fit_double_exponential(SweepCurve{delays, e.measured, {}});
    if (!fit.converged) { throw DomainError(fmt::format("decay fit failed at theta = {:.6g} rad", th)); }
    double const tf = fit.value("t_fast");
    double const ts = fit.value("t_slow");
    theta.push_back(th);
    fast.push_back(1.0 / tf);
    slow.push_back(1.0 / ts);
    // error of 1/t is err(t)/t^2; a zero error (exact data) keeps equal weights
    fast_err.push_back(fit.std_error("t_fast") / (tf * tf));
    slow_err.push_back(fit.std_error("t_slow") / (ts * ts));
    curves.columns.push_back(fmt::format("echo_theta{}_norm", k));
    curves.data.push_back(e.measured);
    r.fits.emplace_back(fmt::format("decay_theta{}", k), fit);
  }
  auto weights = [](std::vector<double> e) {
    bool const usable = std::all_of(e.begin(), e.end(), [](double v) { return v > 0 && std::isfinite(v); });
    return usable ? e : std::vector<double>{};
  };
  r.tables.push_back({"id_rates",
                      {"theta_rad", "sin2_half_theta", "rate_fast_per_s", "rate_slow_per_s"},
                      {theta, s2, fast, slow}});
  r.tables.push_back(std::move(curves));

  auto const slow_est = nv_density_from_id(SweepCurve{s2, slow, weights(slow_err)}, c.nv.consts, c.nv.id_constant);
  auto const fast_fit = weighted_linear_fit(SweepCurve{s2, fast, weights(fast_err)});
  r.report.emplace_back("n_nv_ppm", num(slow_est.ppm));
  r.report.emplace_back("n_nv_ppm_error", num(slow_est.ppm_error));
  r.report.emplace_back("slow_slope_per_s", num(slow_est.fit.slope));
  r.report.emplace_back("slow_r_squared", num(slow_est.fit.r_squared));
  r.report.emplace_back("slow_linear", slow_est.linear ? "true" : "false");
  r.report.emplace_back("fast_slope_per_s", num(fast_fit.slope));
  r.report.emplace_back("fast_r_squared", num(fast_fit.r_squared));
  r.report.emplace_back("fast_linear", fast_fit.r_squared >= linearity_r2_threshold ? "true" : "false");
  return r;
}

SweepCurve xy8_sweep_trace(ScenarioConfig const &c, int repeat)
{
  auto const taus = tau_grid(c.sweep);
  auto const opt = sequence_options(c.sequence, c.sequence.readout_phase);
  SweepCurve out;
  out.x = taus;
  out.y.resize(taus.size());
  std::uint64_t const base = static_cast<std::uint64_t>(repeat) * stream_stride;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    auto const seq = build_xy8(c.sequence.n_reps, taus[i], c.sequence.t_pi, opt);
    double const delta = field_signal(seq, c.rf, c.nv);
    double const p0 = xy8_population(0.0, seq, c.nv);
    double const p1 = p0 - delta;
    double const s0 = region_readout(1.0 - p0, c.sweep.region_pixels, c.nv.contrast, c.camera, c.seed, base + 2 * i);
    double const s1 =
      region_readout(1.0 - p1, c.sweep.region_pixels, c.nv.contrast, c.camera, c.seed, base + 2 * i + 1);
    out.y[i] = signal_to_field(s1 - s0, seq, c.nv);
  }
  return out;
}

RunResult run_xy8_sweep(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const taus = tau_grid(c.sweep);
  auto const opt = sequence_options(c.sequence, c.sequence.readout_phase);

  std::vector<double> delta(taus.size());
  std::vector<double> truth(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    auto const seq = build_xy8(c.sequence.n_reps, taus[i], c.sequence.t_pi, opt);
    delta[i] = field_signal(seq, c.rf, c.nv);
    truth[i] = signal_to_field(delta[i], seq, c.nv);
  }

  std::vector<SweepCurve> traces;
  for (int k = 0; k < c.sweep.repeats; ++k) { traces.push_back(xy8_sweep_trace(c, k)); }
  r.tables.push_back({"sweep", {"tau_s", "field_T"}, {taus, traces.front().y}});
  r.tables.push_back({"sweep_model", {"tau_s", "delta_population", "field_T"}, {taus, delta, truth}});
  if (c.sweep.repeats > 1) {
    Table t{"sweep_repeats", {"tau_s"}, {taus}};
    for (int k = 0; k < c.sweep.repeats; ++k) {
      t.columns.push_back(fmt::format("field_repeat{}_T", k));
      t.data.push_back(traces[k].y);
    }
    r.tables.push_back(std::move(t));
  }

  auto const peak = find_peak_tau(traces.front());
  r.report.emplace_back("peak_tau_s", num(peak.tau));
  r.report.emplace_back("peak_field_T", num(peak.amplitude));
  r.report.emplace_back("peak_tau_uncertainty_s", num(peak.uncertainty));
  r.report.emplace_back("peak_ambiguous", peak.ambiguous ? "true" : "false");
  double const model_peak = find_peak_tau(SweepCurve{taus, truth, {}}).tau;
  r.report.emplace_back("model_peak_tau_s", num(model_peak));
  r.report.emplace_back("target_tau_s", num(0.5 / c.rf.frequency));
  r.report.emplace_back("frequency_resolution_hz", num(frequency_resolution(peak.tau, c.sweep.tau_step)));
  // Resolution with a 2 ns rectangular-sample grid, for comparison.
  r.report.emplace_back("frequency_resolution_2ns_hz", num(frequency_resolution(peak.tau, 2e-9)));
  if (c.sweep.repeats > 1) {
    // at the resonance itself; the noisy argmax would select for upward fluctuations
    auto const st = repeat_statistics(traces, model_peak);
    r.report.emplace_back("repeat_mean_T", num(st.mean));
    r.report.emplace_back("repeat_sigma_T", num(st.sigma));
  }
  return r;
}

FieldMap image_ground_truth(ScenarioConfig const &c)
{
  auto const g = image_wire(c);
  auto const b = raw_column_field(c, g);
  FieldMap m;
  m.grid = binned_grid(c);
  m.values.assign(static_cast<std::size_t>(m.grid.nx) * m.grid.ny, 0.0);
  int const bin = c.camera.binning;
  for (int ix = 0; ix < m.grid.nx; ++ix) {
    double acc = 0;
    for (int j = 0; j < bin; ++j) { acc += b[static_cast<std::size_t>(ix) * bin + j]; }
    for (int iy = 0; iy < m.grid.ny; ++iy) { m.at(ix, iy) = acc / bin; }
  }
  return m;
}

double image_pixel_sigma(ScenarioConfig const &c, double b)
{
  auto const seq = image_sequence(c);
  auto const cam = image_camera(c);
  double const k = resonant_phase(c.nv.consts, 1.0, seq.pi_pulse_count(), seq.tau);
  RFField f = c.rf;
  f.amplitude = 1.0;
  double const phi = phase_closed_form(seq, f, c.nv.consts) * b;
  double const env = coherence_envelope(c.nv, seq.sensing_time());
  double const s_off = 1.0 - xy8_population(0.0, seq, c.nv);
  double const s_on = 1.0 - xy8_population(phi, seq, c.nv);
  int const px = c.camera.binning * c.camera.binning;
  double const sd = std::hypot(binned_sigma(s_on, c.nv.contrast, cam, px), binned_sigma(s_off, c.nv.contrast, cam, px));
  double const slope = 0.5 * env * std::abs(std::sin(phi - seq.readout_phase)) * k;
  if (!(slope > 0)) { throw InversionError("field-to-signal slope vanishes at this field"); }
  return sd / slope;
}

RunResult run_xy8_image(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const g = image_wire(c);
  auto const seq = image_sequence(c);
  auto const cam = image_camera(c);
  auto const b = raw_column_field(c, g);

  RFField f = c.rf;
  f.amplitude = 1.0;
  double const phi_per_tesla = phase_closed_form(seq, f, c.nv.consts);
  double const s_off = 1.0 - xy8_population(0.0, seq, c.nv);

  int const nx = c.camera.pixels_x;
  int const ny = c.camera.pixels_y;
  RawMap off{nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, s_off)};
  RawMap on{nx, ny, std::vector<double>(off.values.size())};
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      on.values[static_cast<std::size_t>(iy) * nx + ix] = 1.0 - xy8_population(phi_per_tesla * b[ix], seq, c.nv);
    }
  }
  auto const r_off = camera_readout(off, c.nv.contrast, cam, c.seed, 0);
  auto const r_on = camera_readout(on, c.nv.contrast, cam, c.seed, 1);

  FieldMap m;
  m.grid = binned_grid(c);
  m.values.resize(r_on.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    m.values[i] = signal_to_field(r_on.values[i] - r_off.values[i], seq, c.nv);
  }
  auto const truth = image_ground_truth(c);

  // Row-averaged profile locates the extrema.
  std::vector<double> profile(static_cast<std::size_t>(m.grid.nx), 0.0);
  for (int ix = 0; ix < m.grid.nx; ++ix) {
    for (int iy = 0; iy < m.grid.ny; ++iy) { profile[ix] += m.at(ix, iy) / m.grid.ny; }
  }
  std::vector<double> xs(profile.size());
  for (int ix = 0; ix < m.grid.nx; ++ix) { xs[ix] = m.x(ix); }
  std::vector<double> neg(profile.size());
  std::transform(profile.begin(), profile.end(), neg.begin(), [](double v) { return -v; });
  r.tables.push_back({"image_profile", {"x_m", "field_T"}, {xs, profile}});

  double max_abs = 0;
  for (double v : m.values) { max_abs = std::max(max_abs, std::abs(v)); }
  r.report.emplace_back("current_a", num(g.current_amplitude));
  r.report.emplace_back("max_abs_field_T", num(max_abs));
  r.report.emplace_back("predicted_sigma_at_target_T", num(image_pixel_sigma(c, c.image.target_field)));
  try {
    r.report.emplace_back("maximum_x_m", num(find_peak_tau(SweepCurve{xs, profile, {}}).tau));
    r.report.emplace_back("minimum_x_m", num(find_peak_tau(SweepCurve{xs, neg, {}}).tau));
  } catch (BoundaryPeakError const &) {
    r.report.emplace_back("extremum_warning", "extremum at the sensor edge");
  }

  r.maps.push_back({"field", std::move(m)});
  r.maps.push_back({"field_model", truth});
  return r;
}

RunResult run_compile_waveform(ScenarioConfig const &c)
{
  RunResult r = start(c);
  auto const seq = build_xy8(c.sequence.n_reps, c.sequence.tau, c.sequence.t_pi,
                             sequence_options(c.sequence, c.sequence.readout_phase));
  auto wf = render_waveform(seq, c.sequence.sample_rate, c.sequence.full_scale_rabi);
  r.report.emplace_back("pulses", std::to_string(seq.pulses.size()));
  r.report.emplace_back("samples", std::to_string(wf.size()));
  r.report.emplace_back("total_time_s", num(seq.total_time));
  r.report.emplace_back("window_start_s", num(seq.window_start()));
  r.report.emplace_back("window_end_s", num(seq.window_end()));
  try {
    r.report.emplace_back("bandwidth_99_hz", num(bandwidth_estimate(wf)));
  } catch (UndefinedBandwidth const &e) {
    r.report.emplace_back("bandwidth_99_hz", "undefined");
  }
  r.waveform = std::move(wf);
  return r;
}

} // namespace nvrf
