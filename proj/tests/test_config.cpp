#include "nvrf/config.hpp"
#include "nvrf/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace nvrf;

namespace {

ScenarioConfig parse(std::string const &text, Experiment kind = Experiment::xy8_sweep)
{
  std::istringstream is(text);
  return parse_config(is, kind);
}

std::vector<std::string> offending(std::string const &text, Experiment kind = Experiment::xy8_sweep)
{
  try {
    parse(text, kind);
  } catch (ValidationError const &e) {
    return e.offending_keys();
  }
  return {};
}

bool has(std::vector<std::string> const &v, std::string const &k) { return std::find(v.begin(), v.end(), k) != v.end(); }

} // namespace

TEST(Config, ExperimentNames)
{
  for (auto e : {Experiment::odmr, Experiment::rabi, Experiment::hahn_sweep, Experiment::id_sweep,
                 Experiment::xy8_sweep, Experiment::xy8_image, Experiment::compile_waveform}) {
    EXPECT_EQ(parse_experiment(experiment_name(e)), e);
  }
  EXPECT_EQ(parse_experiment("hahn-sweep"), Experiment::hahn_sweep);
  EXPECT_FALSE(parse_experiment("nmr"));
}

TEST(Config, DefaultsValidForEveryExperiment)
{
  for (auto e : {Experiment::odmr, Experiment::rabi, Experiment::hahn_sweep, Experiment::id_sweep,
                 Experiment::xy8_sweep, Experiment::xy8_image, Experiment::compile_waveform}) {
    EXPECT_NO_THROW(default_config(e).validate()) << experiment_name(e);
  }
}

TEST(Config, RenderParseRoundTrip)
{
  auto c = default_config(Experiment::xy8_image);
  c.seed = 1234567890123ULL;
  c.rf.frequency = 19.23e6 + 1.0 / 3.0;
  c.nv.branch = SpinBranch::upper;
  c.rf.phase_mode = PhaseMode::uniform_random_averaged;
  c.sequence.envelope = Envelope::rectangular;
  c.sequence.full_scale_rabi = 200e6;
  c.camera.shot_noise = false;
  auto const text = render_config(c);
  auto const back = parse(text, Experiment::xy8_image);
  EXPECT_EQ(render_config(back), text);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.rf.frequency, c.rf.frequency);
  EXPECT_EQ(back.nv.branch, SpinBranch::upper);
}

TEST(Config, OverridesApply)
{
  auto const c = parse("[run]\nseed = 42\n[sequence]\nn_reps = 8\n[nv]\naxis = 0 0 2\n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.sequence.n_reps, 8);
  EXPECT_DOUBLE_EQ(c.nv.nv_axis.z(), 1.0);
  EXPECT_EQ(c.sweep.tau_start, default_config(Experiment::xy8_sweep).sweep.tau_start);
}

TEST(Config, UnknownAndMalformedKeysListed)
{
  auto const k = offending("[sequence]\nn_reps = many\nbogus = 1\n[nope]\nx = 1\n");
  EXPECT_TRUE(has(k, "sequence.n_reps"));
  EXPECT_TRUE(has(k, "sequence.bogus"));
  EXPECT_TRUE(has(k, "nope.x"));
}

TEST(Config, InvariantsListed)
{
  auto const k = offending("[camera]\nbinning = 15\n[nv]\nt2_fast_s = 1e-3\n");
  EXPECT_TRUE(has(k, "camera.binning"));
  EXPECT_TRUE(has(k, "nv.t2_fast_s"));
  EXPECT_TRUE(has(offending("[sweep]\ntau_start_s = 10e-9\n"), "sweep.tau_start_s"));
  EXPECT_TRUE(has(offending("[run]\nexperiment = odmr\n"), "run.experiment"));
}

TEST(Config, OnlyReferencedBlocksChecked)
{
  // the ODMR experiment ignores the camera block
  EXPECT_NO_THROW(parse("[camera]\nbinning = 15\n", Experiment::odmr));
  EXPECT_TRUE(has(offending("[camera]\nbinning = 15\n", Experiment::xy8_image), "camera.binning"));
}

TEST(Config, HashTracksContent)
{
  auto a = default_config(Experiment::xy8_sweep);
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, MissingFileIsIoError)
{
  EXPECT_THROW(load_config("/nonexistent/dir/cfg.ini", Experiment::odmr), IoError);
}
