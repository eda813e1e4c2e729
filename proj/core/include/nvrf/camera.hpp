#pragma once

#include <cstdint>
#include <vector>

namespace nvrf {

struct CameraBlock
{
  int pixels_x = 512;
  int pixels_y = 256;
  double pixel_pitch = 65e-9; ///< raw pixel size in the sample plane, m
  int binning = 16;
  double exposure = 54e-3;    ///< s per frame
  int frames = 100;
  double photons_per_pixel_per_frame = 3874;
  bool shot_noise = true;

  void validate() const;
  /// Mean photon rate per raw pixel, 1/s.
  double photon_rate() const { return photons_per_pixel_per_frame / exposure; }
};

/// Raw-pixel map of dark-state fractions s in [0,1], row-major.
struct RawMap
{
  int nx = 0;
  int ny = 0;
  std::vector<double> values;
};

struct BinnedFrame
{
  int nx = 0;
  int ny = 0;
  std::vector<double> values; ///< estimated dark fraction per binned pixel
};

/// Photon counts per raw pixel ~ Poisson(frames * photons (1 - contrast s)),
/// summed over each binning x binning block, converted back to an estimate of
/// s. `stream` separates independent acquisitions sharing a seed.
BinnedFrame camera_readout(RawMap const &dark_fraction, double contrast, CameraBlock const &cam, std::uint64_t seed,
                           std::uint64_t stream);

/// Predicted standard deviation of one binned estimate of s.
double binned_sigma(double s, double contrast, CameraBlock const &cam, int raw_pixels);

} // namespace nvrf
