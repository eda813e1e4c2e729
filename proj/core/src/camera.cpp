#include "nvrf/camera.hpp"

#include "nvrf/errors.hpp"
#include "nvrf/rng.hpp"

#include <cmath>
#include <random>

namespace nvrf {

void CameraBlock::validate() const
{
  if (pixels_x <= 0 || pixels_y <= 0) { throw DomainError("camera needs positive sensor dimensions"); }
  if (binning <= 0 || pixels_x % binning != 0 || pixels_y % binning != 0) {
    throw DomainError("binning factor must divide the sensor dimensions");
  }
  if (!(pixel_pitch > 0) || !(exposure > 0) || frames < 1 || !(photons_per_pixel_per_frame > 0)) {
    throw DomainError("camera pitch, exposure, frames and photon budget must be positive");
  }
}

BinnedFrame camera_readout(RawMap const &dark_fraction, double contrast, CameraBlock const &cam, std::uint64_t seed,
                           std::uint64_t stream)
{
  if (!(cam.photons_per_pixel_per_frame > 0)) { throw DomainError("photon rate must be positive"); }
  int const b = cam.binning;
  if (b <= 0 || dark_fraction.nx % b != 0 || dark_fraction.ny % b != 0) {
    throw DomainError("binning factor must divide the map dimensions");
  }
  BinnedFrame out;
  out.nx = dark_fraction.nx / b;
  out.ny = dark_fraction.ny / b;
  std::vector<double> counts(static_cast<std::size_t>(out.nx) * out.ny, 0.0);

  double const bright = cam.photons_per_pixel_per_frame * cam.frames;
  for (int iy = 0; iy < dark_fraction.ny; ++iy) {
    for (int ix = 0; ix < dark_fraction.nx; ++ix) {
      auto const idx = static_cast<std::size_t>(iy) * dark_fraction.nx + ix;
      double const mean = bright * (1.0 - contrast * dark_fraction.values[idx]);
      double c = mean;
      if (cam.shot_noise) {
        // frame sum of Poisson draws is Poisson with the summed mean
        CounterRng rng(seed, stream, idx);
        std::poisson_distribution<long long> dist(mean);
        c = static_cast<double>(dist(rng));
      }
      counts[static_cast<std::size_t>(iy / b) * out.nx + ix / b] += c;
    }
  }
  double const norm = bright * b * b;
  out.values.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.values[i] = (1.0 - counts[i] / norm) / contrast;
  }
  return out;
}

double binned_sigma(double s, double contrast, CameraBlock const &cam, int raw_pixels)
{
  if (!cam.shot_noise) { return 0.0; }
  double const bright = cam.photons_per_pixel_per_frame * cam.frames * raw_pixels;
  return std::sqrt(bright * (1.0 - contrast * s)) / (bright * contrast);
}

} // namespace nvrf
