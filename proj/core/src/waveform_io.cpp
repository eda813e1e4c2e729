#include "nvrf/waveform_io.hpp"

#include "nvrf/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace nvrf {

void write_waveform_text(std::ostream &os, WaveformIQ const &wf)
{
  os << fmt::format("# sample_rate_hz = {:.17g}\n", wf.sample_rate);
  os << fmt::format("# full_scale_rabi_hz = {:.17g}\n", wf.full_scale_rabi);
  for (std::size_t k = 0; k < wf.size(); ++k) {
    os << wf.i_samples[k] << ' ' << wf.q_samples[k] << '\n';
  }
}

WaveformIQ read_waveform_text(std::istream &is)
{
  WaveformIQ wf;
  wf.i_samples.clear();
  wf.q_samples.clear();
  bool have_rate = false;
  bool have_scale = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    if (line[0] == '#') {
      auto const eq = line.find('=');
      if (eq == std::string::npos) { continue; }
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      double const v = std::stod(line.substr(eq + 1));
      if (key == "sample_rate_hz") {
        wf.sample_rate = v;
        have_rate = true;
      } else if (key == "full_scale_rabi_hz") {
        wf.full_scale_rabi = v;
        have_scale = true;
      }
      continue;
    }
    std::istringstream ls(line);
    long i = 0;
    long q = 0;
    if (!(ls >> i >> q) || i < -32768 || i > 32767 || q < -32768 || q > 32767) {
      throw IoError("malformed waveform sample on line " + std::to_string(lineno));
    }
    wf.i_samples.push_back(static_cast<std::int16_t>(i));
    wf.q_samples.push_back(static_cast<std::int16_t>(q));
  }
  if (!have_rate || !have_scale) { throw IoError("waveform header lacks sample_rate_hz or full_scale_rabi_hz"); }
  return wf;
}

void write_waveform_binary(std::ostream &os, WaveformIQ const &wf)
{
  auto put = [&os](std::int16_t v) {
    auto const u = static_cast<std::uint16_t>(v);
    char const bytes[2] = {static_cast<char>(u & 0xff), static_cast<char>(u >> 8)};
    os.write(bytes, 2);
  };
  for (std::size_t k = 0; k < wf.size(); ++k) {
    put(wf.i_samples[k]);
    put(wf.q_samples[k]);
  }
}

void save_waveform_text(std::filesystem::path const &path, WaveformIQ const &wf)
{
  std::ofstream os(path);
  if (!os) { throw IoError("cannot open " + path.string() + " for writing"); }
  write_waveform_text(os, wf);
  if (!os) { throw IoError("write failed for " + path.string()); }
}

void save_waveform_binary(std::filesystem::path const &path, WaveformIQ const &wf)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) { throw IoError("cannot open " + path.string() + " for writing"); }
  write_waveform_binary(os, wf);
  if (!os) { throw IoError("write failed for " + path.string()); }
}

} // namespace nvrf
