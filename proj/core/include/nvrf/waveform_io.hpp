#pragma once

#include "pulse_compiler.hpp"

#include <filesystem>
#include <iosfwd>

namespace nvrf {

// Text format:
//   # sample_rate_hz = <double>
//   # full_scale_rabi_hz = <double>
//   <I> <Q>          one sample per line, signed integers
void write_waveform_text(std::ostream &os, WaveformIQ const &wf);
WaveformIQ read_waveform_text(std::istream &is);

// Little-endian interleaved int16 (I0 Q0 I1 Q1 ...), no header.
void write_waveform_binary(std::ostream &os, WaveformIQ const &wf);

void save_waveform_text(std::filesystem::path const &path, WaveformIQ const &wf);
void save_waveform_binary(std::filesystem::path const &path, WaveformIQ const &wf);

} // namespace nvrf
