#pragma once

#include "field_geometry.hpp"
#include "scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace nvrf {

enum class ExportFormat
{
  csv,
  pgm,
  both
};

struct ExportOptions
{
  ExportFormat format = ExportFormat::csv;
  bool binary_waveform = false;
};

void write_table_csv(std::ostream &os, Table const &t);
void write_map_csv(std::ostream &os, FieldMap const &m);
/// Binary 8-bit PGM (P5), min -> 0 and max -> 255.
void write_map_pgm(std::ostream &os, FieldMap const &m);
void write_map_scale(std::ostream &os, FieldMap const &m);
void write_report(std::ostream &os, RunResult const &r);
void write_fits_csv(std::ostream &os, RunResult const &r);

/// Writes every artifact of the result into dir and returns the paths.
/// Throws IoError with the failing path.
std::vector<std::filesystem::path> export_result(RunResult const &r, std::filesystem::path const &dir,
                                                 ExportOptions const &opt = {});

} // namespace nvrf
