#include "nvrf/export.hpp"

#include "nvrf/errors.hpp"
#include "nvrf/waveform_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace nvrf {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::pair<double, double> value_range(FieldMap const &m)
{
  if (m.values.empty()) { return {0.0, 0.0}; }
  auto const [lo, hi] = std::minmax_element(m.values.begin(), m.values.end());
  return {*lo, *hi};
}

template <class Fn>
fs::path write_file(fs::path const &path, std::ios::openmode mode, Fn &&fn)
{
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) { throw IoError("cannot open " + path.string() + " for writing"); }
  fn(os);
  os.flush();
  if (!os) { throw IoError("write failed for " + path.string()); }
  return path;
}

} // namespace

void write_table_csv(std::ostream &os, Table const &t)
{
  for (std::size_t j = 0; j < t.columns.size(); ++j) { os << (j ? "," : "") << t.columns[j]; }
  os << '\n';
  std::size_t rows = 0;
  for (auto const &col : t.data) { rows = std::max(rows, col.size()); }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < t.data.size(); ++j) {
      if (j) { os << ','; }
      if (i < t.data[j].size()) { os << num(t.data[j][i]); }
    }
    os << '\n';
  }
}

// First row holds the x coordinates (m), first column the y coordinates (m);
// the body is the field in T.
void write_map_csv(std::ostream &os, FieldMap const &m)
{
  os << "y_m\\x_m";
  for (int ix = 0; ix < m.grid.nx; ++ix) { os << ',' << num(m.x(ix)); }
  os << '\n';
  for (int iy = 0; iy < m.grid.ny; ++iy) {
    os << num(m.y(iy));
    for (int ix = 0; ix < m.grid.nx; ++ix) { os << ',' << num(m.at(ix, iy)); }
    os << '\n';
  }
}

void write_map_pgm(std::ostream &os, FieldMap const &m)
{
  auto const [lo, hi] = value_range(m);
  double const span = hi - lo;
  os << "P5\n" << m.grid.nx << ' ' << m.grid.ny << "\n255\n";
  for (int iy = 0; iy < m.grid.ny; ++iy) {
    for (int ix = 0; ix < m.grid.nx; ++ix) {
      double const u = span > 0 ? (m.at(ix, iy) - lo) / span : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::lround(u * 255.0), 0L, 255L))));
    }
  }
}

void write_map_scale(std::ostream &os, FieldMap const &m)
{
  auto const [lo, hi] = value_range(m);
  os << "unit = T\n";
  os << "gray_0 = " << num(lo) << '\n';
  os << "gray_255 = " << num(hi) << '\n';
  os << "pixel_spacing_m = " << num(m.grid.spacing) << '\n';
  os << "origin_x_m = " << num(m.grid.origin_x) << '\n';
  os << "origin_y_m = " << num(m.grid.origin_y) << '\n';
  os << "nx = " << m.grid.nx << '\n';
  os << "ny = " << m.grid.ny << '\n';
}

void write_report(std::ostream &os, RunResult const &r)
{
  os << "experiment = " << r.provenance.experiment << '\n';
  os << "tool_version = " << r.provenance.tool_version << '\n';
  os << "config_hash = " << fmt::format("{:016x}", r.provenance.config_hash) << '\n';
  os << "seed = " << r.provenance.seed << '\n';
  for (auto const &[k, v] : r.report) { os << k << " = " << v << '\n'; }
}

void write_fits_csv(std::ostream &os, RunResult const &r)
{
  os << "fit,parameter,value,std_error,converged,iterations,residual_norm\n";
  for (auto const &[name, f] : r.fits) {
    for (auto const &p : f.params) {
      os << name << ',' << p.name << ',' << num(p.value) << ',' << num(p.std_error) << ','
         << (f.converged ? "true" : "false") << ',' << f.iterations << ',' << num(f.residual_norm) << '\n';
    }
  }
}

std::vector<fs::path> export_result(RunResult const &r, fs::path const &dir, ExportOptions const &opt)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) { throw IoError("cannot create directory " + dir.string() + ": " + ec.message()); }

  std::vector<fs::path> out;
  auto const text = std::ios::out;
  auto const binary = std::ios::out | std::ios::binary;
  bool const csv = opt.format != ExportFormat::pgm;
  bool const pgm = opt.format != ExportFormat::csv;

  out.push_back(write_file(dir / "report.txt", text, [&](std::ostream &os) { write_report(os, r); }));
  if (!r.fits.empty()) {
    out.push_back(write_file(dir / "fits.csv", text, [&](std::ostream &os) { write_fits_csv(os, r); }));
  }
  for (auto const &t : r.tables) {
    out.push_back(write_file(dir / (t.name + ".csv"), text, [&](std::ostream &os) { write_table_csv(os, t); }));
  }
  for (auto const &m : r.maps) {
    if (csv) {
      out.push_back(
        write_file(dir / (m.name + ".csv"), text, [&](std::ostream &os) { write_map_csv(os, m.map); }));
    }
    if (pgm) {
      out.push_back(
        write_file(dir / (m.name + ".pgm"), binary, [&](std::ostream &os) { write_map_pgm(os, m.map); }));
      out.push_back(write_file(dir / (m.name + ".scale.txt"), text,
                               [&](std::ostream &os) { write_map_scale(os, m.map); }));
    }
  }
  if (r.waveform) {
    out.push_back(
      write_file(dir / "waveform.txt", text, [&](std::ostream &os) { write_waveform_text(os, *r.waveform); }));
    if (opt.binary_waveform) {
      out.push_back(write_file(dir / "waveform.bin", binary,
                               [&](std::ostream &os) { write_waveform_binary(os, *r.waveform); }));
    }
  }
  return out;
}

} // namespace nvrf
