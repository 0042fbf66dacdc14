#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tnl/dyadic.hpp"
#include "tnl/grid.hpp"

namespace tnl {

/// GF01 binary dump: magic "GF01", then u32 comps, u32 nx, u32 ny,
/// f64 x0, y0, h, then row-major (y slow, x fast, component fastest)
/// 64-bit little-endian floats.
void write_gf01(const std::filesystem::path& path, const GridField& field);
GridField read_gf01(const std::filesystem::path& path);

/// PGM P5, maxval 255: values clamped to [0,1], scaled by 255 and rounded
/// half-even; the top image row is the maximal y row.
void write_pgm(const std::filesystem::path& path, const GridField& scalar);
void write_pgm(const std::filesystem::path& path, const CellField& field);

/// CSV with a header row, '\n' line endings and '.' decimal separator.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void row(const std::vector<std::string>& cells);
    void row_numeric(const std::vector<double>& cells);
    std::string str() const;
    void save(const std::filesystem::path& path) const;

    static std::string format(double v);

  private:
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

/// CellField text form: header "cellfield level=<j> window=<x0> <y0> <side>"
/// followed by row-major (y ascending) values as dyadic rationals "p/2^q".
std::string cellfield_to_text(const CellField& field);
CellField cellfield_from_text(const std::string& text);
void write_cellfield(const std::filesystem::path& path, const CellField& field);
CellField read_cellfield(const std::filesystem::path& path);

/// Output root: $TNL_OUT if set, else ./out. Artifacts live under
/// out/<scenario>/<params-hash>/.
std::filesystem::path output_root();
std::string params_hash(const std::string& canonical_params);
std::filesystem::path run_directory(const std::string& scenario, const std::string& params);

}  // namespace tnl
