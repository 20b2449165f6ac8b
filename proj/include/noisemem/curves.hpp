#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace noisemem::cli {

enum class GridScale { lin, log };

struct GridSpec {
  double min = 1e-2;
  double max = 1e2;
  std::size_t points = 25;
  GridScale scale = GridScale::log;
};

/// Expands a grid description into offsets. Log grids need min > 0.
std::vector<double> make_grid(const GridSpec &spec);

/// Column-oriented numeric table; columns[0] is always "x".
struct CurveTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// x, c_sn, c_cn. A leading x = 0 row is added when the grid starts above 0.
CurveTable shot_vs_classical_table(const GridSpec &grid);

/// x plus one C_II / T column per (fano, L/ell) pair, fano-major order.
CurveTable second_order_table(const GridSpec &grid, std::span<const double> fanos,
                              std::span<const double> l_over_ell);

/// "c2_f<fano>_r<L/ell>" with %g formatting, e.g. c2_f0_r3.
std::string second_order_column(double fano, double l_over_ell);

/// Header row then one row per point; %.17g numbers, LF endings.
void write_csv(std::ostream &out, const CurveTable &table);
CurveTable read_csv(std::istream &in);
nlohmann::ordered_json to_json(const CurveTable &table);

} // namespace noisemem::cli
