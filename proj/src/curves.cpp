#include <noisemem/analytics.hpp>
#include <noisemem/curves.hpp>
#include <noisemem/errors.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace noisemem::cli {

std::vector<double> make_grid(const GridSpec &spec) {
  if (!std::isfinite(spec.min) || !std::isfinite(spec.max) || spec.min < 0.0)
    throw DomainError("grid bounds must be finite and >= 0");
  if (spec.points < 1)
    throw DomainError("grid needs at least one point");
  if (spec.points == 1)
    return {spec.min};
  if (!(spec.max > spec.min))
    throw DomainError("grid max must exceed grid min");
  if (spec.scale == GridScale::log && spec.min <= 0.0)
    throw DomainError("log grid needs min > 0");

  std::vector<double> x(spec.points);
  const double steps = static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double u = static_cast<double>(i) / steps;
    x[i] = spec.scale == GridScale::lin
               ? spec.min + u * (spec.max - spec.min)
               : spec.min * std::pow(spec.max / spec.min, u);
  }
  x.front() = spec.min;
  x.back() = spec.max;
  return x;
}

CurveTable shot_vs_classical_table(const GridSpec &grid) {
  std::vector<double> xs = make_grid(grid);
  if (xs.front() > 0.0)
    xs.insert(xs.begin(), 0.0);
  CurveTable table{{"x", "c_sn", "c_cn"}, {}};
  for (double x : xs) {
    const NormalizedOffset off(x);
    table.rows.push_back({x, corr_shot_noise(off), corr_classical_noise(off)});
  }
  return table;
}

std::string second_order_column(double fano, double l_over_ell) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "c2_f%g_r%g", fano, l_over_ell);
  return buf;
}

CurveTable second_order_table(const GridSpec &grid, std::span<const double> fanos,
                              std::span<const double> l_over_ell) {
  if (fanos.empty() || l_over_ell.empty())
    throw DomainError("need at least one Fano factor and one L/ell ratio");
  const std::vector<double> xs = make_grid(grid);
  if (xs.front() <= 0.0)
    throw DomainError("second-order curves need grid min > 0 (g diverges at x = 0)");

  std::vector<DiffusionGeometry> geoms;
  for (double r : l_over_ell)
    geoms.push_back(DiffusionGeometry::from_ratio(r));

  CurveTable table;
  table.columns.push_back("x");
  for (double f : fanos)
    for (double r : l_over_ell)
      table.columns.push_back(second_order_column(f, r));

  for (double x : xs) {
    const NormalizedOffset off(x);
    std::vector<double> row{x};
    for (double f : fanos)
      for (const auto &geom : geoms)
        // mean_t = 1 gives C_II / T directly.
        row.push_back(corr_expansion_terms(off, f, 1.0, geom).c_two);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_csv(std::ostream &out, const CurveTable &table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << '\n';
  char buf[40];
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
}

CurveTable read_csv(std::istream &in) {
  CurveTable table;
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("curve CSV is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      table.columns.push_back(cell);
  }
  if (table.columns.empty() || table.columns.front() != "x")
    throw DomainError("curve CSV must start with an x column");
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ','))
      row.push_back(std::stod(cell));
    if (row.size() != table.columns.size())
      throw DomainError("curve CSV row has the wrong number of fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::ordered_json to_json(const CurveTable &table) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    auto col = nlohmann::ordered_json::array();
    for (const auto &row : table.rows)
      col.push_back(row[c]);
    j[table.columns[c]] = std::move(col);
  }
  return j;
}

} // namespace noisemem::cli
