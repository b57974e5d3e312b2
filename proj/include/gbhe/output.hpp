#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gbhe/config.hpp"
#include "gbhe/space.hpp"

namespace gbhe {

/// Ordered key/value pairs written as '#'-prefixed header lines.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Config hash, scheme, parameter echo, quadrature degrees and weight formula of a run.
Metadata run_metadata(const RunConfig& cfg);

/// 17 significant digits, '.' decimal separator; "nan" for NaN.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const Metadata& meta, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t n_columns_;
};

/// Legacy ASCII VTK 3.0 unstructured grid of triangles with duplicated per-cell points.
/// DG: point data are the vertex values of each cell. CR: point data are the P1 field
/// evaluated at each cell's vertices, plus the cell average as cell data.
void write_vtk(const std::string& path, const Space& space, std::span<const double> u,
               std::optional<std::span<const double>> v, double time, const Metadata& meta);

}  // namespace gbhe
