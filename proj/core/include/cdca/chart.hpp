#ifndef CDCA_CHART_HPP
#define CDCA_CHART_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace cdca {

enum class ChartKind {
  congestion_vs_time,
  speed_histogram,
  overhead_vs_time,
};

class SchemaMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Renders a standalone SVG chart from one or two metrics CSV files (the
// second series overlays the first, e.g. with/without the algorithm).
// Header-only CSVs produce an empty-axes chart. Throws SchemaMismatchError
// when a file does not match the metrics schema.
std::string render_chart_svg(const std::vector<std::string>& metrics_csv_texts,
                             const std::vector<std::string>& series_labels,
                             ChartKind kind);

// Convenience wrapper: reads the CSVs, writes `out_path`.
void render_chart(const std::vector<std::string>& metrics_csv_paths,
                  ChartKind kind, const std::string& out_path);

}  // namespace cdca

#endif  // CDCA_CHART_HPP
