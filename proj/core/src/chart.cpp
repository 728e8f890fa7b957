#include "cdca/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cdca/metrics.hpp"

namespace cdca {
namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 500;
constexpr int kMarginLeft = 80;
constexpr int kMarginRight = 30;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 65;
constexpr const char* kSeriesColors[2] = {"#1f77b4", "#d62728"};

struct ParsedMetrics {
  std::vector<double> t;
  std::vector<double> congested;
  std::vector<double> mean_speed;
  std::vector<double> msgs_total;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

ParsedMetrics parse_metrics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaMismatchError("metrics CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsCsvHeader) {
    throw SchemaMismatchError("metrics CSV header mismatch: '" + line + "'");
  }

  ParsedMetrics out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<double, 10> row{};
    std::istringstream fields(line);
    std::string field;
    std::size_t col = 0;
    while (std::getline(fields, field, ',')) {
      if (col >= row.size()) break;
      try {
        std::size_t used = 0;
        row[col] = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw SchemaMismatchError("metrics CSV line " +
                                  std::to_string(line_no) +
                                  ": bad value '" + field + "'");
      }
      ++col;
    }
    if (col != row.size()) {
      throw SchemaMismatchError("metrics CSV line " + std::to_string(line_no) +
                                ": expected 10 columns, got " +
                                std::to_string(col));
    }
    out.t.push_back(row[0]);
    out.congested.push_back(row[2]);
    out.mean_speed.push_back(row[6]);
    out.msgs_total.push_back(row[8]);
  }
  return out;
}

double sx(double x, double xmin, double xmax) {
  const double span = xmax - xmin;
  const double frac = span > 0.0 ? (x - xmin) / span : 0.0;
  return kMarginLeft + frac * (kWidth - kMarginLeft - kMarginRight);
}

double sy(double y, double ymin, double ymax) {
  const double span = ymax - ymin;
  const double frac = span > 0.0 ? (y - ymin) / span : 0.0;
  return kHeight - kMarginBottom -
         frac * (kHeight - kMarginTop - kMarginBottom);
}

void draw_frame(std::ostringstream& svg, const std::string& title,
                const std::string& x_label, const std::string& y_label,
                double xmin, double xmax, double ymin, double ymax) {
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
         "font-size=\"18\" font-family=\"sans-serif\">"
      << title << "</text>\n";

  const double x0 = kMarginLeft;
  const double x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom;
  const double y1 = kMarginTop;
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1
      << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0
      << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / ticks;
    const double px = sx(fx, xmin, xmax);
    svg << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px
        << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << y0 + 22
        << "\" text-anchor=\"middle\" font-size=\"12\" "
           "font-family=\"sans-serif\">"
        << fmt(fx) << "</text>\n";

    const double fy = ymin + (ymax - ymin) * i / ticks;
    const double py = sy(fy, ymin, ymax);
    svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0
        << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x0 - 9 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"12\" "
           "font-family=\"sans-serif\">"
        << fmt(fy) << "</text>\n";
  }

  svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 18
      << "\" text-anchor=\"middle\" font-size=\"14\" "
         "font-family=\"sans-serif\">"
      << x_label << "</text>\n";
  svg << "<text x=\"20\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 20 "
      << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";
}

void draw_legend(std::ostringstream& svg,
                 const std::vector<std::string>& labels) {
  if (labels.size() < 2 && (labels.empty() || labels[0].empty())) return;
  const double lx = kWidth - kMarginRight - 200;
  double ly = kMarginTop + 10;
  for (std::size_t s = 0; s < labels.size() && s < 2; ++s) {
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26
        << "\" y2=\"" << ly << "\" stroke=\"" << kSeriesColors[s]
        << "\" stroke-width=\"2.5\"/>\n";
    svg << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << labels[s]
        << "</text>\n";
    ly += 20;
  }
}

std::string render_lines(const std::vector<ParsedMetrics>& data,
                         const std::vector<std::string>& labels,
                         const std::string& title, const std::string& y_label,
                         std::vector<double> ParsedMetrics::*column) {
  double xmax = 0.0;
  double ymax = 0.0;
  for (const ParsedMetrics& m : data) {
    if (!m.t.empty()) xmax = std::max(xmax, m.t.back());
    for (double v : m.*column) ymax = std::max(ymax, v);
  }
  if (xmax <= 0.0) xmax = 1.0;
  ymax = ymax > 0.0 ? ymax * 1.05 : 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  draw_frame(svg, title, "time (s)", y_label, 0.0, xmax, 0.0, ymax);
  for (std::size_t s = 0; s < data.size() && s < 2; ++s) {
    const ParsedMetrics& m = data[s];
    const std::vector<double>& ys = m.*column;
    if (m.t.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << kSeriesColors[s]
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < m.t.size(); ++k) {
      svg << fmt(sx(m.t[k], 0.0, xmax)) << ',' << fmt(sy(ys[k], 0.0, ymax))
          << ' ';
    }
    svg << "\"/>\n";
  }
  draw_legend(svg, labels);
  svg << "</svg>\n";
  return svg.str();
}

std::string render_histogram(const std::vector<ParsedMetrics>& data,
                             const std::vector<std::string>& labels) {
  constexpr int kBins = 12;
  double vmax = 0.0;
  for (const ParsedMetrics& m : data) {
    for (double v : m.mean_speed) vmax = std::max(vmax, v);
  }
  if (vmax <= 0.0) vmax = 1.0;
  const double bin_width = vmax / kBins;

  std::vector<std::array<int, kBins>> counts(data.size());
  int cmax = 0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    counts[s].fill(0);
    for (double v : data[s].mean_speed) {
      int b = static_cast<int>(v / bin_width);
      b = std::clamp(b, 0, kBins - 1);
      counts[s][b] += 1;
      cmax = std::max(cmax, counts[s][b]);
    }
  }
  const double ymax = cmax > 0 ? cmax * 1.05 : 1.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  draw_frame(svg, "Mean-speed distribution", "mean speed (m/s)", "ticks",
             0.0, vmax, 0.0, ymax);
  const std::size_t n_series = std::min<std::size_t>(data.size(), 2);
  for (std::size_t s = 0; s < n_series; ++s) {
    for (int b = 0; b < kBins; ++b) {
      if (counts[s][b] == 0) continue;
      const double left = sx(b * bin_width, 0.0, vmax);
      const double right = sx((b + 1) * bin_width, 0.0, vmax);
      const double slot = (right - left) / static_cast<double>(n_series);
      const double x = left + slot * static_cast<double>(s) + 1.0;
      const double top = sy(counts[s][b], 0.0, ymax);
      const double bottom = sy(0.0, 0.0, ymax);
      svg << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(top) << "\" width=\""
          << fmt(std::max(1.0, slot - 2.0)) << "\" height=\""
          << fmt(bottom - top) << "\" fill=\"" << kSeriesColors[s]
          << "\" fill-opacity=\"0.8\"/>\n";
    }
  }
  draw_legend(svg, labels);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string render_chart_svg(const std::vector<std::string>& metrics_csv_texts,
                             const std::vector<std::string>& series_labels,
                             ChartKind kind) {
  std::vector<ParsedMetrics> data;
  data.reserve(metrics_csv_texts.size());
  for (const std::string& text : metrics_csv_texts) {
    data.push_back(parse_metrics(text));
  }
  std::vector<std::string> labels = series_labels;
  labels.resize(data.size());

  switch (kind) {
    case ChartKind::congestion_vs_time:
      return render_lines(data, labels, "Congested vehicles over time",
                          "congested vehicles", &ParsedMetrics::congested);
    case ChartKind::overhead_vs_time:
      return render_lines(data, labels, "Cumulative warning messages",
                          "messages", &ParsedMetrics::msgs_total);
    case ChartKind::speed_histogram:
      return render_histogram(data, labels);
  }
  throw SchemaMismatchError("unknown chart kind");
}

void render_chart(const std::vector<std::string>& metrics_csv_paths,
                  ChartKind kind, const std::string& out_path) {
  std::vector<std::string> texts;
  std::vector<std::string> labels;
  for (const std::string& path : metrics_csv_paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    texts.push_back(buf.str());
    const std::filesystem::path p(path);
    const std::string parent = p.parent_path().filename().string();
    labels.push_back(parent.empty() ? p.stem().string() : parent);
  }
  const std::string svg = render_chart_svg(texts, labels, kind);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  out << svg;
  out.flush();
  if (!out) throw IoError("short write to " + out_path);
}

}  // namespace cdca
