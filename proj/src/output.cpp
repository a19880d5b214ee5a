// Copyright 2026 The lqdeep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lqdeep/output.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace lqdeep {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string CsvEscape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void CsvTable::AddRow(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw std::logic_error("CSV row width does not match its header");
  }
  rows.push_back(std::move(row));
}

void WriteCsv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  if (!out) throw ConfigError("error while writing " + path);
}

std::vector<std::string> GainColumns(const std::string& prefix, int d_u,
                                     int d_x) {
  std::vector<std::string> cols;
  for (int i = 0; i < d_u; ++i) {
    for (int j = 0; j < d_x; ++j) {
      cols.push_back(prefix + "_" + std::to_string(i) + "_" + std::to_string(j));
    }
  }
  return cols;
}

std::vector<std::string> GainCells(const Matrix& m) {
  std::vector<std::string> cells;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      cells.push_back(FormatDouble(m(i, j)));
    }
  }
  return cells;
}

void WriteSvgPlot(const std::string& path, const std::string& title,
                  const std::string& x_label, const std::vector<double>& x,
                  const std::vector<PlotSeries>& series, bool log_y) {
  constexpr double kWidth = 640, kHeight = 400, kMargin = 50;
  auto transform = [log_y](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [log_y](double v) {
    return std::isfinite(v) && (!log_y || v > 0.0);
  };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(x.size(), s.y.size()); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(x[i])) continue;
      x_lo = std::min(x_lo, x[i]);
      x_hi = std::max(x_hi, x[i]);
      y_lo = std::min(y_lo, transform(s.y[i]));
      y_hi = std::max(y_hi, transform(s.y[i]));
    }
  }
  if (!(x_hi >= x_lo)) x_lo = 0, x_hi = 1;
  if (!(y_hi >= y_lo)) y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">"
      << title << "</text>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
      << "<text x=\"5\" y=\"" << kMargin - 10 << "\">"
      << (log_y ? "log10 " : "") << FormatDouble(y_hi) << "</text>\n"
      << "<text x=\"5\" y=\"" << kHeight - kMargin << "\">"
      << (log_y ? "log10 " : "") << FormatDouble(y_lo) << "</text>\n"
      << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
      << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < std::min(x.size(), s.y.size()); ++i) {
      if (!usable(s.y[i]) || !std::isfinite(x[i])) continue;
      const double px =
          kMargin + (x[i] - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin);
      const double py = kHeight - kMargin - (transform(s.y[i]) - y_lo) /
                                                (y_hi - y_lo) *
                                                (kHeight - 2 * kMargin);
      out << FormatDouble(px) << ',' << FormatDouble(py) << ' ';
    }
    out << "\"/>\n<text x=\"" << kWidth - kMargin + 5 << "\" y=\""
        << kMargin + 15 * (k + 1) << "\" fill=\"" << color
        << "\" font-size=\"10\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace lqdeep
