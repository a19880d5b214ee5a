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

///////////////////////////////////////////////////////////////////////////////
//
// CSV and plot emission. Doubles are written in the shortest decimal form
// that parses back to the same bits, so reruns compare byte for byte.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef LQDEEP_OUTPUT_H_
#define LQDEEP_OUTPUT_H_

#include <string>
#include <vector>

#include "lqdeep/types.h"

namespace lqdeep {

// Shortest round-trip representation; "nan", "inf" and "-inf" otherwise.
std::string FormatDouble(double value);

// Quotes a cell that contains a comma, quote or newline.
std::string CsvEscape(const std::string& cell);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void AddRow(std::vector<std::string> row);
};

// Throws ConfigError if the file cannot be written.
void WriteCsv(const std::string& path, const CsvTable& table);

// Column names for a d_u x d_x gain, e.g. theta_0_0, theta_0_1, ...
std::vector<std::string> GainColumns(const std::string& prefix, int d_u,
                                     int d_x);
// Row-major entries of `m`, formatted.
std::vector<std::string> GainCells(const Matrix& m);

struct PlotSeries {
  std::string name;
  std::vector<double> y;
};

// Minimal static line chart; one polyline per series over a shared x axis.
// Non-finite points are skipped. With log_y, non-positive points are too.
void WriteSvgPlot(const std::string& path, const std::string& title,
                  const std::string& x_label, const std::vector<double>& x,
                  const std::vector<PlotSeries>& series, bool log_y);

}  // namespace lqdeep

#endif  // LQDEEP_OUTPUT_H_
