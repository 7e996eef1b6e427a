// Minimal SVG charts of estimate records: points with 95% bars, one series
// per distinct value of a grouping parameter.
#pragma once

#include <string>
#include <vector>

#include "slabperc/harness.hpp"

namespace slabperc {

struct PlotSpec {
  std::string x_param = "n";
  /// Parameter whose values split the records into series; empty for one series.
  std::string series_param;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

/// Records lacking x_param are skipped. Throws DomainError if none remain or
/// a log axis meets a non-positive value.
std::string render_svg(const std::vector<EstimateRecord>& records, const PlotSpec& spec);

}  // namespace slabperc
