#pragma once

#include <string>
#include <vector>

namespace osc::harness {

struct PlotPanel {
  std::string title;
  std::string ylabel;
  std::vector<double> values;  // indexed by iteration
};

// Side-by-side semilog panels, one per entry, iteration on the x axis.
std::string semilog_svg(const std::vector<PlotPanel>& panels);

}  // namespace osc::harness
