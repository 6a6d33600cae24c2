#ifndef SURPRISE_PLOT_HPP_
#define SURPRISE_PLOT_HPP_

#include <string>
#include <vector>

namespace surprise {

struct PlotSeries {
  std::string label;
  std::vector<double> median;
  std::vector<double> lower;  // interquartile band bounds
  std::vector<double> upper;
};

// Standalone SVG: one median line per series with a shaded interquartile
// band; x axis is iterations of training, y axis average undiscounted return.
std::string emit_plot(const std::vector<PlotSeries>& series);

}  // namespace surprise

#endif  // SURPRISE_PLOT_HPP_
