#include "surprise/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "surprise/tensor.hpp"

namespace surprise {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 72, kRight = 24, kTop = 28, kBottom = 56;

const char* const kColors[] = {"#d62728", "#1f77b4", "#2ca02c",
                               "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string emit_plot(const std::vector<PlotSeries>& series) {
  require(!series.empty(), "emit_plot: no series");
  std::size_t max_iters = 0;
  double y_min = 0.0, y_max = 0.0;
  bool first = true;
  for (const auto& s : series) {
    require(s.median.size() == s.lower.size() &&
                s.median.size() == s.upper.size(),
            "emit_plot: series arrays must have equal length");
    require(!s.median.empty(), "emit_plot: empty series");
    max_iters = std::max(max_iters, s.median.size());
    for (std::size_t i = 0; i < s.median.size(); ++i) {
      if (first) {
        y_min = s.lower[i];
        y_max = s.upper[i];
        first = false;
      }
      y_min = std::min({y_min, s.lower[i], s.median[i]});
      y_max = std::max({y_max, s.upper[i], s.median[i]});
    }
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 1.0;
    y_max += 1.0;
  } else {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }
  const double x_max = static_cast<double>(max_iters > 1 ? max_iters - 1 : 1);

  auto px = [&](double it) {
    return kLeft + (kWidth - kLeft - kRight) * (it / x_max);
  };
  auto py = [&](double v) {
    return kHeight - kBottom -
           (kHeight - kTop - kBottom) * ((v - y_min) / (y_max - y_min));
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << (kHeight - kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << (kHeight - kBottom)
      << "\" x2=\"" << (kWidth - kRight) << "\" y2=\"" << (kHeight - kBottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // ticks
  for (int t = 0; t <= 4; ++t) {
    const double xv = x_max * t / 4.0;
    const double yv = y_min + (y_max - y_min) * t / 4.0;
    svg << "<line x1=\"" << px(xv) << "\" y1=\"" << (kHeight - kBottom)
        << "\" x2=\"" << px(xv) << "\" y2=\"" << (kHeight - kBottom + 5)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(xv) << "\" y=\"" << (kHeight - kBottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << num(std::round(xv))
        << "</text>\n";
    svg << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << py(yv) << "\" x2=\""
        << kLeft << "\" y2=\"" << py(yv) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (kLeft - 8) << "\" y=\"" << (py(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }

  // axis labels
  svg << "<text x=\"" << (kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\""
      << (kHeight - 14)
      << "\" font-size=\"13\" text-anchor=\"middle\">iterations of "
         "training</text>\n";
  svg << "<text x=\"18\" y=\"" << (kTop + (kHeight - kTop - kBottom) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (kTop + (kHeight - kTop - kBottom) / 2)
      << ")\">average undiscounted return</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    // interquartile band: upper bound forward, lower bound back
    std::ostringstream band;
    band << "M";
    for (std::size_t i = 0; i < s.upper.size(); ++i) {
      band << (i ? " L" : "") << px(static_cast<double>(i)) << " "
           << py(s.upper[i]);
    }
    for (std::size_t i = s.lower.size(); i-- > 0;) {
      band << " L" << px(static_cast<double>(i)) << " " << py(s.lower[i]);
    }
    band << " Z";
    svg << "<path d=\"" << band.str() << "\" fill=\"" << color
        << "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";

    std::ostringstream line;
    for (std::size_t i = 0; i < s.median.size(); ++i) {
      line << (i ? " " : "") << px(static_cast<double>(i)) << ","
           << py(s.median[i]);
    }
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"1.8\"/>\n";

    // legend entry
    const double ly = kTop + 16.0 * static_cast<double>(si);
    svg << "<line x1=\"" << (kLeft + 10) << "\" y1=\"" << ly << "\" x2=\""
        << (kLeft + 34) << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (kLeft + 40) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"12\">" << escape_xml(s.label) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace surprise
