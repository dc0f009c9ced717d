#include "gendiag/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace gendiag {

namespace {

constexpr int kWidth = 960;
constexpr int kHeight = 540;
constexpr int kLeft = 70;
constexpr int kRight = 150;  // room for the legend
constexpr int kTop = 40;
constexpr int kBottom = 50;

const char* kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string render_traceplot_svg(const MappedChainSet& chains, const std::string& title) {
  if (chains.num_chains() == 0 || chains.chain_length() == 0) {
    throw EmptyInput("no chains to plot");
  }

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (const auto& c : chains.values) {
    n = std::max(n, c.size());
    for (double v : c) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (vmin == vmax) {
    vmin -= 0.5;
    vmax += 0.5;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](std::size_t iter) {
    return kLeft + plot_w * (n > 1 ? static_cast<double>(iter) / (n - 1) : 0.5);
  };
  auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v - vmin) / (vmax - vmin)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " + std::to_string(kWidth) +
         " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + std::to_string(kLeft) +
           "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" + title + "</text>\n";
  }

  // axes
  svg += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + fmt(kTop + plot_h) + "\" x2=\"" +
         fmt(kLeft + plot_w) + "\" y2=\"" + fmt(kTop + plot_h) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop) + "\" x2=\"" +
         std::to_string(kLeft) + "\" y2=\"" + fmt(kTop + plot_h) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + std::to_string(kHeight - 12) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">iteration</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt(kTop + plot_h / 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 "
         "18 " + fmt(kTop + plot_h / 2) + ")\">mapped value</text>\n";

  // min/max ticks
  svg += "<text x=\"" + std::to_string(kLeft - 6) + "\" y=\"" + fmt(kTop + plot_h) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + fmt_tick(vmin) +
         "</text>\n";
  svg += "<text x=\"" + std::to_string(kLeft - 6) + "\" y=\"" + fmt(kTop + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + fmt_tick(vmax) +
         "</text>\n";
  svg += "<text x=\"" + std::to_string(kLeft) + "\" y=\"" + fmt(kTop + plot_h + 16) +
         "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
  svg += "<text x=\"" + fmt(kLeft + plot_w) + "\" y=\"" + fmt(kTop + plot_h + 16) +
         "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
         std::to_string(n - 1) + "</text>\n";

  for (std::size_t i = 0; i < chains.num_chains(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1\" points=\"";
    const auto& c = chains.values[i];
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (t) svg += ' ';
      svg += fmt(x_of(t));
      svg += ',';
      svg += fmt(y_of(c[t]));
    }
    svg += "\"/>\n";

    // legend entry
    const double ly = kTop + 14.0 * static_cast<double>(i);
    svg += "<rect x=\"" + fmt(kWidth - kRight + 16) + "\" y=\"" + fmt(ly) +
           "\" width=\"10\" height=\"10\" fill=\"";
    svg += color;
    svg += "\"/>\n";
    svg += "<text x=\"" + fmt(kWidth - kRight + 32) + "\" y=\"" + fmt(ly + 9) +
           "\" font-family=\"sans-serif\" font-size=\"11\">chain " +
           std::to_string(chains.chain_ids[i]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gendiag
