#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psm/balance.hpp"
#include "psm/kde.hpp"

namespace psm {

struct PropensityModel;

enum class PlotKind { ps_histogram, ps_dotplot, smd_histogram, smd_dotplot, smd_lineplot };

// Output file name for each plot, e.g. "fig_ps_hist.svg".
const char* file_name(PlotKind kind);

struct Bar {
  double lo = 0.0;
  double hi = 0.0;
  double height = 0.0;  // density
};

struct Dot {
  double x = 0.0;
  double y = 0.0;
  double weight = 1.0;
  std::string label;
};

// A before -> after line in the parallel line plot.
struct Segment {
  std::string label;
  double before = 0.0;
  double after = 0.0;
  bool worsened = false;  // |after| > |before|
};

struct Panel {
  std::string id;
  std::string title;
  std::vector<Bar> bars;
  std::optional<KdeCurve> kde;
  std::vector<Dot> dots;
  std::vector<Segment> segments;
};

// Everything needed to draw one figure. All panels of a figure are drawn on
// the same axis ranges.
struct PlotSeries {
  PlotKind kind = PlotKind::ps_histogram;
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  std::vector<std::string> categories;  // y-axis labels for strip/dot plots
  std::vector<Panel> panels;
  bool sized_dots = false;  // dot area proportional to weight
  std::string message;      // shown instead of data when nothing can be drawn
};

// Equal-width histogram as densities over [lo, hi]; empty weights count
// every value once.
std::vector<Bar> histogram(std::span<const double> values, std::span<const double> weights, double lo, double hi,
                           std::size_t bins);

// ceil(log2 n) + 1
std::size_t sturges_bins(std::size_t n);

PlotSeries ps_histogram(const PropensityModel& model, const Dataset& ds, const MatchResult& result);
PlotSeries ps_dotplot(const PropensityModel& model, const Dataset& ds, const MatchResult& result);
PlotSeries smd_histogram(std::span<const TermBalance> before, std::span<const TermBalance> after);
// Base covariates only, in input order.
PlotSeries smd_dotplot(const Dataset& ds, std::span<const TermBalance> before, std::span<const TermBalance> after);
PlotSeries smd_lineplot(std::span<const TermBalance> before, std::span<const TermBalance> after);

std::string render_svg(const PlotSeries& series);

// All five figures keyed by file name.
std::map<std::string, std::string> render_plot_files(const PropensityModel& model, const Dataset& ds,
                                                     const MatchResult& result,
                                                     std::span<const TermBalance> terms_before,
                                                     std::span<const TermBalance> terms_after);

void render_plots(const PropensityModel& model, const Dataset& ds, const MatchResult& result,
                  std::span<const TermBalance> terms_before, std::span<const TermBalance> terms_after,
                  const std::filesystem::path& outdir);

}  // namespace psm
