#include "psm/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psm/csv.hpp"
#include "psm/errors.hpp"
#include "psm/propensity.hpp"
#include "psm/rng.hpp"
#include "psm/svg.hpp"

namespace psm {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kDotRadius = 3.0;
constexpr const char* kTreatedColor = "#1f77b4";
constexpr const char* kControlColor = "#d95f02";

std::string attr_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::optional<KdeCurve> try_kde(std::span<const double> values, std::span<const double> weights) {
  try {
    return kde(values, weights);
  } catch (const DegenerateData&) {
    return std::nullopt;
  }
}

void widen_if_flat(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
}

// Upper y limit covering bars and the part of each curve inside [x_min, x_max].
double density_ceiling(const std::vector<Panel>& panels, double x_min, double x_max) {
  double top = 0.0;
  for (const auto& p : panels) {
    for (const auto& b : p.bars) top = std::max(top, b.height);
    if (p.kde)
      for (std::size_t i = 0; i < p.kde->x.size(); ++i)
        if (p.kde->x[i] >= x_min && p.kde->x[i] <= x_max) top = std::max(top, p.kde->density[i]);
  }
  return top > 0.0 ? top * 1.08 : 1.0;
}

struct Frame {
  double left, top, width, height;
  double x_min, x_max, y_min, y_max;

  double px(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }
  double py(double y) const { return top + height - (y - y_min) / (y_max - y_min) * height; }
};

std::vector<Frame> layout(const PlotSeries& s) {
  const double left = 80, right = 30, top = 60, bottom = 70, gap = 70;
  std::size_t cols = 1, rows = 1;
  if (s.panels.size() == 2) cols = 2;
  if (s.panels.size() == 4) cols = rows = 2;
  const double w = (kWidth - left - right - gap * static_cast<double>(cols - 1)) / static_cast<double>(cols);
  const double h = (kHeight - top - bottom - gap * static_cast<double>(rows - 1)) / static_cast<double>(rows);
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < s.panels.size(); ++i) {
    const auto r = static_cast<double>(i / cols), c = static_cast<double>(i % cols);
    frames.push_back({left + c * (w + gap), top + r * (h + gap), w, h, s.x_min, s.x_max, s.y_min, s.y_max});
  }
  return frames;
}

void draw_axes(svg::Document& doc, const PlotSeries& s, const Frame& f) {
  const svg::Attributes axis = {{"stroke", "black"}, {"stroke-width", "1"}};
  const svg::Attributes small = {{"font-size", "10"}, {"text-anchor", "middle"}};
  doc.rect(f.left, f.top, f.width, f.height, {{"fill", "none"}, {"stroke", "#999999"}});
  doc.line(f.left, f.top + f.height, f.left + f.width, f.top + f.height, axis);
  doc.line(f.left, f.top, f.left, f.top + f.height, axis);

  const bool x_categories = s.kind == PlotKind::smd_lineplot;
  if (x_categories) {
    doc.text(f.px(0.0), f.top + f.height + 16, "Before", small);
    doc.text(f.px(1.0), f.top + f.height + 16, "After", small);
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double x = s.x_min + (s.x_max - s.x_min) * k / 4.0;
      doc.line(f.px(x), f.top + f.height, f.px(x), f.top + f.height + 4, axis);
      doc.text(f.px(x), f.top + f.height + 16, tick_label(x), small);
    }
  }
  if (!s.categories.empty()) {
    for (std::size_t k = 0; k < s.categories.size(); ++k) {
      const double y = f.py(static_cast<double>(k));
      doc.text(f.left - 6, y + 3, s.categories[k], {{"font-size", "10"}, {"text-anchor", "end"}});
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double y = s.y_min + (s.y_max - s.y_min) * k / 4.0;
      doc.line(f.left - 4, f.py(y), f.left, f.py(y), axis);
      doc.text(f.left - 6, f.py(y) + 3, tick_label(y), {{"font-size", "10"}, {"text-anchor", "end"}});
    }
  }
  doc.text(f.left + f.width / 2, f.top + f.height + 34, s.x_label, {{"font-size", "12"}, {"text-anchor", "middle"}});
  if (!s.y_label.empty() && s.categories.empty()) {
    const double x = f.left - 48, y = f.top + f.height / 2;
    doc.text(x, y, s.y_label,
             {{"font-size", "12"},
              {"text-anchor", "middle"},
              {"transform", "rotate(-90 " + svg::num(x) + " " + svg::num(y) + ")"}});
  }
}

const char* dot_color(const std::string& label) {
  return label == "control" || label == "before" ? kControlColor : kTreatedColor;
}

void draw_panel(svg::Document& doc, const PlotSeries& s, const Panel& p, const Frame& f) {
  doc.open_group({{"class", "panel"},
                  {"id", p.id},
                  {"data-xmin", attr_number(s.x_min)},
                  {"data-xmax", attr_number(s.x_max)},
                  {"data-ymin", attr_number(s.y_min)},
                  {"data-ymax", attr_number(s.y_max)}});
  doc.text(f.left + f.width / 2, f.top - 8, p.title, {{"font-size", "13"}, {"text-anchor", "middle"}});
  draw_axes(doc, s, f);

  for (const auto& b : p.bars) {
    if (!(b.height > 0.0)) continue;
    doc.rect(f.px(b.lo), f.py(b.height), f.px(b.hi) - f.px(b.lo), f.py(0.0) - f.py(b.height),
             {{"class", "bar"}, {"fill", "#c6dbef"}, {"stroke", "#4a6f8a"}, {"stroke-width", "0.5"}});
  }
  if (p.kde) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < p.kde->x.size(); ++i) {
      if (p.kde->x[i] < s.x_min || p.kde->x[i] > s.x_max) continue;
      pts.emplace_back(f.px(p.kde->x[i]), f.py(std::min(p.kde->density[i], s.y_max)));
    }
    if (pts.size() >= 2) doc.polyline(pts, {{"class", "kde"}, {"stroke", "#08306b"}, {"stroke-width", "1.5"}});
  }
  for (const auto& seg : p.segments) {
    doc.line(f.px(0.0), f.py(seg.before), f.px(1.0), f.py(seg.after),
             {{"class", seg.worsened ? "term worsened" : "term"},
              {"data-term", seg.label},
              {"stroke", seg.worsened ? "#000000" : "#888888"},
              {"stroke-width", seg.worsened ? "3" : "1"}});
  }
  for (const auto& d : p.dots) {
    double r = kDotRadius;
    if (s.sized_dots && d.weight > 0.0) r = kDotRadius * std::sqrt(d.weight);
    const bool hollow = d.label == "before" || (s.kind == PlotKind::ps_dotplot && !(d.weight > 0.0));
    doc.circle(f.px(d.x), f.py(d.y), r,
               {{"class", "dot " + d.label},
                {"fill", hollow ? "none" : dot_color(d.label)},
                {"stroke", dot_color(d.label)},
                {"fill-opacity", "0.7"}});
  }
  doc.close_group();
}

}  // namespace

const char* file_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::ps_histogram: return "fig_ps_hist.svg";
    case PlotKind::ps_dotplot: return "fig_ps_dot.svg";
    case PlotKind::smd_histogram: return "fig_smd_hist.svg";
    case PlotKind::smd_dotplot: return "fig_smd_dot.svg";
    case PlotKind::smd_lineplot: return "fig_smd_line.svg";
  }
  return "fig_unknown.svg";
}

std::size_t sturges_bins(std::size_t n) {
  if (n < 2) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
}

std::vector<Bar> histogram(std::span<const double> values, std::span<const double> weights, double lo, double hi,
                           std::size_t bins) {
  std::vector<Bar> out(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + width * static_cast<double>(b);
    out[b].hi = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) continue;
    const double raw = std::floor((values[i] - lo) / width);
    const auto b = static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(bins - 1)));
    out[b].height += w;
    total += w;
  }
  if (total > 0.0)
    for (auto& bar : out) bar.height /= total * width;
  return out;
}

PlotSeries ps_histogram(const PropensityModel& model, const Dataset& ds, const MatchResult& result) {
  PlotSeries s;
  s.kind = PlotKind::ps_histogram;
  s.title = "Distribution of propensity scores";
  s.x_label = "Propensity score";
  s.y_label = "Density";
  const auto [lo_it, hi_it] = std::minmax_element(model.scores.begin(), model.scores.end());
  s.x_min = *lo_it;
  s.x_max = *hi_it;
  widen_if_flat(s.x_min, s.x_max);
  const std::size_t bins = sturges_bins(ds.size());

  for (const Phase phase : {Phase::before, Phase::after}) {
    for (const int group : {1, 0}) {
      std::vector<double> values, weights;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.treatment()[i] != group) continue;
        const double w = phase == Phase::before ? 1.0 : result.weights[i];
        if (!(w > 0.0)) continue;
        values.push_back(model.scores[i]);
        weights.push_back(w);
      }
      Panel p;
      p.id = std::string(to_string(phase)) + (group == 1 ? "-treated" : "-control");
      p.title = std::string(phase == Phase::before ? "Raw " : "Matched ") + (group == 1 ? "treated" : "control");
      p.bars = histogram(values, weights, s.x_min, s.x_max, bins);
      p.kde = try_kde(values, weights);
      s.panels.push_back(std::move(p));
    }
  }
  s.y_min = 0.0;
  s.y_max = density_ceiling(s.panels, s.x_min, s.x_max);
  return s;
}

PlotSeries ps_dotplot(const PropensityModel& model, const Dataset& ds, const MatchResult& result) {
  PlotSeries s;
  s.kind = PlotKind::ps_dotplot;
  s.title = "Distribution of propensity scores by match status";
  s.x_label = "Propensity score";
  s.categories = {"Unmatched treated", "Matched treated", "Matched control", "Unmatched control"};
  const auto [lo_it, hi_it] = std::minmax_element(model.scores.begin(), model.scores.end());
  s.x_min = *lo_it;
  s.x_max = *hi_it;
  widen_if_flat(s.x_min, s.x_max);
  s.y_min = -0.6;
  s.y_max = 3.6;

  Panel p;
  p.id = "units";
  p.title = "Individual units";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool treated = ds.is_treated(i);
    const bool matched = result.disposition[i] == Disposition::matched;
    const double strip = treated ? (matched ? 1.0 : 0.0) : (matched ? 2.0 : 3.0);
    // Jitter depends only on the row, so the figure is reproducible.
    SplitMix64 jitter(static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL + 1);
    const double y = strip + (jitter.uniform() - 0.5) * 0.6;
    const double w = result.weights[i];
    if (matched && w != 1.0) s.sized_dots = true;
    p.dots.push_back({model.scores[i], y, w, treated ? "treated" : "control"});
  }
  s.panels.push_back(std::move(p));
  return s;
}

PlotSeries smd_histogram(std::span<const TermBalance> before, std::span<const TermBalance> after) {
  PlotSeries s;
  s.kind = PlotKind::smd_histogram;
  s.title = "Standardized differences of all terms";
  s.x_label = "Standardized mean difference";
  s.y_label = "Density";

  auto finite = [](std::span<const TermBalance> terms) {
    std::vector<double> v;
    for (const auto& t : terms)
      if (std::isfinite(t.smd)) v.push_back(t.smd);
    return v;
  };
  const auto b = finite(before), a = finite(after);
  if (b.empty() && a.empty()) {
    s.message = "No balance terms to display";
    return s;
  }
  std::vector<double> pooled = b;
  pooled.insert(pooled.end(), a.begin(), a.end());
  const auto [lo_it, hi_it] = std::minmax_element(pooled.begin(), pooled.end());
  s.x_min = *lo_it;
  s.x_max = *hi_it;
  widen_if_flat(s.x_min, s.x_max);
  const std::size_t bins = sturges_bins(pooled.size());

  for (const auto& [id, values] : {std::pair{"before", b}, std::pair{"after", a}}) {
    Panel p;
    p.id = id;
    p.title = std::string(id) == "before" ? "Before matching" : "After matching";
    p.bars = histogram(values, {}, s.x_min, s.x_max, bins);
    p.kde = try_kde(values, {});
    s.panels.push_back(std::move(p));
  }
  s.y_min = 0.0;
  s.y_max = density_ceiling(s.panels, s.x_min, s.x_max);
  return s;
}

PlotSeries smd_dotplot(const Dataset& ds, std::span<const TermBalance> before, std::span<const TermBalance> after) {
  PlotSeries s;
  s.kind = PlotKind::smd_dotplot;
  s.title = "Standardized mean differences by covariate";
  s.x_label = "Absolute standardized mean difference";

  auto lookup = [](std::span<const TermBalance> terms, const std::string& name) {
    for (const auto& t : terms)
      if (t.term == name) return t.smd;
    return std::numeric_limits<double>::quiet_NaN();
  };
  Panel p;
  p.id = "covariates";
  p.title = "Before (open) and after (filled) matching";
  double top = 0.0;
  for (const auto& v : ds.balance_variables()) {
    const double y = static_cast<double>(s.categories.size());
    s.categories.push_back(v.name);
    const double sb = lookup(before, v.name), sa = lookup(after, v.name);
    if (std::isfinite(sb)) p.dots.push_back({std::abs(sb), y, 1.0, "before"}), top = std::max(top, std::abs(sb));
    if (std::isfinite(sa)) p.dots.push_back({std::abs(sa), y, 1.0, "after"}), top = std::max(top, std::abs(sa));
  }
  if (s.categories.empty()) {
    s.message = "No covariates to display";
    return s;
  }
  s.x_min = 0.0;
  s.x_max = top > 0.0 ? top * 1.1 : 1.0;
  s.y_min = -0.6;
  s.y_max = static_cast<double>(s.categories.size()) - 0.4;
  s.panels.push_back(std::move(p));
  return s;
}

PlotSeries smd_lineplot(std::span<const TermBalance> before, std::span<const TermBalance> after) {
  PlotSeries s;
  s.kind = PlotKind::smd_lineplot;
  s.title = "Standardized differences before and after matching";
  s.x_label = "Sample";
  s.y_label = "Absolute standardized mean difference";

  Panel p;
  p.id = "terms";
  p.title = "All terms (bold: imbalance increased)";
  double top = 0.0;
  for (const auto& b : before) {
    const auto it = std::find_if(after.begin(), after.end(), [&](const TermBalance& a) { return a.term == b.term; });
    if (it == after.end() || !std::isfinite(b.smd) || !std::isfinite(it->smd)) continue;
    const double from = std::abs(b.smd), to = std::abs(it->smd);
    p.segments.push_back({b.term, from, to, to > from});
    top = std::max({top, from, to});
  }
  if (p.segments.empty()) {
    s.message = "No balance terms to display";
    return s;
  }
  s.x_min = -0.25;
  s.x_max = 1.25;
  s.y_min = 0.0;
  s.y_max = top > 0.0 ? top * 1.08 : 1.0;
  s.panels.push_back(std::move(p));
  return s;
}

std::string render_svg(const PlotSeries& series) {
  svg::Document doc(kWidth, kHeight);
  doc.text(kWidth / 2, 28, series.title, {{"font-size", "16"}, {"text-anchor", "middle"}});
  if (!series.message.empty()) {
    doc.text(kWidth / 2, kHeight / 2, series.message,
             {{"class", "message"}, {"font-size", "14"}, {"text-anchor", "middle"}});
    return doc.str();
  }
  const auto frames = layout(series);
  for (std::size_t i = 0; i < series.panels.size(); ++i) draw_panel(doc, series, series.panels[i], frames[i]);
  return doc.str();
}

std::map<std::string, std::string> render_plot_files(const PropensityModel& model, const Dataset& ds,
                                                     const MatchResult& result,
                                                     std::span<const TermBalance> terms_before,
                                                     std::span<const TermBalance> terms_after) {
  std::map<std::string, std::string> files;
  for (const auto& series : {ps_histogram(model, ds, result), ps_dotplot(model, ds, result),
                             smd_histogram(terms_before, terms_after), smd_dotplot(ds, terms_before, terms_after),
                             smd_lineplot(terms_before, terms_after)})
    files[file_name(series.kind)] = render_svg(series);
  return files;
}

void render_plots(const PropensityModel& model, const Dataset& ds, const MatchResult& result,
                  std::span<const TermBalance> terms_before, std::span<const TermBalance> terms_after,
                  const std::filesystem::path& outdir) {
  for (const auto& [name, content] : render_plot_files(model, ds, result, terms_before, terms_after))
    write_text_file(outdir / name, content);
}

}  // namespace psm
