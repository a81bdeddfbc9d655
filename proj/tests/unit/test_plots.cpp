#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "builders.hpp"
#include "psm/balance.hpp"
#include "psm/matcher.hpp"
#include "psm/plots.hpp"
#include "psm/propensity.hpp"
#include "psm/rng.hpp"
#include "psm/simgen.hpp"

using namespace psm;
namespace pt = boost::property_tree;

namespace {

pt::ptree parse(const std::string& svg) {
  std::istringstream in(svg);
  pt::ptree tree;
  pt::read_xml(in, tree);
  return tree;
}

// Every element named `name` below `node`, depth first.
void collect(const pt::ptree& node, const std::string& name, std::vector<const pt::ptree*>& out) {
  for (const auto& [key, child] : node) {
    if (key == name) out.push_back(&child);
    if (key != "<xmlattr>") collect(child, name, out);
  }
}

std::vector<const pt::ptree*> elements(const pt::ptree& root, const std::string& name) {
  std::vector<const pt::ptree*> out;
  collect(root, name, out);
  return out;
}

std::string attr(const pt::ptree* node, const std::string& name) {
  return node->get<std::string>("<xmlattr>." + name, "");
}

struct Analysed {
  Dataset ds;
  PropensityModel model;
  MatchResult result;
  std::vector<TermBalance> before, after;

  Analysed(Dataset d, MatchSpec spec) : ds(std::move(d)) {
    model = fit_logistic(ds);
    result = match(model, ds, spec);
    before = smd_table(ds, true);
    after = smd_table(ds, result, Phase::after, true);
  }
};

Analysed simulated(std::uint64_t seed, int ratio = 1) {
  SimSpec spec;
  spec.n = 400;
  spec.covariates = {"x1", "x2", "x3"};
  spec.selection_intercept = -0.5;
  spec.selection = {0.8, -0.4, 0.2};
  spec.outcome = {1, 1, 1};
  spec.seed = seed;
  MatchSpec m;
  m.caliper = 0.15;
  m.ratio = ratio;
  return Analysed(simulate(spec), m);
}

}  // namespace

TEST(Plots, AllFiguresAreWellFormedXml) {
  for (int ratio : {1, 2}) {
    const auto run = simulated(3, ratio);
    const auto files = render_plot_files(run.model, run.ds, run.result, run.before, run.after);
    ASSERT_EQ(files.size(), 5u);
    for (const auto& [name, svg] : files) {
      SCOPED_TRACE(name);
      pt::ptree tree;
      ASSERT_NO_THROW(tree = parse(svg));
      EXPECT_EQ(tree.count("svg"), 1u);
      EXPECT_FALSE(elements(tree, "g").empty());
    }
  }
}

TEST(Plots, FileNames) {
  EXPECT_STREQ(file_name(PlotKind::ps_histogram), "fig_ps_hist.svg");
  EXPECT_STREQ(file_name(PlotKind::ps_dotplot), "fig_ps_dot.svg");
  EXPECT_STREQ(file_name(PlotKind::smd_histogram), "fig_smd_hist.svg");
  EXPECT_STREQ(file_name(PlotKind::smd_dotplot), "fig_smd_dot.svg");
  EXPECT_STREQ(file_name(PlotKind::smd_lineplot), "fig_smd_line.svg");
}

TEST(Plots, PairedPanelsShareAxes) {
  const auto run = simulated(4);
  const auto files = render_plot_files(run.model, run.ds, run.result, run.before, run.after);
  for (const char* name : {"fig_ps_hist.svg", "fig_smd_hist.svg"}) {
    SCOPED_TRACE(name);
    const auto tree = parse(files.at(name));
    const auto panels = elements(tree, "g");
    ASSERT_GE(panels.size(), 2u);
    for (const char* key : {"data-xmin", "data-xmax", "data-ymin", "data-ymax"})
      for (const auto* p : panels) EXPECT_EQ(attr(p, key), attr(panels.front(), key)) << key;
  }
  EXPECT_EQ(elements(parse(files.at("fig_ps_hist.svg")), "g").size(), 4u);
  EXPECT_EQ(elements(parse(files.at("fig_smd_hist.svg")), "g").size(), 2u);
}

TEST(Plots, PropensityHistogramPanels) {
  const auto run = simulated(5);
  const auto s = ps_histogram(run.model, run.ds, run.result);
  ASSERT_EQ(s.panels.size(), 4u);
  EXPECT_EQ(s.panels[0].id, "before-treated");
  EXPECT_EQ(s.panels[1].id, "before-control");
  EXPECT_EQ(s.panels[2].id, "after-treated");
  EXPECT_EQ(s.panels[3].id, "after-control");
  for (const auto& p : s.panels) {
    EXPECT_TRUE(p.kde.has_value());
    double area = 0;
    for (const auto& b : p.bars) area += b.height * (b.hi - b.lo);
    EXPECT_NEAR(area, 1.0, 1e-9);
  }
}

TEST(Plots, WorsenedTermCarriesTheHeavyStroke) {
  auto row = [](const std::string& name, double smd, Phase phase) {
    TermBalance t;
    t.term = name;
    t.smd = smd;
    t.phase = phase;
    return t;
  };
  const std::vector<TermBalance> before{row("age", .5, Phase::before), row("income", -.05, Phase::before),
                                        row("ses", .3, Phase::before)};
  const std::vector<TermBalance> after{row("age", .02, Phase::after), row("income", .2, Phase::after),
                                       row("ses", -.1, Phase::after)};
  const auto tree = parse(render_svg(smd_lineplot(before, after)));
  int heavy = 0;
  for (const auto* line : elements(tree, "line")) {
    const auto cls = attr(line, "class");
    if (cls.rfind("term", 0) != 0) continue;
    if (attr(line, "stroke-width") == "3") {
      ++heavy;
      EXPECT_EQ(attr(line, "data-term"), "income");
      EXPECT_EQ(cls, "term worsened");
    } else {
      EXPECT_EQ(attr(line, "stroke-width"), "1");
    }
  }
  EXPECT_EQ(heavy, 1);
}

TEST(Plots, BalancedInputGivesFlatLines) {
  // every treated unit has an identical control
  const std::vector<int> z{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const auto ds = psm::testing::make_dataset(z, {{"x", {1, 2, 4, 7, 9, 1, 2, 4, 7, 9}},
                                                 {"w", {3, 1, 4, 1, 5, 3, 1, 4, 1, 5}}});
  MatchSpec spec;
  spec.caliper_mode = CaliperMode::nearest_within;
  const Analysed run(ds, spec);
  const auto s = smd_lineplot(run.before, run.after);
  ASSERT_EQ(s.panels.size(), 1u);
  ASSERT_FALSE(s.panels[0].segments.empty());
  for (const auto& seg : s.panels[0].segments) {
    EXPECT_EQ(seg.before, 0.0);
    EXPECT_EQ(seg.after, 0.0);
    EXPECT_FALSE(seg.worsened);
  }
}

TEST(Plots, NoCovariatesGiveMessages) {
  const std::vector<int> z{1, 0, 1, 0, 0};
  const auto ds = psm::testing::make_dataset(z, {});
  const Analysed run(ds, MatchSpec{});
  const auto files = render_plot_files(run.model, run.ds, run.result, run.before, run.after);
  for (const char* name : {"fig_smd_hist.svg", "fig_smd_dot.svg", "fig_smd_line.svg"}) {
    const auto tree = parse(files.at(name));
    bool found = false;
    for (const auto* t : elements(tree, "text")) found = found || attr(t, "class") == "message";
    EXPECT_TRUE(found) << name;
  }
  for (const char* name : {"fig_ps_hist.svg", "fig_ps_dot.svg"})
    EXPECT_FALSE(elements(parse(files.at(name)), "g").empty()) << name;
}

TEST(Plots, DotAreaFollowsWeights) {
  const auto one = simulated(6, 1);
  EXPECT_FALSE(ps_dotplot(one.model, one.ds, one.result).sized_dots);
  const auto two = simulated(6, 2);
  const auto s = ps_dotplot(two.model, two.ds, two.result);
  ASSERT_FALSE(two.result.is_unweighted());
  EXPECT_TRUE(s.sized_dots);
  const auto tree = parse(render_svg(s));
  std::set<std::string> radii;
  for (const auto* c : elements(tree, "circle")) radii.insert(attr(c, "r"));
  EXPECT_GT(radii.size(), 1u);
}

TEST(Plots, DotPlotListsBaseCovariatesInInputOrder) {
  const auto run = simulated(7);
  const auto s = smd_dotplot(run.ds, run.before, run.after);
  EXPECT_EQ(s.categories, (std::vector<std::string>{"x1", "x2", "x3"}));
  for (const auto& d : s.panels[0].dots) EXPECT_GE(d.x, 0.0);
}

TEST(Plots, RenderingIsByteStable) {
  const auto a = simulated(8);
  const auto b = simulated(8);
  EXPECT_EQ(render_plot_files(a.model, a.ds, a.result, a.before, a.after),
            render_plot_files(b.model, b.ds, b.result, b.before, b.after));
}

TEST(Histogram, DensitiesAndSturges) {
  EXPECT_EQ(sturges_bins(1), 1u);
  EXPECT_EQ(sturges_bins(8), 4u);
  EXPECT_EQ(sturges_bins(9), 5u);
  const std::vector<double> v{0.0, 0.1, 0.5, 0.9, 1.0};
  const auto bars = histogram(v, {}, 0.0, 1.0, 2);
  EXPECT_DOUBLE_EQ(bars[0].height, 2.0 / 5 / 0.5);
  EXPECT_DOUBLE_EQ(bars[1].height, 3.0 / 5 / 0.5);
}
