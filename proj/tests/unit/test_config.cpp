#include <gtest/gtest.h>

#include "psm/config.hpp"
#include "psm/errors.hpp"

using namespace psm;

namespace {

std::map<std::string, std::string> minimal() {
  return {{"input", "d.csv"}, {"treatment", "z"}, {"covariates", "x1,x2"}, {"out", "results"}};
}

}  // namespace

TEST(KeyValues, CommentsBlankLinesAndDashes) {
  const auto kv = parse_key_values("# settings\n\ninput = d.csv  # trailing\n--caliper=0.15\n  seed =  7 \n");
  EXPECT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv.at("input"), "d.csv");
  EXPECT_EQ(kv.at("caliper"), "0.15");
  EXPECT_EQ(kv.at("seed"), "7");
}

TEST(KeyValues, Errors) {
  EXPECT_THROW(parse_key_values("a = 1\na = 2\n"), InvalidConfig);
  EXPECT_THROW(parse_key_values("just words\n"), InvalidConfig);
  EXPECT_THROW(parse_key_values(" = 3\n"), InvalidConfig);
}

TEST(SplitList, TrimsAndDropsEmpty) {
  EXPECT_EQ(split_list(" a, b ,c,, "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(split_list("").empty());
}

TEST(RunConfig, Defaults) {
  const auto c = resolve_run_config(minimal());
  EXPECT_EQ(c.roles.treatment, "z");
  EXPECT_EQ(c.roles.covariates, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(c.match.ratio, 1);
  EXPECT_FALSE(c.match.replace);
  EXPECT_FALSE(c.match.caliper.has_value());
  EXPECT_EQ(c.match.discard, DiscardPolicy::none);
  EXPECT_EQ(c.report, ReportMode::full);
  EXPECT_EQ(c.export_mode, ExportMode::full);
}

TEST(RunConfig, AllKeys) {
  auto kv = minimal();
  kv.insert({{"balance-only", "b1"}, {"id", "pid"}, {"ratio", "2"}, {"replace", "true"}, {"caliper", "0.15"},
             {"caliper-mode", "nearest"}, {"discard", "both"}, {"seed", "42"}, {"report", "condensed"},
             {"export", "matched"}, {"outcomes", "y1,y2"}});
  const auto c = resolve_run_config(kv);
  EXPECT_EQ(c.roles.balance_only, (std::vector<std::string>{"b1"}));
  EXPECT_EQ(c.roles.id, "pid");
  EXPECT_EQ(c.match.ratio, 2);
  EXPECT_TRUE(c.match.replace);
  EXPECT_EQ(c.match.caliper, 0.15);
  EXPECT_EQ(c.match.caliper_mode, CaliperMode::nearest_within);
  EXPECT_EQ(c.match.discard, DiscardPolicy::both);
  EXPECT_EQ(c.match.seed, 42u);
  EXPECT_EQ(c.report, ReportMode::condensed);
  EXPECT_EQ(c.export_mode, ExportMode::matched_only);
  EXPECT_EQ(c.outcomes, (std::vector<std::string>{"y1", "y2"}));
}

TEST(RunConfig, OverridesWin) {
  auto file = minimal();
  file["caliper"] = "0.2";
  file["seed"] = "1";
  const auto c = resolve_run_config(file, {{"caliper", "0.15"}});
  EXPECT_EQ(c.match.caliper, 0.15);
  EXPECT_EQ(c.match.seed, 1u);
}

TEST(RunConfig, RequiredKeys) {
  for (const char* key : {"input", "treatment", "covariates", "out"}) {
    auto kv = minimal();
    kv.erase(key);
    EXPECT_THROW(resolve_run_config(kv), InvalidConfig) << key;
  }
}

TEST(RunConfig, InvalidValues) {
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"ratio", "0"},       {"ratio", "two"},    {"caliper", "-1"},  {"caliper", "abc"}, {"discard", "some"},
      {"report", "short"},  {"export", "all"},   {"replace", "yes!"}, {"seed", "-3"},   {"colour", "red"}};
  for (const auto& [key, value] : bad) {
    auto kv = minimal();
    kv[key] = value;
    EXPECT_THROW(resolve_run_config(kv), InvalidConfig) << key << "=" << value;
  }
}

TEST(RunConfig, CaliperModeNeedsACaliper) {
  auto kv = minimal();
  kv["caliper-mode"] = "nearest";
  EXPECT_THROW(resolve_run_config(kv), InvalidConfig);
  kv["caliper"] = "none";
  EXPECT_THROW(resolve_run_config(kv), InvalidConfig);
  kv["caliper"] = "0.1";
  EXPECT_NO_THROW(resolve_run_config(kv));
}

TEST(RunConfig, DescribeRoundTrips) {
  auto kv = minimal();
  kv.insert({{"ratio", "3"}, {"caliper", "0.25"}, {"discard", "treated"}, {"seed", "9"}, {"replace", "true"}});
  const auto c = resolve_run_config(kv);
  const auto again = resolve_run_config(parse_key_values(describe(c)));
  EXPECT_EQ(describe(again), describe(c));
  EXPECT_EQ(again.match.ratio, 3);
  EXPECT_EQ(again.match.discard, DiscardPolicy::treated_only);
}
