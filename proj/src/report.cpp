#include "psm/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace psm {

namespace {

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v == 0.0 ? 0.0 : v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string join(const std::vector<std::string>& items) {
  if (items.empty()) return "-";
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string omnibus_line(const OmnibusResult& r) {
  if (!r.computed) return r.note;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "chi2(%d) = %.2f, p = %.4f", r.df, r.statistic, r.p_value);
  return buf;
}

std::size_t term_width(const std::vector<TermBalance>& terms) {
  std::size_t w = 4;
  for (const auto& t : terms) w = std::max(w, t.term.size());
  return w + 2;
}

void term_table(std::ostringstream& os, const std::vector<TermBalance>& terms) {
  const std::size_t w = term_width(terms);
  os << "  " << pad("term", w) << lpad("mean_t", 12) << lpad("mean_c", 12) << lpad("sd_c", 12) << lpad("d", 10)
     << '\n';
  for (const auto& t : terms) {
    os << "  " << pad(t.term, w) << lpad(fixed(t.mean_t), 12) << lpad(fixed(t.mean_c), 12) << lpad(fixed(t.sd_c), 12)
       << lpad(fixed(t.smd), 10) << (t.zero_variance ? "  (zero control variance)" : "") << '\n';
  }
}

void sample_sizes(std::ostringstream& os, const SampleSizeTable& s) {
  auto row = [&](const char* label, std::size_t t, std::size_t c) {
    os << "  " << pad(label, 24) << lpad(std::to_string(t), 10) << lpad(std::to_string(c), 10) << '\n';
  };
  os << "  " << pad("", 24) << lpad("treated", 10) << lpad("control", 10) << '\n';
  row("All", s.treated.total, s.control.total);
  row("Matched", s.treated.matched, s.control.matched);
  row("Discarded (no support)", s.treated.discarded_support, s.control.discarded_support);
  row("Unmatched (no match)", s.treated.unmatched_no_match, s.control.unmatched_no_match);
  row("Unused controls", s.treated.unused_control, s.control.unused_control);
}

void outcome_lines(std::ostringstream& os, const std::vector<OutcomeSummary>& outcomes) {
  for (const auto& o : outcomes) {
    os << "  " << o.name << '\n'
       << "    before: mean treated " << fixed(o.mean_t_before) << ", mean control " << fixed(o.mean_c_before)
       << ", difference " << fixed(o.mean_t_before - o.mean_c_before) << ", d = " << fixed(o.d_before(), 3) << '\n'
       << "    after:  mean treated " << fixed(o.mean_t_after) << ", mean control " << fixed(o.mean_c_after)
       << ", difference " << fixed(o.mean_t_after - o.mean_c_after) << ", d = " << fixed(o.d_after(), 3) << '\n';
  }
}

}  // namespace

OutcomeSummary summarize_outcome(const Dataset& ds, const MatchResult& result, const std::string& column) {
  const auto y = ds.numeric_column(column);
  OutcomeSummary s;
  s.name = column;
  double st = 0, sc = 0, wt = 0, wc = 0, nt = 0, nc = 0;
  double sum_t_before = 0, sum_c_before = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double w = result.weights[i];
    if (ds.is_treated(i)) {
      sum_t_before += y[i], ++nt;
      st += w * y[i], wt += w;
    } else {
      sum_c_before += y[i], ++nc;
      sc += w * y[i], wc += w;
    }
  }
  s.mean_t_before = sum_t_before / nt;
  s.mean_c_before = sum_c_before / nc;
  s.mean_t_after = wt > 0 ? st / wt : std::nan("");
  s.mean_c_after = wc > 0 ? sc / wc : std::nan("");
  double ss = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!ds.is_treated(i)) ss += (y[i] - s.mean_c_before) * (y[i] - s.mean_c_before);
  s.sd_c = nc > 1 ? std::sqrt(ss / (nc - 1)) : std::nan("");
  return s;
}

std::string render_report(const RunConfig& config, const Analysis& a) {
  std::ostringstream os;
  const auto& spec = config.match;
  os << "Propensity score matching report\n"
     << "================================\n\n"
     << "Settings\n"
     << "  treatment:              " << config.roles.treatment << '\n'
     << "  estimation covariates:  " << join(config.roles.covariates) << '\n'
     << "  balance-only variables: " << join(config.roles.balance_only) << '\n'
     << "  matching:               greedy nearest neighbour, " << spec.ratio << ":1, "
     << (spec.replace ? "with" : "without") << " replacement\n"
     << "  caliper:                ";
  if (spec.caliper) {
    os << fixed(*spec.caliper, 4) << " SD of the logit score (width " << fixed(*a.result.caliper_width_abs, 6)
       << "), " << (spec.caliper_mode == CaliperMode::random_within ? "random draw" : "nearest") << " within caliper\n";
  } else {
    os << "none\n";
  }
  os << "  discard outside support: " << to_string(spec.discard) << '\n'
     << "  seed:                   " << spec.seed << '\n'
     << "  Standardized differences divide by the unmatched control-group SD in both phases.\n\n";

  os << "Propensity model (logistic regression)\n"
     << "  converged after " << a.model.iterations << " iterations, log-likelihood "
     << fixed(a.model.log_likelihood, 4) << '\n';
  std::size_t w = 12;
  for (const auto& t : a.model.terms) w = std::max(w, t.size() + 2);
  for (std::size_t j = 0; j < a.model.terms.size(); ++j)
    os << "  " << pad(a.model.terms[j], w) << lpad(fixed(a.model.coefficients[j], 6), 14) << '\n';
  os << "  common support: [" << fixed(a.result.support_interval.first, 6) << ", "
     << fixed(a.result.support_interval.second, 6) << "]"
     << (a.result.support_interval.first > a.result.support_interval.second ? " (empty)" : "") << "\n\n";

  os << "Sample sizes\n";
  sample_sizes(os, a.sizes);
  os << '\n';

  os << "Overall balance test (d^2)\n"
     << "  before matching: " << omnibus_line(a.omnibus_before) << '\n'
     << "  after matching:  " << omnibus_line(a.omnibus_after) << "\n\n";

  os << "L1 imbalance (0 = perfect balance, 1 = complete separation)\n"
     << "  before matching: " << fixed(a.l1.l1_before) << '\n'
     << "  after matching:  " << fixed(a.l1.l1_after) << '\n'
     << "  bins per variable:";
  for (const auto& b : a.l1.bins) os << ' ' << b.name << '=' << b.bin_count();
  os << "\n\n";

  os << "Terms with |d| > " << fixed(kCondensedThreshold, 2) << " after matching\n";
  if (a.condensed.empty()) os << "  no terms exceed threshold\n";
  else term_table(os, a.condensed);
  os << '\n';

  if (config.report == ReportMode::full) {
    os << "Balance before matching\n";
    term_table(os, a.terms_before);
    os << "\nBalance after matching\n";
    term_table(os, a.terms_after);
    os << '\n';
  }

  if (!a.outcomes.empty()) {
    os << "Outcomes\n";
    outcome_lines(os, a.outcomes);
    os << '\n';
  }
  return os.str();
}

std::string render_summary(const Analysis& a) {
  std::ostringstream os;
  os << "Sample sizes\n";
  sample_sizes(os, a.sizes);
  os << "d^2 before: " << omnibus_line(a.omnibus_before) << '\n'
     << "d^2 after:  " << omnibus_line(a.omnibus_after) << '\n'
     << "L1 before: " << fixed(a.l1.l1_before) << "  after: " << fixed(a.l1.l1_after) << '\n';
  if (!a.outcomes.empty()) {
    os << "Outcomes\n";
    outcome_lines(os, a.outcomes);
  }
  return os.str();
}

Table balance_terms_table(const Analysis& a) {
  Table t;
  t.header = {"term", "phase", "mean_t", "mean_c", "sd_c", "smd", "note"};
  for (const auto* terms : {&a.terms_before, &a.terms_after}) {
    for (const auto& row : *terms) {
      t.rows.push_back({row.term, to_string(row.phase), format_number(row.mean_t), format_number(row.mean_c),
                        format_number(row.sd_c), format_number(row.smd), row.zero_variance ? "zero_variance" : ""});
    }
  }
  return t;
}

Table pairs_table(const Dataset& ds, const Analysis& a) {
  Table t;
  t.header = {"treated_id", "control_id", "pass", "distance"};
  const bool logit_scale = a.result.caliper_width_abs.has_value();
  for (const auto& p : a.result.pairs) {
    const auto& metric = logit_scale ? a.model.logits : a.model.scores;
    t.rows.push_back({ds.unit_ids()[p.treated], ds.unit_ids()[p.control], std::to_string(p.pass),
                      format_number(std::abs(metric[p.treated] - metric[p.control]))});
  }
  return t;
}

}  // namespace psm
