#include "psm/pipeline.hpp"

#include <ostream>

#include "psm/errors.hpp"
#include "psm/plots.hpp"

namespace psm {

Analysis analyze(const Dataset& ds, const RunConfig& config) {
  Analysis a;
  a.model = fit_logistic(ds);
  a.result = match(a.model, ds, config.match);
  a.sizes = sample_size_table(ds.treatment(), a.result);
  a.terms_before = smd_table(ds, true);
  a.terms_after = smd_table(ds, a.result, Phase::after, true);
  a.condensed = condensed_table(a.terms_after);

  auto omnibus = [&](Phase phase) {
    try {
      return phase == Phase::before ? omnibus_d2(ds) : omnibus_d2(ds, a.result, Phase::after);
    } catch (const SingularCovariance& e) {
      OmnibusResult r;
      r.note = std::string("not computed: ") + e.what();
      return r;
    }
  };
  a.omnibus_before = omnibus(Phase::before);
  a.omnibus_after = omnibus(Phase::after);
  a.l1 = l1_measure(ds, a.result);
  for (const auto& name : config.outcomes) a.outcomes.push_back(summarize_outcome(ds, a.result, name));
  return a;
}

const char* export_file_name(ExportMode mode) {
  return mode == ExportMode::full ? "data_full.csv" : "data_matched.csv";
}

void write_outputs(const Dataset& ds, const Analysis& a, const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create output directory '" + config.out.string() + "': " + ec.message());

  write_text_file(config.out / "run_config.txt", describe(config));
  write_text_file(config.out / "report.txt", render_report(config, a));
  write_csv(balance_terms_table(a), config.out / "balance_terms.csv");
  write_csv(pairs_table(ds, a), config.out / "pairs.csv");
  render_plots(a.model, ds, a.result, a.terms_before, a.terms_after, config.out);
  export_dataset(ds, a.model, a.result, config.export_mode, config.out / export_file_name(config.export_mode));
}

std::string error_line(ErrorCategory category, const std::string& code, const std::string& message) {
  std::string escaped;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') escaped.push_back('\\');
    escaped.push_back(ch == '\n' ? ' ' : ch);
  }
  return std::string("error: category=") + to_string(category) + " code=" + code + " message=\"" + escaped + "\"";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Dataset ds = load_csv(config.input, config.roles);
    const Analysis analysis = analyze(ds, config);
    write_outputs(ds, analysis, config);
    out << render_summary(analysis);
    return 0;
  } catch (const Error& e) {
    err << error_line(e.category(), e.code(), e.what()) << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_line(ErrorCategory::io, "IoError", e.what()) << '\n';
    return static_cast<int>(ErrorCategory::io);
  }
}

}  // namespace psm
