#ifndef ACCENTMIX_REPORT_HPP
#define ACCENTMIX_REPORT_HPP

#include <optional>
#include <string>
#include <map>
#include <vector>

#include "accentmix/errors.hpp"

namespace accentmix {

// The WER of one fine-tuning run, per test domain.
struct ExperimentResult {
  std::string train_set_name;
  std::optional<double> nominal_cv_proportion;
  std::map<std::string, double> per_testset_wer;
};

std::vector<ExperimentResult> parse_results(const std::string& text);
std::vector<ExperimentResult> load_results(const std::string& path);
std::string results_to_json(const std::vector<ExperimentResult>& results);

// Aligned-text table, one row per train set, one column per test set, with
// the per-column minimum flagged by '*'. testsets empty = sorted union of
// the test sets present.
std::string summary_table(const std::vector<ExperimentResult>& results,
                          std::vector<std::string> testsets = {});

// Same content as JSON: rows plus the best train set per test set.
std::string summary_json(const std::vector<ExperimentResult>& results,
                         std::vector<std::string> testsets = {});

// CSV "train_set,wer_<x>,wer_<y>" sorted by train set name. Throws
// MissingTestset when a result lacks either column.
std::string tradeoff_scatter(const std::vector<ExperimentResult>& results,
                             const std::string& x_testset,
                             const std::string& y_testset);

// CSV "cv_proportion,wer" sorted ascending by proportion; results without a
// proportion are excluded and counted in a trailing comment line.
std::string proportion_curve(const std::vector<ExperimentResult>& results,
                             const std::string& testset);

}  // namespace accentmix

#endif  // ACCENTMIX_REPORT_HPP
