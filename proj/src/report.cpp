#include "accentmix/report.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "accentmix/util.hpp"

namespace accentmix {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::vector<ExperimentResult> parse_results(const std::string& text) {
  ordered_json arr;
  try {
    arr = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad results file: ") + e.what());
  }
  if (!arr.is_array()) throw ParseError("results file must be a JSON list");

  std::vector<ExperimentResult> out;
  for (const auto& j : arr) {
    ExperimentResult r;
    try {
      r.train_set_name = j.at("train_set_name").get<std::string>();
      if (j.contains("nominal_cv_proportion") &&
          !j.at("nominal_cv_proportion").is_null())
        r.nominal_cv_proportion = j.at("nominal_cv_proportion").get<double>();
      for (const auto& [name, wer] : j.at("per_testset_wer").items())
        r.per_testset_wer[name] = wer.get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad result entry: ") + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentResult> load_results(const std::string& path) {
  return parse_results(read_file(path));
}

std::string results_to_json(const std::vector<ExperimentResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j;
    j["train_set_name"] = r.train_set_name;
    if (r.nominal_cv_proportion)
      j["nominal_cv_proportion"] = *r.nominal_cv_proportion;
    else
      j["nominal_cv_proportion"] = nullptr;
    ordered_json wj;
    for (const auto& [name, wer] : r.per_testset_wer) wj[name] = wer;
    j["per_testset_wer"] = wj;
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string summary_table(const std::vector<ExperimentResult>& results,
                          std::vector<std::string> testsets) {
  if (results.empty()) throw Error("no results to tabulate");
  if (testsets.empty()) {
    std::set<std::string> names;
    for (const auto& r : results)
      for (const auto& [name, wer] : r.per_testset_wer) names.insert(name);
    testsets.assign(names.begin(), names.end());
  }

  // Column minima for flagging.
  std::map<std::string, double> col_min;
  for (const auto& t : testsets) {
    for (const auto& r : results) {
      const auto it = r.per_testset_wer.find(t);
      if (it == r.per_testset_wer.end()) continue;
      const auto cur = col_min.find(t);
      if (cur == col_min.end() || it->second < cur->second)
        col_min[t] = it->second;
    }
  }

  std::size_t name_width = std::string("train_set").size();
  for (const auto& r : results)
    name_width = std::max(name_width, r.train_set_name.size());

  std::vector<std::size_t> widths;
  for (const auto& t : testsets) widths.push_back(std::max<std::size_t>(t.size(), 8));

  std::string out;
  auto pad = [&](const std::string& s, std::size_t w) {
    out += s;
    out.append(w > s.size() ? w - s.size() : 0, ' ');
  };
  pad("train_set", name_width + 2);
  for (std::size_t c = 0; c < testsets.size(); ++c)
    pad(testsets[c], widths[c] + 2);
  out += '\n';

  for (const auto& r : results) {
    pad(r.train_set_name, name_width + 2);
    for (std::size_t c = 0; c < testsets.size(); ++c) {
      const auto it = r.per_testset_wer.find(testsets[c]);
      std::string cell = "-";
      if (it != r.per_testset_wer.end()) {
        cell = format_fixed2(it->second);
        const auto mn = col_min.find(testsets[c]);
        if (mn != col_min.end() && it->second == mn->second) cell += '*';
      }
      pad(cell, widths[c] + 2);
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const std::vector<ExperimentResult>& results,
                         std::vector<std::string> testsets) {
  if (results.empty()) throw Error("no results to tabulate");
  if (testsets.empty()) {
    std::set<std::string> names;
    for (const auto& r : results)
      for (const auto& [name, wer] : r.per_testset_wer) names.insert(name);
    testsets.assign(names.begin(), names.end());
  }

  ordered_json j;
  j["testsets"] = testsets;
  j["rows"] = ordered_json::array();
  for (const auto& r : results) {
    ordered_json row;
    row["train_set"] = r.train_set_name;
    ordered_json wj;
    for (const auto& t : testsets) {
      const auto it = r.per_testset_wer.find(t);
      if (it != r.per_testset_wer.end()) wj[t] = it->second;
    }
    row["wer"] = wj;
    j["rows"].push_back(row);
  }
  ordered_json best;
  for (const auto& t : testsets) {
    const ExperimentResult* winner = nullptr;
    for (const auto& r : results) {
      const auto it = r.per_testset_wer.find(t);
      if (it == r.per_testset_wer.end()) continue;
      if (!winner || it->second < winner->per_testset_wer.at(t)) winner = &r;
    }
    if (winner) best[t] = winner->train_set_name;
  }
  j["best"] = best;
  return j.dump(2) + "\n";
}

std::string tradeoff_scatter(const std::vector<ExperimentResult>& results,
                             const std::string& x_testset,
                             const std::string& y_testset) {
  std::vector<const ExperimentResult*> sorted;
  for (const auto& r : results) {
    if (!r.per_testset_wer.count(x_testset))
      throw MissingTestset("result '" + r.train_set_name + "' lacks testset '" +
                           x_testset + "'");
    if (!r.per_testset_wer.count(y_testset))
      throw MissingTestset("result '" + r.train_set_name + "' lacks testset '" +
                           y_testset + "'");
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const ExperimentResult* a, const ExperimentResult* b) {
              return a->train_set_name < b->train_set_name;
            });

  std::string out = "train_set,wer_" + x_testset + ",wer_" + y_testset + "\n";
  for (const auto* r : sorted) {
    out += r->train_set_name;
    out += ',';
    out += format_double(r->per_testset_wer.at(x_testset));
    out += ',';
    out += format_double(r->per_testset_wer.at(y_testset));
    out += '\n';
  }
  return out;
}

std::string proportion_curve(const std::vector<ExperimentResult>& results,
                             const std::string& testset) {
  struct Point {
    double x;
    double wer;
  };
  std::vector<Point> points;
  std::size_t excluded = 0;
  for (const auto& r : results) {
    const auto it = r.per_testset_wer.find(testset);
    if (!r.nominal_cv_proportion || it == r.per_testset_wer.end()) {
      ++excluded;
      continue;
    }
    points.push_back({*r.nominal_cv_proportion, it->second});
  }
  std::sort(points.begin(), points.end(),
            [](const Point& a, const Point& b) { return a.x < b.x; });

  std::string out = "cv_proportion,wer\n";
  for (const auto& p : points) {
    out += format_double(p.x);
    out += ',';
    out += format_double(p.wer);
    out += '\n';
  }
  out += "# excluded_without_proportion: " + std::to_string(excluded) + "\n";
  return out;
}

}  // namespace accentmix
