#include "ovoscope/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "ovoscope/error.hpp"

namespace ovoscope {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Fertile:
      return "fertile";
    case Label::Infertile:
      return "infertile";
    case Label::Unknown:
      return "unknown";
  }
  return "unknown";
}

Label parse_label(std::string_view text) {
  for (Label l : {Label::Fertile, Label::Infertile, Label::Unknown}) {
    if (text == to_string(l)) return l;
  }
  throw InvalidArgument("unknown label '" + std::string(text) + "'");
}

Label label_from_class(int y) { return y > 0 ? Label::Fertile : Label::Infertile; }

int class_from_label(Label label) {
  switch (label) {
    case Label::Fertile:
      return 1;
    case Label::Infertile:
      return -1;
    case Label::Unknown:
      break;
  }
  throw InvalidArgument("sample has no class label");
}

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths,
                          Label positive) {
  if (predictions.size() != truths.size()) {
    throw InvalidArgument("confusion: prediction and truth counts differ");
  }
  if (predictions.empty()) {
    throw InvalidArgument("confusion: no samples");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i] == positive;
    const bool true_pos = truths[i] == positive;
    if (pred_pos && true_pos) {
      ++cm.tp;
    } else if (!pred_pos && !true_pos) {
      ++cm.tn;
    } else if (pred_pos) {
      ++cm.fp;
    } else {
      ++cm.fn;
    }
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw InvalidArgument("accuracy: empty confusion matrix");
  }
  return 100.0 * static_cast<double>(cm.correct()) / static_cast<double>(cm.total());
}

double scenario_mean(std::span<const double> accuracies) {
  if (accuracies.empty()) {
    throw InvalidArgument("scenario_mean: no scenarios");
  }
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  return sum / static_cast<double>(accuracies.size());
}

ScenarioReport score_scenarios(std::span<const Label> predictions, std::span<const Label> truths,
                               std::size_t step) {
  if (step == 0) {
    throw InvalidArgument("scenarios: step must be at least 1");
  }
  ScenarioReport report;
  report.confusion = confusion(predictions, truths);
  if (truths.size() < step) {
    throw InvalidArgument("scenarios: test set smaller than one step");
  }
  std::vector<double> accs;
  for (std::size_t n = step;; n += step) {
    if (n > truths.size()) n = truths.size();
    const ConfusionMatrix cm = confusion(predictions.first(n), truths.first(n));
    report.scenarios.push_back({n, cm.correct(), accuracy(cm)});
    accs.push_back(report.scenarios.back().accuracy);
    if (n == truths.size()) break;
  }
  report.scenario_mean = scenario_mean(accs);
  report.pooled = accuracy(report.confusion);
  return report;
}

ScenarioReport run_scenarios(const SvmModel& model, std::span<const LabeledSample> test_set,
                             std::size_t step) {
  if (test_set.empty()) {
    throw InvalidArgument("scenarios: empty test set");
  }
  std::vector<Label> preds, truths;
  for (const auto& s : test_set) {
    preds.push_back(label_from_class(predict(model, s.x)));
    truths.push_back(label_from_class(s.y));
  }
  return score_scenarios(preds, truths, step);
}

double round_percent(double percent) {
  // The small nudge keeps values such as 82.125 (stored as 82.12499...) rounding up.
  return std::floor(percent * 100.0 + 0.5 + 1e-9) / 100.0;
}

std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round_percent(percent));
  return buf;
}

std::string report_to_json(const ScenarioReport& report) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.scenarios) {
    rows.push_back({{"n", r.n}, {"correct", r.correct}, {"accuracy", r.accuracy}});
  }
  j["scenarios"] = std::move(rows);
  j["scenario_mean"] = report.scenario_mean;
  j["pooled"] = report.pooled;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"tn", report.confusion.tn},
                    {"fp", report.confusion.fp},
                    {"fn", report.confusion.fn}};
  return j.dump(2) + "\n";
}

std::string render_table(const ScenarioReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-16s %-10s %s\n", "Number of Data", "Detection",
                "Accuracy (%)");
  out << line;
  for (const auto& r : report.scenarios) {
    std::snprintf(line, sizeof line, "%-16zu %-10zu %s%%\n", r.n, r.correct,
                  format_percent(r.accuracy).c_str());
    out << line;
  }
  out << "Average of accuracy (scenario_mean): " << format_percent(report.scenario_mean) << "%\n";
  out << "Pooled accuracy: " << format_percent(report.pooled) << "%\n";
  const auto& cm = report.confusion;
  out << "Confusion (positive = fertile): TP=" << cm.tp << " TN=" << cm.tn << " FP=" << cm.fp
      << " FN=" << cm.fn << "\n";
  return out.str();
}

}  // namespace ovoscope
