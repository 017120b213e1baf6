#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ovoscope/svm.hpp"

namespace ovoscope {

enum class Label { Fertile, Infertile, Unknown };

std::string_view to_string(Label label);
// Throws InvalidArgument for anything outside fertile|infertile|unknown.
Label parse_label(std::string_view text);
// +1 is fertile, -1 is infertile.
Label label_from_class(int y);
// Throws InvalidArgument for Label::Unknown.
int class_from_label(Label label);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  std::size_t correct() const { return tp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Tally relative to `positive`. Throws InvalidArgument on empty or
// mismatched inputs.
ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths,
                          Label positive = Label::Fertile);

// 100 (tp + tn) / total, in percent. Throws InvalidArgument on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct ScenarioRow {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;  // percent
};

struct ScenarioReport {
  std::vector<ScenarioRow> scenarios;
  double scenario_mean = 0.0;  // unweighted mean of the scenario accuracies
  double pooled = 0.0;         // accuracy over the full test set
  ConfusionMatrix confusion;   // full test set, fertile positive
};

// Unweighted arithmetic mean of per-scenario accuracies.
double scenario_mean(std::span<const double> accuracies);

// Nested prefixes of size step, 2 step, ...; a final partial prefix covering
// the whole set is added when the size is not a multiple of step.
ScenarioReport score_scenarios(std::span<const Label> predictions, std::span<const Label> truths,
                               std::size_t step);
ScenarioReport run_scenarios(const SvmModel& model, std::span<const LabeledSample> test_set,
                             std::size_t step);

// Two decimals, ties rounded up: 84.566 -> 84.57.
double round_percent(double percent);
std::string format_percent(double percent);

std::string report_to_json(const ScenarioReport& report);
std::string render_table(const ScenarioReport& report);

}  // namespace ovoscope
