#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtpe/corpus.hpp"

namespace mtpe {

struct Prediction {
    std::string unit_id;
    std::optional<Label> predicted;  // nullopt = abstained
    Label gold = Label::Keep;
    std::optional<double> confidence;

    bool abstained() const { return !predicted.has_value(); }
};

// Positive class = Edit (segment requires post-editing).
struct ConfusionMatrix {
    std::uint64_t tp = 0;  // gold edit, predicted edit
    std::uint64_t fp = 0;  // gold keep, predicted edit
    std::uint64_t tn = 0;  // gold keep, predicted keep
    std::uint64_t fn = 0;  // gold edit, predicted keep
    std::uint64_t abstained = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion_from(std::span<const Prediction> predictions);

// (tp+tn)/total
double accuracy(const ConfusionMatrix& m);

// fn/total: share of segments wrongly passed as needing no edits.
double type2_rate(const ConfusionMatrix& m);

// fn/(tn+fn): the fraction of predicted-keep ("leave as is") segments that
// actually needed edits. Not applicable when nothing was predicted keep.
std::optional<double> lai_false_rate(const ConfusionMatrix& m);

struct SavingsParams {
    double lai_review_pay_rate = 0.10;  // r in [0,1]
};

// Scenario 1: predicted-keep segments skip review entirely.
// savings = (tn+fn)/total, at an error-rate ceiling of fn/total.
struct Scenario1 {
    double error_ceiling = 0.0;
    double savings = 0.0;
};
Scenario1 scenario1(const ConfusionMatrix& m);

// Scenario 2: predicted-keep segments are reviewed at pay rate r instead
// of skipped. savings = (1-r)*(tn+fn)/total, zero consumer risk.
double scenario2(const ConfusionMatrix& m, const SavingsParams& params);

struct MetricsReport {
    ConfusionMatrix matrix;
    double accuracy = 0.0;
    double type2_rate = 0.0;
    std::optional<double> lai_false_rate;
    double error_ceiling = 0.0;
    double scenario1_savings = 0.0;
    double scenario2_savings = 0.0;
    SavingsParams params;
};

MetricsReport metrics_report(const ConfusionMatrix& m, const SavingsParams& params);

enum class PairProfile { TpDominant, TnDominant, Balanced };
std::string_view to_string(PairProfile profile);

// Balanced when |tp-tn| <= margin, else whichever count dominates.
std::map<std::string, PairProfile> language_pair_profile(
    const std::map<std::string, ConfusionMatrix>& matrices, std::uint64_t margin = 10);

struct ModelComparisonRow {
    std::string model;
    std::uint64_t correct = 0;  // tp+tn
    std::uint64_t total = 0;
    double accuracy = 0.0;
    double delta_vs_first = 0.0;
};

// All matrices must cover the same test-set size.
std::vector<ModelComparisonRow> compare_models(
    const std::vector<std::pair<std::string, ConfusionMatrix>>& runs);

struct LearningCurvePoint {
    std::size_t train_size = 0;
    ConfusionMatrix matrix;
    double fn_rate = 0.0;  // fn/total
};

LearningCurvePoint learning_curve_point(std::size_t train_size, const ConfusionMatrix& m);

enum class Trend { Improving, NotImproving, NotApplicable };
std::string_view to_string(Trend trend);

struct LearningCurve {
    std::vector<LearningCurvePoint> points;  // sorted by train_size
    Trend trend = Trend::NotApplicable;
};

// Sorts by train size; trend is Improving when the largest size has a
// lower fn_rate than the smallest. Duplicate sizes are rejected.
LearningCurve learning_curve(std::vector<LearningCurvePoint> points);

// "82.42%" style rendering used by every report surface.
std::string format_percent(double fraction);

std::string render_text(const MetricsReport& report);
std::string render_json(const MetricsReport& report);
std::string render_csv(const MetricsReport& report);  // tp,fp,tn,fn,abstained
MetricsReport metrics_report_from_json(const std::string& text);

std::string render_comparison_text(const std::vector<ModelComparisonRow>& rows);
std::string render_comparison_json(const std::vector<ModelComparisonRow>& rows);
std::string render_curve_text(const LearningCurve& curve);
std::string render_curve_json(const LearningCurve& curve);

// One {"id","gold","predicted","confidence"} object per line; predicted
// is null for abstentions and confidence is omitted when absent.
std::string predictions_to_jsonl(std::span<const Prediction> predictions);
std::vector<Prediction> predictions_from_jsonl(const std::string& text);

}  // namespace mtpe
