#include "mtpe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mtpe/errors.hpp"

namespace mtpe {

using ordered_json = nlohmann::ordered_json;

ConfusionMatrix confusion_from(std::span<const Prediction> predictions) {
    ConfusionMatrix m;
    for (const auto& p : predictions) {
        if (!p.predicted) {
            ++m.abstained;
            continue;
        }
        if (p.gold == Label::Edit)
            ++(*p.predicted == Label::Edit ? m.tp : m.fn);
        else
            ++(*p.predicted == Label::Edit ? m.fp : m.tn);
    }
    return m;
}

namespace {

double checked_total(const ConfusionMatrix& m) {
    const auto total = m.total();
    if (total == 0) throw ValidationError("confusion matrix has zero total");
    return static_cast<double>(total);
}

}  // namespace

double accuracy(const ConfusionMatrix& m) {
    return static_cast<double>(m.tp + m.tn) / checked_total(m);
}

double type2_rate(const ConfusionMatrix& m) {
    return static_cast<double>(m.fn) / checked_total(m);
}

std::optional<double> lai_false_rate(const ConfusionMatrix& m) {
    const std::uint64_t lai = m.tn + m.fn;
    if (lai == 0) return std::nullopt;
    return static_cast<double>(m.fn) / static_cast<double>(lai);
}

Scenario1 scenario1(const ConfusionMatrix& m) {
    const double total = checked_total(m);
    return Scenario1{
        .error_ceiling = static_cast<double>(m.fn) / total,
        .savings = static_cast<double>(m.tn + m.fn) / total,
    };
}

double scenario2(const ConfusionMatrix& m, const SavingsParams& params) {
    const double r = params.lai_review_pay_rate;
    if (r < 0.0 || r > 1.0) throw ValidationError("pay rate must be in [0, 1]");
    return (1.0 - r) * static_cast<double>(m.tn + m.fn) / checked_total(m);
}

MetricsReport metrics_report(const ConfusionMatrix& m, const SavingsParams& params) {
    MetricsReport report;
    report.matrix = m;
    report.accuracy = accuracy(m);
    report.type2_rate = type2_rate(m);
    report.lai_false_rate = lai_false_rate(m);
    const auto s1 = scenario1(m);
    report.error_ceiling = s1.error_ceiling;
    report.scenario1_savings = s1.savings;
    report.scenario2_savings = scenario2(m, params);
    report.params = params;
    return report;
}

std::string_view to_string(PairProfile profile) {
    switch (profile) {
        case PairProfile::TpDominant: return "TP_DOMINANT";
        case PairProfile::TnDominant: return "TN_DOMINANT";
        case PairProfile::Balanced: return "BALANCED";
    }
    return "?";
}

std::map<std::string, PairProfile> language_pair_profile(
    const std::map<std::string, ConfusionMatrix>& matrices, std::uint64_t margin) {
    std::map<std::string, PairProfile> out;
    for (const auto& [pair, m] : matrices) {
        if (m.total() == 0)
            throw ValidationError("empty confusion matrix for pair '" + pair + "'");
        const std::uint64_t hi = std::max(m.tp, m.tn);
        const std::uint64_t lo = std::min(m.tp, m.tn);
        if (hi - lo <= margin)
            out[pair] = PairProfile::Balanced;
        else
            out[pair] = m.tp > m.tn ? PairProfile::TpDominant : PairProfile::TnDominant;
    }
    return out;
}

std::vector<ModelComparisonRow> compare_models(
    const std::vector<std::pair<std::string, ConfusionMatrix>>& runs) {
    if (runs.empty()) throw ValidationError("no runs to compare");
    std::vector<ModelComparisonRow> rows;
    const std::uint64_t expected_total = runs.front().second.total();
    for (const auto& [model, m] : runs) {
        if (m.total() != expected_total)
            throw ValidationError("model '" + model + "' has test-set size " +
                                  std::to_string(m.total()) + ", expected " +
                                  std::to_string(expected_total));
        ModelComparisonRow row;
        row.model = model;
        row.correct = m.tp + m.tn;
        row.total = m.total();
        row.accuracy = accuracy(m);
        rows.push_back(std::move(row));
    }
    for (auto& row : rows) row.delta_vs_first = row.accuracy - rows.front().accuracy;
    return rows;
}

LearningCurvePoint learning_curve_point(std::size_t train_size, const ConfusionMatrix& m) {
    return LearningCurvePoint{train_size, m, type2_rate(m)};
}

std::string_view to_string(Trend trend) {
    switch (trend) {
        case Trend::Improving: return "IMPROVING";
        case Trend::NotImproving: return "NOT_IMPROVING";
        case Trend::NotApplicable: return "NOT_APPLICABLE";
    }
    return "?";
}

LearningCurve learning_curve(std::vector<LearningCurvePoint> points) {
    if (points.empty()) throw ValidationError("learning curve needs at least one point");
    std::sort(points.begin(), points.end(),
              [](const auto& a, const auto& b) { return a.train_size < b.train_size; });
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].train_size == points[i - 1].train_size)
            throw ValidationError("duplicate train size " +
                                  std::to_string(points[i].train_size));
    LearningCurve curve;
    curve.trend = points.size() < 2 ? Trend::NotApplicable
                  : points.back().fn_rate < points.front().fn_rate
                      ? Trend::Improving
                      : Trend::NotImproving;
    curve.points = std::move(points);
    return curve;
}

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string render_text(const MetricsReport& r) {
    char buf[256];
    std::string out;
    out += "confusion matrix (positive class = edit)\n";
    std::snprintf(buf, sizeof(buf), "%-12s %18s %18s\n", "", "predicted edit",
                  "predicted keep");
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-12s %18s %18s\n", "gold edit",
                  ("TP " + std::to_string(r.matrix.tp)).c_str(),
                  ("FN " + std::to_string(r.matrix.fn)).c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-12s %18s %18s\n", "gold keep",
                  ("FP " + std::to_string(r.matrix.fp)).c_str(),
                  ("TN " + std::to_string(r.matrix.tn)).c_str());
    out += buf;
    out += "total: " + std::to_string(r.matrix.total()) +
           "  abstained: " + std::to_string(r.matrix.abstained) + "\n\n";
    out += "accuracy: " + format_percent(r.accuracy) + "\n";
    out += "type2 rate: " + format_percent(r.type2_rate) + "\n";
    out += "lai false rate: " +
           (r.lai_false_rate ? format_percent(*r.lai_false_rate) : std::string("n/a")) + "\n";
    out += "error ceiling (scenario 1): " + format_percent(r.error_ceiling) + "\n";
    out += "savings (scenario 1): " + format_percent(r.scenario1_savings) + "\n";
    std::snprintf(buf, sizeof(buf), "savings (scenario 2, pay rate %.0f%%): %s\n",
                  r.params.lai_review_pay_rate * 100.0,
                  format_percent(r.scenario2_savings).c_str());
    out += buf;
    return out;
}

namespace {

ordered_json matrix_to_json(const ConfusionMatrix& m) {
    ordered_json jm;
    jm["tp"] = m.tp;
    jm["fp"] = m.fp;
    jm["tn"] = m.tn;
    jm["fn"] = m.fn;
    jm["abstained"] = m.abstained;
    return jm;
}

ConfusionMatrix matrix_from_json(const ordered_json& jm) {
    ConfusionMatrix m;
    m.tp = jm.at("tp").get<std::uint64_t>();
    m.fp = jm.at("fp").get<std::uint64_t>();
    m.tn = jm.at("tn").get<std::uint64_t>();
    m.fn = jm.at("fn").get<std::uint64_t>();
    m.abstained = jm.at("abstained").get<std::uint64_t>();
    return m;
}

}  // namespace

std::string render_json(const MetricsReport& r) {
    ordered_json doc;
    doc["matrix"] = matrix_to_json(r.matrix);
    doc["accuracy"] = r.accuracy;
    doc["type2_rate"] = r.type2_rate;
    if (r.lai_false_rate)
        doc["lai_false_rate"] = *r.lai_false_rate;
    else
        doc["lai_false_rate"] = nullptr;
    doc["error_ceiling"] = r.error_ceiling;
    doc["scenario1_savings"] = r.scenario1_savings;
    doc["scenario2_savings"] = r.scenario2_savings;
    doc["params"]["lai_review_pay_rate"] = r.params.lai_review_pay_rate;
    return doc.dump(2) + "\n";
}

std::string render_csv(const MetricsReport& r) {
    std::string out = "tp,fp,tn,fn,abstained\n";
    out += std::to_string(r.matrix.tp) + "," + std::to_string(r.matrix.fp) + "," +
           std::to_string(r.matrix.tn) + "," + std::to_string(r.matrix.fn) + "," +
           std::to_string(r.matrix.abstained) + "\n";
    return out;
}

MetricsReport metrics_report_from_json(const std::string& text) {
    ordered_json doc = ordered_json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object())
        throw ValidationError("metrics report is not valid JSON");
    MetricsReport r;
    try {
        r.matrix = matrix_from_json(doc.at("matrix"));
        r.accuracy = doc.at("accuracy").get<double>();
        r.type2_rate = doc.at("type2_rate").get<double>();
        if (!doc.at("lai_false_rate").is_null())
            r.lai_false_rate = doc["lai_false_rate"].get<double>();
        r.error_ceiling = doc.at("error_ceiling").get<double>();
        r.scenario1_savings = doc.at("scenario1_savings").get<double>();
        r.scenario2_savings = doc.at("scenario2_savings").get<double>();
        r.params.lai_review_pay_rate =
            doc.at("params").at("lai_review_pay_rate").get<double>();
    } catch (const ordered_json::exception& e) {
        throw ValidationError(std::string("metrics report schema error: ") + e.what());
    }
    return r;
}

std::string render_comparison_text(const std::vector<ModelComparisonRow>& rows) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-20s %8s %8s %10s %10s\n", "model", "correct",
                  "total", "accuracy", "delta");
    out += buf;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-20s %8llu %8llu %10s %+10.2f\n",
                      row.model.c_str(), static_cast<unsigned long long>(row.correct),
                      static_cast<unsigned long long>(row.total),
                      format_percent(row.accuracy).c_str(), row.delta_vs_first * 100.0);
        out += buf;
    }
    return out;
}

std::string render_comparison_json(const std::vector<ModelComparisonRow>& rows) {
    ordered_json doc = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json jr;
        jr["model"] = row.model;
        jr["correct"] = row.correct;
        jr["total"] = row.total;
        jr["accuracy"] = row.accuracy;
        jr["delta_vs_first"] = row.delta_vs_first;
        doc.push_back(std::move(jr));
    }
    return doc.dump(2) + "\n";
}

std::string render_curve_text(const LearningCurve& curve) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%10s %8s %8s %8s %8s %10s\n", "train_size", "tp",
                  "fp", "tn", "fn", "fn_rate");
    out += buf;
    for (const auto& p : curve.points) {
        std::snprintf(buf, sizeof(buf), "%10zu %8llu %8llu %8llu %8llu %10s\n",
                      p.train_size, static_cast<unsigned long long>(p.matrix.tp),
                      static_cast<unsigned long long>(p.matrix.fp),
                      static_cast<unsigned long long>(p.matrix.tn),
                      static_cast<unsigned long long>(p.matrix.fn),
                      format_percent(p.fn_rate).c_str());
        out += buf;
    }
    out += "trend: " + std::string(to_string(curve.trend)) + "\n";
    return out;
}

std::string predictions_to_jsonl(std::span<const Prediction> predictions) {
    std::string out;
    for (const auto& p : predictions) {
        ordered_json line;
        line["id"] = p.unit_id;
        line["gold"] = std::string(to_string(p.gold));
        if (p.predicted)
            line["predicted"] = std::string(to_string(*p.predicted));
        else
            line["predicted"] = nullptr;
        if (p.confidence) line["confidence"] = *p.confidence;
        out += line.dump() + "\n";
    }
    return out;
}

std::vector<Prediction> predictions_from_jsonl(const std::string& text) {
    std::vector<Prediction> out;
    std::size_t start = 0;
    std::size_t lineno = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ordered_json doc = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object())
            throw ValidationError("predictions line " + std::to_string(lineno) +
                                  ": not a JSON object");
        Prediction p;
        try {
            p.unit_id = doc.at("id").get<std::string>();
            const auto gold = label_from_string(doc.at("gold").get<std::string>());
            if (!gold)
                throw ValidationError("predictions line " + std::to_string(lineno) +
                                      ": unknown gold label");
            p.gold = *gold;
            if (!doc.at("predicted").is_null()) {
                const auto predicted =
                    label_from_string(doc["predicted"].get<std::string>());
                if (!predicted)
                    throw ValidationError("predictions line " + std::to_string(lineno) +
                                          ": unknown predicted label");
                p.predicted = *predicted;
            }
            if (doc.contains("confidence") && doc["confidence"].is_number())
                p.confidence = doc["confidence"].get<double>();
        } catch (const ordered_json::exception& e) {
            throw ValidationError("predictions line " + std::to_string(lineno) + ": " +
                                  e.what());
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::string render_curve_json(const LearningCurve& curve) {
    ordered_json doc;
    doc["points"] = ordered_json::array();
    for (const auto& p : curve.points) {
        ordered_json jp;
        jp["train_size"] = p.train_size;
        jp["matrix"] = matrix_to_json(p.matrix);
        jp["fn_rate"] = p.fn_rate;
        doc["points"].push_back(std::move(jp));
    }
    doc["trend"] = std::string(to_string(curve.trend));
    return doc.dump(2) + "\n";
}

}  // namespace mtpe
