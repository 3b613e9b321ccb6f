#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtpe/errors.hpp"
#include "mtpe/metrics.hpp"
#include "test_util.hpp"

using namespace mtpe;
using testutil::contains;

namespace {

ConfusionMatrix matrix(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                       std::uint64_t fn, std::uint64_t abstained = 0) {
    return ConfusionMatrix{tp, fp, tn, fn, abstained};
}

const ConfusionMatrix kEnIt = matrix(503, 81, 191, 67);
const ConfusionMatrix kEnDe = matrix(256, 46, 442, 90);

std::vector<Prediction> random_predictions(std::mt19937_64& gen, std::size_t max_items) {
    std::vector<Prediction> out;
    const std::size_t n = 1 + gen() % max_items;
    for (std::size_t i = 0; i < n; ++i) {
        Prediction p;
        p.unit_id = "u" + std::to_string(i);
        p.gold = (gen() % 2 == 0) ? Label::Edit : Label::Keep;
        if (gen() % 10 != 0)  // ~10% abstentions
            p.predicted = (gen() % 2 == 0) ? Label::Edit : Label::Keep;
        if (gen() % 3 == 0) p.confidence = static_cast<double>(gen() % 1000) / 1000.0;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion_from tallies the four quadrants and abstentions") {
    std::vector<Prediction> preds(6);
    preds[0] = {"a", Label::Edit, Label::Edit, {}};   // tp
    preds[1] = {"b", Label::Keep, Label::Edit, {}};   // fn
    preds[2] = {"c", Label::Edit, Label::Keep, {}};   // fp
    preds[3] = {"d", Label::Keep, Label::Keep, {}};   // tn
    preds[4] = {"e", std::nullopt, Label::Edit, {}};  // abstained
    preds[5] = {"f", Label::Keep, Label::Keep, {}};   // tn
    const auto m = confusion_from(preds);
    CHECK(m == matrix(1, 1, 2, 1, 1));
    CHECK(m.total() == 5);  // abstentions excluded from the total
}

TEST_CASE("published figures, first pair") {
    CHECK(std::fabs(accuracy(kEnIt) - 0.8242) <= 0.0001);
    CHECK(std::fabs(type2_rate(kEnIt) - 0.0796) <= 0.0001);
    REQUIRE(lai_false_rate(kEnIt).has_value());
    CHECK(std::fabs(*lai_false_rate(kEnIt) - 0.2597) <= 0.0005);
    CHECK(std::fabs(scenario2(kEnIt, SavingsParams{0.10}) - 0.2758) <= 0.0005);
    CHECK(format_percent(accuracy(kEnIt)) == "82.42%");
}

TEST_CASE("published figures, second pair") {
    CHECK(std::fabs(accuracy(kEnDe) - 0.8369) <= 0.0001);
    CHECK(std::fabs(type2_rate(kEnDe) - 0.1079) <= 0.0001);
    CHECK(std::fabs(*lai_false_rate(kEnDe) - 0.1692) <= 0.0005);
    CHECK(std::fabs(scenario1(kEnDe).savings - 0.6379) <= 0.0005);
    CHECK(std::fabs(scenario2(kEnDe, SavingsParams{0.10}) - 0.5741) <= 0.0005);
}

TEST_CASE("scenario1 savings follow the quotient, not the reported rounding") {
    // The source report derives "(191+67)/842 = 30.1%", but the quotient is
    // 258/842 = 30.64%; the stated 30.1% is inconsistent with its own
    // operands. The implementation stands by the arithmetic.
    const auto s1 = scenario1(kEnIt);
    CHECK(std::fabs(s1.savings - 0.3064) <= 0.0005);
    CHECK(std::fabs(s1.savings - 0.301) > 0.003);
    CHECK(format_percent(s1.savings) == "30.64%");
    CHECK(std::fabs(s1.error_ceiling - type2_rate(kEnIt)) == 0.0);
}

TEST_CASE("degenerate matrices are handled explicitly") {
    CHECK_THROWS_AS((void)accuracy(matrix(0, 0, 0, 0)), ValidationError);
    CHECK_THROWS_AS((void)type2_rate(matrix(0, 0, 0, 0, 5)), ValidationError);
    CHECK_FALSE(lai_false_rate(matrix(10, 5, 0, 0)).has_value());
    CHECK(*lai_false_rate(matrix(0, 0, 0, 7)) == 1.0);
    CHECK_THROWS_AS((void)scenario2(kEnIt, SavingsParams{-0.1}), ValidationError);
    CHECK_THROWS_AS((void)scenario2(kEnIt, SavingsParams{1.5}), ValidationError);
    CHECK(scenario2(kEnIt, SavingsParams{1.0}) == 0.0);
}

TEST_CASE("metrics match an independent brute-force tally") {
    std::mt19937_64 gen(20260817);
    for (int iter = 0; iter < 1000; ++iter) {
        const auto preds = random_predictions(gen, 500);

        std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0, abstained = 0;
        for (const auto& p : preds) {
            if (!p.predicted) {
                ++abstained;
            } else if (p.gold == Label::Edit && *p.predicted == Label::Edit) {
                ++tp;
            } else if (p.gold == Label::Edit && *p.predicted == Label::Keep) {
                ++fn;
            } else if (p.gold == Label::Keep && *p.predicted == Label::Edit) {
                ++fp;
            } else {
                ++tn;
            }
        }

        const auto m = confusion_from(preds);
        REQUIRE(m == matrix(tp, fp, tn, fn, abstained));

        const std::uint64_t total = tp + fp + tn + fn;
        if (total == 0) continue;
        CHECK(accuracy(m) ==
              static_cast<double>(tp + tn) / static_cast<double>(total));
        CHECK(type2_rate(m) == static_cast<double>(fn) / static_cast<double>(total));
        if (tn + fn == 0) {
            CHECK_FALSE(lai_false_rate(m).has_value());
        } else {
            CHECK(*lai_false_rate(m) ==
                  static_cast<double>(fn) / static_cast<double>(tn + fn));
        }
        const auto s1 = scenario1(m);
        CHECK(s1.savings == static_cast<double>(tn + fn) / static_cast<double>(total));
        CHECK(s1.error_ceiling == static_cast<double>(fn) / static_cast<double>(total));
        CHECK(scenario2(m, SavingsParams{0.10}) ==
              (1.0 - 0.10) * static_cast<double>(tn + fn) / static_cast<double>(total));
    }
}

TEST_CASE("metrics_report agrees with the individual functions") {
    const auto report = metrics_report(kEnDe, SavingsParams{0.10});
    CHECK(report.matrix == kEnDe);
    CHECK(report.accuracy == accuracy(kEnDe));
    CHECK(report.type2_rate == type2_rate(kEnDe));
    CHECK(report.lai_false_rate == lai_false_rate(kEnDe));
    CHECK(report.error_ceiling == scenario1(kEnDe).error_ceiling);
    CHECK(report.scenario1_savings == scenario1(kEnDe).savings);
    CHECK(report.scenario2_savings == scenario2(kEnDe, SavingsParams{0.10}));
}

TEST_CASE("language pair profiling honors the margin") {
    std::map<std::string, ConfusionMatrix> pairs;
    pairs["en-tr"] = matrix(347, 10, 353, 10);
    pairs["en-it"] = kEnIt;
    pairs["en-de"] = kEnDe;
    const auto profiles = language_pair_profile(pairs);
    CHECK(profiles.at("en-tr") == PairProfile::Balanced);
    CHECK(profiles.at("en-it") == PairProfile::TpDominant);
    CHECK(profiles.at("en-de") == PairProfile::TnDominant);

    std::map<std::string, ConfusionMatrix> edge;
    edge["on-margin"] = matrix(100, 0, 110, 0);   // |tp-tn| == 10
    edge["over-margin"] = matrix(100, 0, 111, 0); // |tp-tn| == 11
    const auto edges = language_pair_profile(edge, 10);
    CHECK(edges.at("on-margin") == PairProfile::Balanced);
    CHECK(edges.at("over-margin") == PairProfile::TnDominant);

    std::map<std::string, ConfusionMatrix> empty_matrix;
    empty_matrix["x"] = matrix(0, 0, 0, 0);
    CHECK_THROWS_AS((void)language_pair_profile(empty_matrix), ValidationError);

    CHECK(std::string(to_string(PairProfile::Balanced)) == "BALANCED");
    CHECK(std::string(to_string(PairProfile::TpDominant)) == "TP_DOMINANT");
    CHECK(std::string(to_string(PairProfile::TnDominant)) == "TN_DOMINANT");
}

TEST_CASE("model comparison reproduces the published accuracy ladder") {
    std::vector<std::pair<std::string, ConfusionMatrix>> runs = {
        {"ada", matrix(694, 842 - 694, 0, 0)},
        {"babbage", matrix(699, 842 - 699, 0, 0)},
        {"curie", matrix(706, 842 - 706, 0, 0)},
    };
    const auto rows = compare_models(runs);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].correct == 694);
    CHECK(std::fabs(rows[0].accuracy - 0.8242) <= 0.0001);
    CHECK(std::fabs(rows[1].accuracy - 0.8302) <= 0.0001);
    CHECK(std::fabs(rows[2].accuracy - 0.8385) <= 0.0001);
    CHECK(rows[0].delta_vs_first == 0.0);
    CHECK(std::fabs(rows[2].delta_vs_first - 0.0143) <= 0.0001);

    runs[1].second = matrix(699, 100, 0, 0);  // total 799 != 842
    CHECK_THROWS_AS((void)compare_models(runs), ValidationError);
    CHECK_THROWS_AS((void)compare_models({}), ValidationError);

    const auto text = render_comparison_text(rows);
    CHECK(contains(text, "curie"));
    CHECK(contains(text, "83.85%"));
    CHECK(contains(text, "+1.43"));
}

TEST_CASE("learning curve sorts by size and calls the trend") {
    // fn rates 0.20 / 0.16 / 0.13 over a fixed total of 1000
    std::vector<LearningCurvePoint> points = {
        learning_curve_point(6000, matrix(400, 100, 370, 130)),
        learning_curve_point(2000, matrix(400, 100, 300, 200)),
        learning_curve_point(4000, matrix(400, 100, 340, 160)),
    };
    const auto curve = learning_curve(points);
    REQUIRE(curve.points.size() == 3);
    CHECK(curve.points[0].train_size == 2000);
    CHECK(curve.points[1].train_size == 4000);
    CHECK(curve.points[2].train_size == 6000);
    CHECK(curve.points[0].fn_rate == doctest::Approx(0.20));
    CHECK(curve.points[2].fn_rate == doctest::Approx(0.13));
    CHECK(curve.trend == Trend::Improving);
    CHECK(contains(render_curve_text(curve), "trend: IMPROVING"));

    const auto flat = learning_curve({learning_curve_point(100, matrix(1, 1, 1, 1)),
                                      learning_curve_point(200, matrix(1, 1, 1, 1))});
    CHECK(flat.trend == Trend::NotImproving);

    const auto single = learning_curve({learning_curve_point(100, matrix(1, 1, 1, 1))});
    CHECK(single.trend == Trend::NotApplicable);

    CHECK_THROWS_AS((void)learning_curve({learning_curve_point(100, matrix(1, 1, 1, 1)),
                                          learning_curve_point(100, matrix(2, 1, 1, 1))}),
                    ValidationError);
    CHECK_THROWS_AS((void)learning_curve({}), ValidationError);
}

TEST_CASE("format_percent renders two decimals") {
    CHECK(format_percent(0.0) == "0.00%");
    CHECK(format_percent(1.0) == "100.00%");
    CHECK(format_percent(0.8242) == "82.42%");
    CHECK(format_percent(258.0 / 842.0) == "30.64%");
}

TEST_CASE("text report carries every headline number") {
    const auto text = render_text(metrics_report(kEnIt, SavingsParams{0.10}));
    CHECK(contains(text, "confusion matrix (positive class = edit)"));
    CHECK(contains(text, "TP 503"));
    CHECK(contains(text, "FN 67"));
    CHECK(contains(text, "FP 81"));
    CHECK(contains(text, "TN 191"));
    CHECK(contains(text, "total: 842  abstained: 0"));
    CHECK(contains(text, "accuracy: 82.42%"));
    CHECK(contains(text, "type2 rate: 7.96%"));
    CHECK(contains(text, "lai false rate: 25.97%"));
    CHECK(contains(text, "error ceiling (scenario 1): 7.96%"));
    CHECK(contains(text, "savings (scenario 1): 30.64%"));
    CHECK(contains(text, "savings (scenario 2, pay rate 10%): 27.58%"));
}

TEST_CASE("json report round-trips exactly") {
    const auto report = metrics_report(kEnIt, SavingsParams{0.10});
    const auto back = metrics_report_from_json(render_json(report));
    CHECK(back.matrix == report.matrix);
    CHECK(back.accuracy == report.accuracy);
    CHECK(back.type2_rate == report.type2_rate);
    CHECK(back.lai_false_rate == report.lai_false_rate);
    CHECK(back.error_ceiling == report.error_ceiling);
    CHECK(back.scenario1_savings == report.scenario1_savings);
    CHECK(back.scenario2_savings == report.scenario2_savings);
    CHECK(back.params.lai_review_pay_rate == report.params.lai_review_pay_rate);

    // lai n/a encodes as null and survives
    const auto na = metrics_report(matrix(10, 5, 0, 0), SavingsParams{0.10});
    const auto na_back = metrics_report_from_json(render_json(na));
    CHECK_FALSE(na_back.lai_false_rate.has_value());

    CHECK_THROWS_AS((void)metrics_report_from_json("nope"), ValidationError);
    CHECK_THROWS_AS((void)metrics_report_from_json("{}"), ValidationError);
}

TEST_CASE("csv report is a two-line matrix dump") {
    const auto report = metrics_report(matrix(1, 2, 3, 4, 5), SavingsParams{0.10});
    CHECK(render_csv(report) == "tp,fp,tn,fn,abstained\n1,2,3,4,5\n");
}

TEST_CASE("prediction JSONL round-trips abstentions and confidences") {
    std::vector<Prediction> preds(3);
    preds[0] = {"u1", Label::Edit, Label::Keep, 0.75};
    preds[1] = {"u2", std::nullopt, Label::Edit, std::nullopt};
    preds[2] = {"u3", Label::Keep, Label::Keep, std::nullopt};

    const auto jsonl = predictions_to_jsonl(preds);
    CHECK(contains(jsonl, R"({"id":"u1","gold":"keep","predicted":"edit","confidence":0.75})"));
    CHECK(contains(jsonl, R"({"id":"u2","gold":"edit","predicted":null})"));

    const auto back = predictions_from_jsonl(jsonl);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].unit_id == preds[i].unit_id);
        CHECK(back[i].gold == preds[i].gold);
        CHECK(back[i].predicted == preds[i].predicted);
        CHECK(back[i].confidence == preds[i].confidence);
    }
    CHECK(back[1].abstained());

    CHECK_THROWS_AS((void)predictions_from_jsonl("garbage\n"), ValidationError);
}

TEST_CASE("random prediction lists survive the JSONL round-trip") {
    std::mt19937_64 gen(99);
    for (int iter = 0; iter < 50; ++iter) {
        const auto preds = random_predictions(gen, 100);
        const auto back = predictions_from_jsonl(predictions_to_jsonl(preds));
        REQUIRE(back.size() == preds.size());
        CHECK(confusion_from(back) == confusion_from(preds));
        for (std::size_t i = 0; i < back.size(); ++i) {
            CHECK(back[i].unit_id == preds[i].unit_id);
            CHECK(back[i].predicted == preds[i].predicted);
            CHECK(back[i].confidence == preds[i].confidence);
        }
    }
}

}  // TEST_SUITE
