// Hot paths: Levenshtein labeling, text normalization, stratified
// splitting, metric tallies, and 1-NN baseline lookups.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtpe/baseline.hpp"
#include "mtpe/corpus.hpp"
#include "mtpe/metrics.hpp"
#include "mtpe/splitter.hpp"
#include "mtpe/text.hpp"

namespace {

using namespace mtpe;

std::string random_sentence(std::mt19937_64& gen, int tokens) {
    static const char* kWords[] = {"casa",  "gatto", "libro",  "strada", "tempo",
                                   "verde", "mondo", "parola", "caff\xC3\xA8",
                                   "citt\xC3\xA0"};
    std::string out;
    for (int i = 0; i < tokens; ++i) {
        if (i) out += ' ';
        out += kWords[gen() % 10];
    }
    return out;
}

std::vector<TranslationUnit> synthetic_corpus(std::size_t n) {
    std::mt19937_64 gen(7);
    std::vector<TranslationUnit> units;
    units.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        TranslationUnit unit;
        unit.id = "u" + std::to_string(i);
        unit.source = random_sentence(gen, 1 + static_cast<int>(gen() % 50));
        unit.mt = random_sentence(gen, 1 + static_cast<int>(gen() % 30));
        unit.pe = (gen() % 2) ? unit.mt : unit.mt + " corretto";
        units.push_back(std::move(unit));
    }
    return units;
}

void BM_EditDistance(benchmark::State& state) {
    std::mt19937_64 gen(11);
    const auto a = random_sentence(gen, static_cast<int>(state.range(0)));
    auto b = a;
    b[b.size() / 2] = 'X';
    b += " extra";
    for (auto _ : state) benchmark::DoNotOptimize(edit_distance(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EditDistance)->Arg(8)->Arg(32)->Arg(128)->Complexity();

void BM_NormalizeText(benchmark::State& state) {
    std::mt19937_64 gen(12);
    std::string text = "  " + random_sentence(gen, static_cast<int>(state.range(0)));
    text += "\t mixed \xC2\xA0 spacing\r\n";
    for (auto _ : state) benchmark::DoNotOptimize(normalize_text(text));
}
BENCHMARK(BM_NormalizeText)->Arg(8)->Arg(64);

void BM_LabelSegments(benchmark::State& state) {
    const auto units = synthetic_corpus(static_cast<std::size_t>(state.range(0)));
    const auto buckets = default_buckets();
    for (auto _ : state) benchmark::DoNotOptimize(label_segments(units, buckets));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LabelSegments)->Arg(100)->Arg(1000);

void BM_StratifiedSplit(benchmark::State& state) {
    const auto units = synthetic_corpus(static_cast<std::size_t>(state.range(0)));
    const auto buckets = default_buckets();
    const auto segments = label_segments(units, buckets);
    for (auto _ : state)
        benchmark::DoNotOptimize(stratified_split(segments, 0.9, 42, buckets));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StratifiedSplit)->Arg(100)->Arg(1000)->Arg(5000);

void BM_ConfusionFrom(benchmark::State& state) {
    std::mt19937_64 gen(13);
    std::vector<Prediction> predictions(static_cast<std::size_t>(state.range(0)));
    for (auto& p : predictions) {
        p.unit_id = "u";
        p.gold = (gen() % 2) ? Label::Edit : Label::Keep;
        if (gen() % 10)
            p.predicted = (gen() % 2) ? Label::Edit : Label::Keep;
    }
    for (auto _ : state) benchmark::DoNotOptimize(confusion_from(predictions));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfusionFrom)->Arg(1000)->Arg(10000);

void BM_BaselineClassify(benchmark::State& state) {
    const auto units = synthetic_corpus(static_cast<std::size_t>(state.range(0)));
    const auto segments = label_segments(units, default_buckets());
    const BaselineModel model = train_baseline(segments);
    std::mt19937_64 gen(14);
    const std::string query = random_sentence(gen, 12);
    for (auto _ : state)
        benchmark::DoNotOptimize(baseline_classify(model, "src", query));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BaselineClassify)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
