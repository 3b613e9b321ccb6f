#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtpe/corpus.hpp"

namespace mtpe {

// 1-nearest-neighbor over training MT strings by normalized edit distance.
// A floor baseline and offline stand-in for the remote classifier, not a
// quality-estimation claim.
struct Exemplar {
    std::string mt;  // normalized
    Label label = Label::Keep;
    std::string id;
};

struct BaselineModel {
    std::vector<Exemplar> exemplars;  // id ascending
};

BaselineModel train_baseline(std::span<const LabeledSegment> segments);

// Returns the label of the exemplar minimizing normalized edit distance to
// normalize_text(mt); ties break toward the lowest exemplar id.
// confidence = 1 - min_distance. The source text is ignored by design.
std::pair<Label, double> baseline_classify(const BaselineModel& model,
                                           std::string_view source,
                                           std::string_view mt);

std::string baseline_to_jsonl(const BaselineModel& model);
BaselineModel baseline_from_jsonl(const std::string& text);

void save_baseline(const BaselineModel& model, const std::string& path);
BaselineModel load_baseline(const std::string& path);

}  // namespace mtpe
