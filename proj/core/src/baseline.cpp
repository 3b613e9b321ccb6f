#include "mtpe/baseline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtpe/errors.hpp"
#include "mtpe/text.hpp"

namespace mtpe {

using ordered_json = nlohmann::ordered_json;

BaselineModel train_baseline(std::span<const LabeledSegment> segments) {
    if (segments.empty()) throw ValidationError("cannot train baseline on empty set");
    BaselineModel model;
    model.exemplars.reserve(segments.size());
    for (const auto& seg : segments)
        model.exemplars.push_back(Exemplar{normalize_text(seg.unit.mt), seg.label,
                                           seg.unit.id});
    std::sort(model.exemplars.begin(), model.exemplars.end(),
              [](const Exemplar& a, const Exemplar& b) { return a.id < b.id; });
    return model;
}

std::pair<Label, double> baseline_classify(const BaselineModel& model,
                                           std::string_view source,
                                           std::string_view mt) {
    (void)source;  // 1-NN over MT text only
    if (model.exemplars.empty()) throw ValidationError("baseline model is empty");
    const std::string query = normalize_text(mt);
    double best = 2.0;
    const Exemplar* winner = nullptr;
    for (const auto& ex : model.exemplars) {
        const double d = normalized_edit_distance(query, ex.mt);
        if (d < best) {  // exemplars are id-ascending, so first hit wins ties
            best = d;
            winner = &ex;
        }
    }
    return {winner->label, 1.0 - best};
}

std::string baseline_to_jsonl(const BaselineModel& model) {
    std::string out;
    for (const auto& ex : model.exemplars) {
        ordered_json line;
        line["id"] = ex.id;
        line["mt"] = ex.mt;
        line["label"] = std::string(to_string(ex.label));
        out += line.dump() + "\n";
    }
    return out;
}

BaselineModel baseline_from_jsonl(const std::string& text) {
    BaselineModel model;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ordered_json doc = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (doc.is_discarded() || !doc.is_object())
            throw ValidationError("baseline model line " + std::to_string(lineno) +
                                  ": not a JSON object");
        try {
            const auto label = label_from_string(doc.at("label").get<std::string>());
            if (!label)
                throw ValidationError("baseline model line " + std::to_string(lineno) +
                                      ": unknown label");
            model.exemplars.push_back(Exemplar{
                doc.at("mt").get<std::string>(),
                *label,
                doc.at("id").get<std::string>(),
            });
        } catch (const ordered_json::exception& e) {
            throw ValidationError("baseline model line " + std::to_string(lineno) +
                                  ": " + e.what());
        }
    }
    if (model.exemplars.empty())
        throw ValidationError("baseline model file has no exemplars");
    if (!std::is_sorted(model.exemplars.begin(), model.exemplars.end(),
                        [](const Exemplar& a, const Exemplar& b) { return a.id < b.id; }))
        throw ValidationError("baseline model exemplars are not in id order");
    return model;
}

void save_baseline(const BaselineModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << baseline_to_jsonl(model);
    if (!out) throw Error("failed writing '" + path + "'");
}

BaselineModel load_baseline(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return baseline_from_jsonl(buf.str());
}

}  // namespace mtpe
