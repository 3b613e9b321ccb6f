#include "mtpe/finetune/backend.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "mtpe/errors.hpp"

namespace mtpe {

std::pair<Label, std::optional<double>> BaselineBackend::classify(std::string_view source,
                                                                  std::string_view mt) {
    auto [label, confidence] = baseline_classify(model_, source, mt);
    return {label, confidence};
}

RemoteBackend::RemoteBackend(std::shared_ptr<OpenAiClient> client, std::string model,
                             PromptEncoding encoding)
    : client_(std::move(client)), model_(std::move(model)), encoding_(encoding) {
    if (!client_) throw ValidationError("remote backend needs a client");
    if (model_.empty()) throw ValidationError("remote backend needs a model reference");
}

std::pair<Label, std::optional<double>> RemoteBackend::classify(std::string_view source,
                                                                std::string_view mt) {
    OpenAiClient::CompletionResult result;
    if (encoding_.dialect == Dialect::Completion) {
        result = client_->complete(model_, encode_prompt(encoding_, source, mt));
    } else {
        result = client_->chat_complete(model_, std::string(kChatSystemPrompt),
                                        encode_prompt(encoding_, source, mt));
    }
    const auto label = decode_label(encoding_, result.text);
    if (!label) throw UnparseableLabelError(result.text);
    std::optional<double> confidence;
    if (result.logprob) confidence = std::exp(*result.logprob);
    return {*label, confidence};
}

BatchResult classify_batch(ClassifierBackend& backend,
                           std::span<const LabeledSegment> units,
                           const BatchOptions& options) {
    if (units.empty()) throw ValidationError("nothing to classify");
    const std::size_t workers =
        std::min(std::max<std::size_t>(options.concurrency, 1), units.size());

    BatchResult result;
    result.predictions.resize(units.size());
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= units.size()) return;
            const LabeledSegment& seg = units[i];
            Prediction& slot = result.predictions[i];
            slot.unit_id = seg.unit.id;
            slot.gold = seg.label;
            try {
                auto [label, confidence] = backend.classify(seg.unit.source, seg.unit.mt);
                slot.predicted = label;
                slot.confidence = confidence;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                result.errors.push_back({"id:" + seg.unit.id, e.what()});
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& p : result.predictions)
        if (p.abstained()) ++result.abstained;
    if (result.abstained == units.size())
        throw Error("all " + std::to_string(units.size()) + " classifications failed (" +
                    (result.errors.empty() ? std::string("no detail")
                                           : result.errors.front().reason) +
                    ")");
    return result;
}

}  // namespace mtpe
