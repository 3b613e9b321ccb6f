#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtpe/baseline.hpp"
#include "mtpe/corpus.hpp"
#include "mtpe/finetune/client.hpp"
#include "mtpe/finetune/encoding.hpp"
#include "mtpe/metrics.hpp"

namespace mtpe {

// The one interface every classifier sits behind. Implementations must be
// safe for concurrent classify() calls. Failures (transport trouble,
// unparseable completions) surface as exceptions; batch classification
// turns them into abstentions.
class ClassifierBackend {
public:
    virtual ~ClassifierBackend() = default;
    virtual std::string name() const = 0;
    virtual std::pair<Label, std::optional<double>> classify(std::string_view source,
                                                             std::string_view mt) = 0;
};

class BaselineBackend : public ClassifierBackend {
public:
    explicit BaselineBackend(BaselineModel model) : model_(std::move(model)) {}

    std::string name() const override { return "baseline"; }
    std::pair<Label, std::optional<double>> classify(std::string_view source,
                                                     std::string_view mt) override;

    const BaselineModel& model() const { return model_; }

private:
    BaselineModel model_;
};

// A fine-tuned model reached through the API; requests use sampling
// temperature 0 and a 2-token completion budget.
class RemoteBackend : public ClassifierBackend {
public:
    RemoteBackend(std::shared_ptr<OpenAiClient> client, std::string model,
                  PromptEncoding encoding);

    std::string name() const override { return "remote:" + model_; }
    std::pair<Label, std::optional<double>> classify(std::string_view source,
                                                     std::string_view mt) override;

private:
    std::shared_ptr<OpenAiClient> client_;
    std::string model_;
    PromptEncoding encoding_;
};

struct BatchOptions {
    std::size_t concurrency = 4;  // max in-flight classifications
};

struct BatchResult {
    std::vector<Prediction> predictions;  // input order, one per unit
    std::size_t abstained = 0;
    std::vector<Rejection> errors;  // locator "id:<id>", reason = exception text
};

// Classifies every unit, preserving input order regardless of scheduling.
// Per-unit failures become abstentions (predicted = nullopt) and are
// reported; when every unit fails the batch itself fails.
BatchResult classify_batch(ClassifierBackend& backend,
                           std::span<const LabeledSegment> units,
                           const BatchOptions& options = {});

}  // namespace mtpe
