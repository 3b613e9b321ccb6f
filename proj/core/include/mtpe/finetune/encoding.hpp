#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mtpe/corpus.hpp"
#include "mtpe/errors.hpp"
#include "mtpe/ingest.hpp"

namespace mtpe {

// The model replied with text matching neither label token. Never coerced
// to a default class: a silent default would bias the false-negative
// counts this tool exists to measure.
class UnparseableLabelError : public Error {
public:
    explicit UnparseableLabelError(const std::string& completion)
        : Error("unparseable label: '" + completion + "'") {}
};

enum class Dialect { Completion, Chat };

std::string_view to_string(Dialect dialect);
std::optional<Dialect> dialect_from_string(std::string_view s);

// Both label words stay single tokens for common BPE vocabularies, which
// keeps completions cheap and decoding unambiguous.
struct PromptEncoding {
    Dialect dialect = Dialect::Completion;
    std::string keep_token = " keep";
    std::string edit_token = " edit";
};

inline constexpr std::string_view kChatSystemPrompt =
    "Answer with exactly one word: keep or edit.";

// Completion dialect: "<source>\n=>\n<mt>\n\n###\n\n" (the trailing
// "###" block is the prompt/completion separator the legacy fine-tune
// format expects). Chat dialect: just "<source>\n=>\n<mt>", used as the
// user message body.
std::string encode_prompt(const PromptEncoding& enc, std::string_view source,
                          std::string_view mt);

// One training record as a single JSON line (no trailing newline).
// Completion dialect: {"prompt": ..., "completion": " keep"}.
// Chat dialect: {"messages": [system, user, assistant]} with the
// assistant content holding the bare label word.
std::string encode_training_record(const PromptEncoding& enc, std::string_view source,
                                   std::string_view mt, Label label);

// Case-insensitive prefix match against the trimmed label tokens, after
// trimming the completion itself; nullopt when neither matches.
std::optional<Label> decode_label(const PromptEncoding& enc, std::string_view completion);

struct PreparedFile {
    std::string jsonl;
    std::size_t records = 0;
    IngestReport report;  // rejected records (empty mt) land here
};

// One record per usable segment; segments whose MT side is empty after
// normalization are rejected and reported, not encoded.
PreparedFile prepare_training_file(std::span<const LabeledSegment> segments,
                                   const PromptEncoding& enc);

}  // namespace mtpe
