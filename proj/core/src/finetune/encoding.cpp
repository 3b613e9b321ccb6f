#include "mtpe/finetune/encoding.hpp"

#include <cctype>

#include <json.hpp>

#include "mtpe/text.hpp"

namespace mtpe {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Dialect dialect) {
    return dialect == Dialect::Completion ? "completion" : "chat";
}

std::optional<Dialect> dialect_from_string(std::string_view s) {
    if (s == "completion") return Dialect::Completion;
    if (s == "chat") return Dialect::Chat;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool iprefix(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

const std::string& token_for(const PromptEncoding& enc, Label label) {
    return label == Label::Keep ? enc.keep_token : enc.edit_token;
}

}  // namespace

std::string encode_prompt(const PromptEncoding& enc, std::string_view source,
                          std::string_view mt) {
    std::string prompt;
    prompt.reserve(source.size() + mt.size() + 16);
    prompt.append(source);
    prompt.append("\n=>\n");
    prompt.append(mt);
    if (enc.dialect == Dialect::Completion) prompt.append("\n\n###\n\n");
    return prompt;
}

std::string encode_training_record(const PromptEncoding& enc, std::string_view source,
                                   std::string_view mt, Label label) {
    ordered_json record;
    if (enc.dialect == Dialect::Completion) {
        record["prompt"] = encode_prompt(enc, source, mt);
        record["completion"] = token_for(enc, label);
    } else {
        record["messages"] = ordered_json::array({
            ordered_json{{"role", "system"}, {"content", std::string(kChatSystemPrompt)}},
            ordered_json{{"role", "user"}, {"content", encode_prompt(enc, source, mt)}},
            ordered_json{{"role", "assistant"},
                         {"content", std::string(trim(token_for(enc, label)))}},
        });
    }
    return record.dump();
}

std::optional<Label> decode_label(const PromptEncoding& enc, std::string_view completion) {
    const std::string_view text = trim(completion);
    if (text.empty()) return std::nullopt;
    const std::string_view keep = trim(enc.keep_token);
    const std::string_view edit = trim(enc.edit_token);
    if (iprefix(text, keep)) return Label::Keep;
    if (iprefix(text, edit)) return Label::Edit;
    return std::nullopt;
}

PreparedFile prepare_training_file(std::span<const LabeledSegment> segments,
                                   const PromptEncoding& enc) {
    if (segments.empty())
        throw ValidationError("cannot prepare a training file from zero segments");
    PreparedFile out;
    for (const auto& seg : segments) {
        if (normalize_text(seg.unit.mt).empty()) {
            out.report.reject("id:" + seg.unit.id, "empty mt text");
            continue;
        }
        out.jsonl += encode_training_record(enc, seg.unit.source, seg.unit.mt, seg.label);
        out.jsonl += '\n';
        ++out.records;
        ++out.report.accepted;
    }
    return out;
}

}  // namespace mtpe
