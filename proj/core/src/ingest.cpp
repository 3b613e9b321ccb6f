#include "mtpe/ingest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mtpe/errors.hpp"

namespace mtpe {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(CorpusFormat format) {
    switch (format) {
        case CorpusFormat::Tsv: return "tsv";
        case CorpusFormat::Jsonl: return "jsonl";
        case CorpusFormat::TmxPair: return "tmx";
    }
    return "?";
}

std::optional<CorpusFormat> corpus_format_from_string(std::string_view s) {
    if (s == "tsv") return CorpusFormat::Tsv;
    if (s == "jsonl") return CorpusFormat::Jsonl;
    if (s == "tmx" || s == "tmx-pair") return CorpusFormat::TmxPair;
    return std::nullopt;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Splits into lines on LF, dropping a trailing CR from each.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        std::string_view line = text.substr(
            start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string zero_padded(std::size_t ordinal) {
    std::string digits = std::to_string(ordinal);
    if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
    return digits;
}

}  // namespace

IngestResult parse_tsv(const CorpusFile& file) {
    const std::string content = read_file(file.path);
    IngestResult result;
    std::unordered_set<std::string> explicit_ids;

    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        const std::string locator = "line " + std::to_string(i + 1);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string_view> cols;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            cols.push_back(line.substr(
                start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
            if (tab == std::string_view::npos) break;
            start = tab + 1;
        }

        TranslationUnit unit;
        unit.lang_pair = file.lang_pair;
        if (cols.size() == 4) {
            if (cols[0].empty()) {
                result.report.reject(locator, "empty id");
                continue;
            }
            unit.id = std::string(cols[0]);
            unit.source = std::string(cols[1]);
            unit.mt = std::string(cols[2]);
            unit.pe = std::string(cols[3]);
            if (!explicit_ids.insert(unit.id).second)
                throw ValidationError("duplicate id '" + unit.id + "' at " + locator + " in " +
                                      file.path.string());
        } else if (cols.size() == 3) {
            unit.id = zero_padded(i + 1);
            unit.source = std::string(cols[0]);
            unit.mt = std::string(cols[1]);
            unit.pe = std::string(cols[2]);
        } else {
            result.report.reject(locator, "expected 3 or 4 columns, got " +
                                              std::to_string(cols.size()));
            continue;
        }
        ++result.report.accepted;
        result.units.push_back(std::move(unit));
    }
    return result;
}

IngestResult parse_jsonl(const CorpusFile& file) {
    const std::string content = read_file(file.path);
    IngestResult result;
    std::unordered_set<std::string> ids;

    const auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        const std::string locator = "line " + std::to_string(i + 1);
        if (line.empty()) continue;

        json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (record.is_discarded() || !record.is_object()) {
            result.report.reject(locator, "invalid JSON");
            continue;
        }
        TranslationUnit unit;
        unit.lang_pair = file.lang_pair;
        bool ok = true;
        for (const char* key : {"id", "source", "mt", "pe"}) {
            auto it = record.find(key);
            if (it == record.end()) {
                result.report.reject(locator, std::string("missing ") + key);
                ok = false;
                break;
            }
            if (!it->is_string()) {
                result.report.reject(locator, std::string("non-string ") + key);
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        unit.id = record["id"].get<std::string>();
        unit.source = record["source"].get<std::string>();
        unit.mt = record["mt"].get<std::string>();
        unit.pe = record["pe"].get<std::string>();
        if (!ids.insert(unit.id).second)
            throw ValidationError("duplicate id '" + unit.id + "' at " + locator + " in " +
                                  file.path.string());
        ++result.report.accepted;
        result.units.push_back(std::move(unit));
    }
    return result;
}

IngestReport validate_corpus(const std::vector<TranslationUnit>& units) {
    IngestReport report;
    std::unordered_set<std::string> seen;
    for (const auto& unit : units) {
        const std::string locator = "id:" + unit.id;
        if (unit.id.empty()) {
            report.reject(locator, "empty id");
            continue;
        }
        if (!seen.insert(unit.id).second) {
            report.reject(locator, "duplicate id");
            continue;
        }
        if (normalize_text(unit.source).empty()) {
            report.reject(locator, "empty source");
            continue;
        }
        if (unit.lang_pair.source.empty() || unit.lang_pair.target.empty() ||
            unit.lang_pair.source == unit.lang_pair.target) {
            report.reject(locator, "invalid language pair");
            continue;
        }
        ++report.accepted;
    }
    return report;
}

IngestResult filter_valid(std::vector<TranslationUnit> units) {
    IngestResult result;
    result.report = validate_corpus(units);
    if (result.report.rejected == 0) {
        result.units = std::move(units);
        return result;
    }
    // Same per-unit rules as validate_corpus; duplicates keep the first occurrence.
    std::unordered_set<std::string> kept;
    for (auto& unit : units) {
        if (unit.id.empty() || kept.contains(unit.id) ||
            normalize_text(unit.source).empty() || unit.lang_pair.source.empty() ||
            unit.lang_pair.target.empty() ||
            unit.lang_pair.source == unit.lang_pair.target) {
            continue;
        }
        kept.insert(unit.id);
        result.units.push_back(std::move(unit));
    }
    return result;
}

std::string to_jsonl(const std::vector<TranslationUnit>& units) {
    std::string out;
    for (const auto& unit : units) {
        ordered_json record;
        record["id"] = unit.id;
        record["source"] = unit.source;
        record["mt"] = unit.mt;
        record["pe"] = unit.pe;
        out += record.dump();
        out += '\n';
    }
    return out;
}

void write_jsonl(const std::vector<TranslationUnit>& units,
                 const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << to_jsonl(units);
}

}  // namespace mtpe
