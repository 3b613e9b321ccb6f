#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtpe/corpus.hpp"

namespace mtpe {

enum class CorpusFormat { Tsv, Jsonl, TmxPair };

std::string_view to_string(CorpusFormat format);
std::optional<CorpusFormat> corpus_format_from_string(std::string_view s);

struct CorpusFile {
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::Jsonl;
    LangPair lang_pair;
    std::optional<std::size_t> declared_count;
};

struct Rejection {
    std::string locator;  // "line 12", "tuid t7", "id:u1"
    std::string reason;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<Rejection> rejections;

    std::size_t scanned() const { return accepted + rejected; }
    void reject(std::string locator, std::string reason) {
        ++rejected;
        rejections.push_back({std::move(locator), std::move(reason)});
    }
};

struct IngestResult {
    std::vector<TranslationUnit> units;
    IngestReport report;
};

// TSV: UTF-8, LF or CRLF, literal TAB separator, '#' lines are comments.
// Lines carry id<TAB>source<TAB>mt<TAB>pe or source<TAB>mt<TAB>pe (ids
// auto-assigned as zero-padded line ordinals). Malformed lines are
// rejected, not fatal; an unreadable file or a duplicate explicit id is.
IngestResult parse_tsv(const CorpusFile& file);

// JSONL: {"id","source","mt","pe"} per line, extra keys ignored. Invalid
// JSON or missing keys reject the record; duplicate ids are fatal.
IngestResult parse_jsonl(const CorpusFile& file);

// Two TMX files joined on tuid: source and mt from mt_file, pe from the
// target-language variant of pe_file. tuids present in only one file are
// rejected records; XML malformation is fatal.
IngestResult parse_tmx_pair(const CorpusFile& mt_file, const CorpusFile& pe_file);

// Corpus-level validation: unique ids, non-empty sources after
// normalization. Locators name the offending unit.
IngestReport validate_corpus(const std::vector<TranslationUnit>& units);

// Applies validate_corpus and drops the rejected units.
IngestResult filter_valid(std::vector<TranslationUnit> units);

// Canonical JSONL serialization ({"id","source","mt","pe"}, input order).
std::string to_jsonl(const std::vector<TranslationUnit>& units);
void write_jsonl(const std::vector<TranslationUnit>& units,
                 const std::filesystem::path& path);

}  // namespace mtpe
