#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtpe/text.hpp"

namespace mtpe {

// Binary post-editing label. Edit is the positive class: the segment
// requires post-editing.
enum class Label { Edit, Keep };

std::string_view to_string(Label label);
std::optional<Label> label_from_string(std::string_view s);

struct LangPair {
    std::string source;
    std::string target;

    bool operator==(const LangPair&) const = default;
};

// Parses "en-it", "en->it" or "en→it". Source and target must differ.
LangPair parse_lang_pair(std::string_view text);
std::string to_string(const LangPair& pair);

// One (source, MT output, post-edited reference) triple.
struct TranslationUnit {
    std::string id;
    std::string source;
    std::string mt;
    std::string pe;
    LangPair lang_pair;

    bool operator==(const TranslationUnit&) const = default;
};

// Inclusive source-length range in tokens; upper absent = unbounded.
struct LengthBucket {
    int index = 0;
    int lower = 1;
    std::optional<int> upper;

    bool contains(int length) const {
        return length >= lower && (!upper || length <= *upper);
    }
    bool operator==(const LengthBucket&) const = default;
};

// [1-5], [6-10], [11-20], [21-40], [41+]
std::vector<LengthBucket> default_buckets();

// Buckets must partition [1, inf): ordered, contiguous, final one unbounded.
void validate_buckets(const std::vector<LengthBucket>& buckets);

int bucket_index_for(const std::vector<LengthBucket>& buckets, int length);

// Parses "1-5,6-10,11-20,21-40,41+" into a validated partition.
std::vector<LengthBucket> parse_buckets(std::string_view text);
std::string to_string(const std::vector<LengthBucket>& buckets);

struct LabeledSegment {
    TranslationUnit unit;
    Label label = Label::Keep;
    std::size_t edit_distance = 0;
    double normalized_distance = 0.0;
    int length_bucket = 0;
    int source_tokens = 0;
};

// Keep iff the two texts are equal after normalize_text().
Label derive_label(std::string_view mt, std::string_view pe);

// Character-level Levenshtein over Unicode scalar values, unit cost.
// Inputs are expected to be normalized already.
std::size_t edit_distance(std::string_view a, std::string_view b);

// edit_distance / max(|a|, |b|) in scalar values; 0 when both empty.
double normalized_edit_distance(std::string_view a, std::string_view b);

// Token count of the normalized source (whitespace split). A spaceless
// CJK-style source counts grapheme clusters instead. Rejects sources that
// are empty after normalization.
int source_length(const TranslationUnit& unit);

LabeledSegment label_segment(const TranslationUnit& unit,
                             const std::vector<LengthBucket>& buckets);
std::vector<LabeledSegment> label_segments(const std::vector<TranslationUnit>& units,
                                           const std::vector<LengthBucket>& buckets);

struct CorpusStats {
    std::size_t n_units = 0;
    std::size_t edit_count = 0;
    std::size_t keep_count = 0;
    double mean_source_length = 0.0;
    std::map<int, std::size_t> per_bucket_counts;
};

CorpusStats corpus_stats(const std::vector<LabeledSegment>& segments,
                         const std::vector<LengthBucket>& buckets);

}  // namespace mtpe
