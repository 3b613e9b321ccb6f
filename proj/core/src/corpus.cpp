#include "mtpe/corpus.hpp"

#include <algorithm>
#include <numeric>

#include "mtpe/errors.hpp"

namespace mtpe {

std::string_view to_string(Label label) {
    return label == Label::Edit ? "edit" : "keep";
}

std::optional<Label> label_from_string(std::string_view s) {
    if (s == "edit") return Label::Edit;
    if (s == "keep") return Label::Keep;
    return std::nullopt;
}

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return out;
}

}  // namespace

LangPair parse_lang_pair(std::string_view text) {
    std::string_view src, tgt;
    if (auto pos = text.find("->"); pos != std::string_view::npos) {
        src = text.substr(0, pos);
        tgt = text.substr(pos + 2);
    } else if (auto arrow = text.find("→"); arrow != std::string_view::npos) {
        src = text.substr(0, arrow);
        tgt = text.substr(arrow + 3);
    } else if (std::count(text.begin(), text.end(), '-') == 1) {
        auto dash = text.find('-');
        src = text.substr(0, dash);
        tgt = text.substr(dash + 1);
    } else {
        throw ValidationError("cannot parse language pair '" + std::string(text) +
                              "' (use src-tgt or src->tgt)");
    }
    if (src.empty() || tgt.empty())
        throw ValidationError("language pair has an empty side: '" + std::string(text) + "'");
    if (lower_ascii(src) == lower_ascii(tgt))
        throw ValidationError("language pair source and target must differ: '" +
                              std::string(text) + "'");
    return LangPair{std::string(src), std::string(tgt)};
}

std::string to_string(const LangPair& pair) {
    return pair.source + "-" + pair.target;
}

std::vector<LengthBucket> default_buckets() {
    return {
        {0, 1, 5},
        {1, 6, 10},
        {2, 11, 20},
        {3, 21, 40},
        {4, 41, std::nullopt},
    };
}

void validate_buckets(const std::vector<LengthBucket>& buckets) {
    if (buckets.empty()) throw ValidationError("bucket partition is empty");
    if (buckets.front().lower != 1)
        throw ValidationError("first bucket must start at length 1");
    for (std::size_t i = 0; i < buckets.size(); ++i) {
        const auto& b = buckets[i];
        if (b.index != static_cast<int>(i))
            throw ValidationError("bucket indices must be 0..n-1 in order");
        const bool last = i + 1 == buckets.size();
        if (last) {
            if (b.upper) throw ValidationError("final bucket must be unbounded");
        } else {
            if (!b.upper) throw ValidationError("only the final bucket may be unbounded");
            if (*b.upper < b.lower) throw ValidationError("bucket upper bound below lower");
            if (buckets[i + 1].lower != *b.upper + 1)
                throw ValidationError("buckets must be contiguous");
        }
    }
}

int bucket_index_for(const std::vector<LengthBucket>& buckets, int length) {
    if (length < 1) throw ValidationError("length must be positive");
    for (const auto& b : buckets)
        if (b.contains(length)) return b.index;
    throw ValidationError("no bucket for length " + std::to_string(length));
}

std::vector<LengthBucket> parse_buckets(std::string_view text) {
    std::vector<LengthBucket> buckets;
    std::size_t start = 0;
    int index = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string_view part = text.substr(
            start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (part.empty()) throw ValidationError("empty bucket range in '" + std::string(text) + "'");
        LengthBucket b;
        b.index = index++;
        try {
            if (part.back() == '+') {
                b.lower = std::stoi(std::string(part.substr(0, part.size() - 1)));
            } else {
                auto dash = part.find('-');
                if (dash == std::string_view::npos)
                    throw ValidationError("bucket range needs '-' or trailing '+'");
                b.lower = std::stoi(std::string(part.substr(0, dash)));
                b.upper = std::stoi(std::string(part.substr(dash + 1)));
            }
        } catch (const std::logic_error&) {
            throw ValidationError("cannot parse bucket range '" + std::string(part) + "'");
        }
        buckets.push_back(std::move(b));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    validate_buckets(buckets);
    return buckets;
}

std::string to_string(const std::vector<LengthBucket>& buckets) {
    std::string out;
    for (const auto& b : buckets) {
        if (!out.empty()) out += ',';
        out += std::to_string(b.lower);
        if (b.upper)
            out += '-' + std::to_string(*b.upper);
        else
            out += '+';
    }
    return out;
}

Label derive_label(std::string_view mt, std::string_view pe) {
    return normalize_text(mt) == normalize_text(pe) ? Label::Keep : Label::Edit;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    const std::u32string x = decode_utf8(a);
    const std::u32string y = decode_utf8(b);
    const std::size_t m = x.size(), n = y.size();
    if (m == 0) return n;
    if (n == 0) return m;

    std::vector<std::size_t> costs(n + 1);
    std::iota(costs.begin(), costs.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t corner = costs[0];
        costs[0] = i + 1;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t upper = costs[j + 1];
            if (x[i] == y[j]) {
                costs[j + 1] = corner;
            } else {
                costs[j + 1] = std::min({upper, corner, costs[j]}) + 1;
            }
            corner = upper;
        }
    }
    return costs[n];
}

double normalized_edit_distance(std::string_view a, std::string_view b) {
    const std::size_t la = decode_utf8(a).size();
    const std::size_t lb = decode_utf8(b).size();
    const std::size_t longest = std::max(la, lb);
    if (longest == 0) return 0.0;
    return static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

int source_length(const TranslationUnit& unit) {
    const std::string norm = normalize_text(unit.source);
    if (norm.empty()) throw ValidationError("unit '" + unit.id + "' has empty source");
    int tokens = 1;
    for (char c : norm)
        if (c == ' ') ++tokens;
    if (tokens == 1 && contains_cjk(norm))
        return static_cast<int>(grapheme_count(norm));
    return tokens;
}

LabeledSegment label_segment(const TranslationUnit& unit,
                             const std::vector<LengthBucket>& buckets) {
    LabeledSegment seg;
    seg.unit = unit;
    const std::string mt_norm = normalize_text(unit.mt);
    const std::string pe_norm = normalize_text(unit.pe);
    seg.edit_distance = edit_distance(mt_norm, pe_norm);
    seg.normalized_distance = normalized_edit_distance(mt_norm, pe_norm);
    seg.label = seg.edit_distance == 0 ? Label::Keep : Label::Edit;
    seg.source_tokens = source_length(unit);
    seg.length_bucket = bucket_index_for(buckets, seg.source_tokens);
    return seg;
}

std::vector<LabeledSegment> label_segments(const std::vector<TranslationUnit>& units,
                                           const std::vector<LengthBucket>& buckets) {
    std::vector<LabeledSegment> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(label_segment(u, buckets));
    return out;
}

CorpusStats corpus_stats(const std::vector<LabeledSegment>& segments,
                         const std::vector<LengthBucket>& buckets) {
    if (segments.empty()) throw ValidationError("empty corpus");
    CorpusStats stats;
    stats.n_units = segments.size();
    for (const auto& b : buckets) stats.per_bucket_counts[b.index] = 0;
    double length_sum = 0.0;
    for (const auto& seg : segments) {
        if (seg.label == Label::Edit)
            ++stats.edit_count;
        else
            ++stats.keep_count;
        length_sum += seg.source_tokens;
        ++stats.per_bucket_counts[seg.length_bucket];
    }
    stats.mean_source_length = length_sum / static_cast<double>(stats.n_units);
    return stats;
}

}  // namespace mtpe
