#include <expat.h>

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "mtpe/errors.hpp"
#include "mtpe/ingest.hpp"

namespace mtpe {

namespace {

struct Variant {
    std::string lang;
    std::string seg;
    bool has_seg = false;
};

struct Tu {
    std::optional<std::string> tuid;
    std::vector<Variant> variants;
    std::size_t ordinal = 0;  // 1-based position in the file
};

// Collects tu/tuv/seg content from one TMX document. Inline markup inside
// <seg> is dropped, its character data kept.
struct TmxDoc {
    std::vector<Tu> tus;

    // parse state
    std::optional<Tu> current_tu;
    std::optional<Variant> current_variant;
    int seg_depth = 0;
    std::size_t tu_count = 0;
    std::string error;
};

const char* attr_value(const char** attrs, std::string_view name) {
    for (int i = 0; attrs[i]; i += 2) {
        std::string_view key = attrs[i];
        // TMX 1.4 uses xml:lang; some exports write plain lang.
        if (key == name) return attrs[i + 1];
    }
    return nullptr;
}

void XMLCALL on_start(void* user, const char* name, const char** attrs) {
    auto* doc = static_cast<TmxDoc*>(user);
    std::string_view element = name;
    if (doc->seg_depth > 0) {
        // inline markup inside <seg>: stripped, text content preserved
        if (element == "seg") ++doc->seg_depth;
        return;
    }
    if (element == "tu") {
        doc->current_tu = Tu{};
        doc->current_tu->ordinal = ++doc->tu_count;
        if (const char* tuid = attr_value(attrs, "tuid")) doc->current_tu->tuid = tuid;
    } else if (element == "tuv" && doc->current_tu) {
        doc->current_variant = Variant{};
        if (const char* lang = attr_value(attrs, "xml:lang"))
            doc->current_variant->lang = lang;
        else if (const char* plain = attr_value(attrs, "lang"))
            doc->current_variant->lang = plain;
    } else if (element == "seg" && doc->current_variant) {
        doc->seg_depth = 1;
        doc->current_variant->has_seg = true;
    }
}

void XMLCALL on_end(void* user, const char* name) {
    auto* doc = static_cast<TmxDoc*>(user);
    std::string_view element = name;
    if (doc->seg_depth > 0) {
        if (element == "seg") --doc->seg_depth;
        return;
    }
    if (element == "tuv" && doc->current_tu && doc->current_variant) {
        doc->current_tu->variants.push_back(std::move(*doc->current_variant));
        doc->current_variant.reset();
    } else if (element == "tu" && doc->current_tu) {
        doc->tus.push_back(std::move(*doc->current_tu));
        doc->current_tu.reset();
    }
}

void XMLCALL on_chars(void* user, const char* chars, int len) {
    auto* doc = static_cast<TmxDoc*>(user);
    if (doc->seg_depth > 0 && doc->current_variant)
        doc->current_variant->seg.append(chars, static_cast<std::size_t>(len));
}

TmxDoc parse_tmx_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();

    TmxDoc doc;
    XML_Parser parser = XML_ParserCreate(nullptr);
    XML_SetUserData(parser, &doc);
    XML_SetElementHandler(parser, on_start, on_end);
    XML_SetCharacterDataHandler(parser, on_chars);

    const XML_Status status =
        XML_Parse(parser, content.data(), static_cast<int>(content.size()), /*isFinal=*/1);
    if (status != XML_STATUS_OK) {
        std::string msg = XML_ErrorString(XML_GetErrorCode(parser));
        auto line = XML_GetCurrentLineNumber(parser);
        XML_ParserFree(parser);
        throw ValidationError("malformed XML in " + path.string() + " (line " +
                              std::to_string(line) + "): " + msg);
    }
    XML_ParserFree(parser);
    return doc;
}

std::string primary_subtag(std::string_view lang) {
    auto dash = lang.find('-');
    std::string out(dash == std::string_view::npos ? lang : lang.substr(0, dash));
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return out;
}

bool lang_matches(std::string_view tuv_lang, std::string_view declared) {
    return primary_subtag(tuv_lang) == primary_subtag(declared);
}

// Picks the single variant for `declared`; reports the failure reason
// ("missing variant" / "duplicate variant") otherwise.
const Variant* select_variant(const Tu& tu, std::string_view declared, std::string& why) {
    const Variant* found = nullptr;
    for (const auto& v : tu.variants) {
        if (!lang_matches(v.lang, declared)) continue;
        if (found) {
            why = "duplicate variant for language " + std::string(declared);
            return nullptr;
        }
        found = &v;
    }
    if (!found) {
        why = "missing variant for language " + std::string(declared);
        return nullptr;
    }
    if (!found->has_seg) {
        why = "variant for language " + std::string(declared) + " has no seg";
        return nullptr;
    }
    return found;
}

std::string tu_locator(const Tu& tu) {
    if (tu.tuid) return "tuid " + *tu.tuid;
    return "tu #" + std::to_string(tu.ordinal);
}

}  // namespace

IngestResult parse_tmx_pair(const CorpusFile& mt_file, const CorpusFile& pe_file) {
    const TmxDoc mt_doc = parse_tmx_document(mt_file.path);
    const TmxDoc pe_doc = parse_tmx_document(pe_file.path);
    const LangPair& pair = mt_file.lang_pair;

    IngestResult result;

    // Index the PE side by tuid; malformed PE records reject later when joined.
    std::map<std::string, const Tu*> pe_by_tuid;
    std::vector<const Tu*> pe_without_tuid;
    std::vector<const Tu*> pe_duplicate;
    for (const auto& tu : pe_doc.tus) {
        if (!tu.tuid) {
            pe_without_tuid.push_back(&tu);
            continue;
        }
        if (!pe_by_tuid.emplace(*tu.tuid, &tu).second) pe_duplicate.push_back(&tu);
    }

    std::unordered_set<std::string> pe_used;
    std::unordered_set<std::string> mt_tuids;

    for (const auto& tu : mt_doc.tus) {
        const std::string locator = tu_locator(tu);
        if (!tu.tuid) {
            result.report.reject(locator + " (mt file)", "missing tuid");
            continue;
        }
        if (!mt_tuids.insert(*tu.tuid).second) {
            result.report.reject(locator + " (mt file)", "duplicate tuid");
            continue;
        }
        std::string why;
        const Variant* src = select_variant(tu, pair.source, why);
        if (!src) {
            result.report.reject(locator + " (mt file)", why);
            continue;
        }
        const Variant* mt = select_variant(tu, pair.target, why);
        if (!mt) {
            result.report.reject(locator + " (mt file)", why);
            continue;
        }
        auto pe_it = pe_by_tuid.find(*tu.tuid);
        if (pe_it == pe_by_tuid.end()) {
            result.report.reject(locator, "unmatched tuid (mt file only)");
            continue;
        }
        pe_used.insert(*tu.tuid);
        const Variant* pe = select_variant(*pe_it->second, pair.target, why);
        if (!pe) {
            result.report.reject(locator + " (pe file)", why);
            continue;
        }

        TranslationUnit unit;
        unit.id = *tu.tuid;
        unit.source = src->seg;
        unit.mt = mt->seg;
        unit.pe = pe->seg;
        unit.lang_pair = pair;
        ++result.report.accepted;
        result.units.push_back(std::move(unit));
    }

    for (const auto& tu : pe_doc.tus) {
        if (!tu.tuid) {
            result.report.reject(tu_locator(tu) + " (pe file)", "missing tuid");
            continue;
        }
    }
    for (const auto* tu : pe_duplicate)
        result.report.reject(tu_locator(*tu) + " (pe file)", "duplicate tuid");
    for (const auto& [tuid, tu] : pe_by_tuid) {
        if (!pe_used.contains(tuid) && !mt_tuids.contains(tuid))
            result.report.reject("tuid " + tuid, "unmatched tuid (pe file only)");
    }
    return result;
}

}  // namespace mtpe
