#include <doctest.h>

#include <string>

#include "mtpe/errors.hpp"
#include "mtpe/ingest.hpp"
#include "test_util.hpp"

using namespace mtpe;
using testutil::TempDir;
using testutil::write_text;

namespace {

CorpusFile make_file(const std::filesystem::path& path, CorpusFormat format) {
    CorpusFile file;
    file.path = path;
    file.format = format;
    file.lang_pair = {"en", "it"};
    return file;
}

bool has_rejection(const IngestReport& report, const std::string& locator,
                   const std::string& reason_part) {
    for (const auto& r : report.rejections)
        if (r.locator == locator && r.reason.find(reason_part) != std::string::npos)
            return true;
    return false;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("corpus format names round-trip") {
    CHECK(corpus_format_from_string("tsv") == CorpusFormat::Tsv);
    CHECK(corpus_format_from_string("jsonl") == CorpusFormat::Jsonl);
    CHECK(corpus_format_from_string("tmx") == CorpusFormat::TmxPair);
    CHECK_FALSE(corpus_format_from_string("csv").has_value());
    CHECK(to_string(CorpusFormat::Tsv) == "tsv");
}

TEST_CASE("tsv: four-column lines keep their ids") {
    TempDir dir;
    write_text(dir.file("c.tsv"),
               "# comment line\n"
               "u1\tsource one\tmt one\tpe one\n"
               "\n"
               "u2\tsource two\tmt two\tmt two\n");
    const auto result = parse_tsv(make_file(dir.file("c.tsv"), CorpusFormat::Tsv));
    REQUIRE(result.units.size() == 2);
    CHECK(result.report.accepted == 2);
    CHECK(result.report.rejected == 0);
    CHECK(result.units[0].id == "u1");
    CHECK(result.units[0].source == "source one");
    CHECK(result.units[0].mt == "mt one");
    CHECK(result.units[0].pe == "pe one");
    CHECK(result.units[1].lang_pair == LangPair{"en", "it"});
}

TEST_CASE("tsv: three-column lines get zero-padded line-ordinal ids") {
    TempDir dir;
    write_text(dir.file("c.tsv"),
               "# header\n"
               "s1\tm1\tp1\n"
               "s2\tm2\tp2\n");
    const auto result = parse_tsv(make_file(dir.file("c.tsv"), CorpusFormat::Tsv));
    REQUIRE(result.units.size() == 2);
    CHECK(result.units[0].id == "000002");  // line 2, comments count
    CHECK(result.units[1].id == "000003");
}

TEST_CASE("tsv: CRLF files parse identically") {
    TempDir dir;
    write_text(dir.file("c.tsv"), "u1\ts\tm\tp\r\nu2\ts\tm\tp\r\n");
    const auto result = parse_tsv(make_file(dir.file("c.tsv"), CorpusFormat::Tsv));
    REQUIRE(result.units.size() == 2);
    CHECK(result.units[1].pe == "p");
}

TEST_CASE("tsv: malformed lines reject with a line locator, accounting balances") {
    TempDir dir;
    write_text(dir.file("c.tsv"),
               "u1\ts\tm\tp\n"
               "only\ttwo\n"
               "\tmissing\tid\there\n"
               "u2\ts\tm\tp\n");
    const auto result = parse_tsv(make_file(dir.file("c.tsv"), CorpusFormat::Tsv));
    CHECK(result.report.accepted == 2);
    CHECK(result.report.rejected == 2);
    CHECK(result.report.scanned() == 4);
    CHECK(result.report.rejections.size() == result.report.rejected);
    CHECK(has_rejection(result.report, "line 2", "expected 3 or 4 columns"));
    CHECK(has_rejection(result.report, "line 3", "empty id"));
}

TEST_CASE("tsv: duplicate explicit id is fatal") {
    TempDir dir;
    write_text(dir.file("c.tsv"), "u1\ts\tm\tp\nu1\ts\tm\tp\n");
    CHECK_THROWS_AS((void)parse_tsv(make_file(dir.file("c.tsv"), CorpusFormat::Tsv)),
                    ValidationError);
}

TEST_CASE("tsv: unreadable file is fatal") {
    CHECK_THROWS((void)parse_tsv(make_file("/nonexistent/c.tsv", CorpusFormat::Tsv)));
}

TEST_CASE("jsonl: well-formed records parse, extra keys ignored") {
    TempDir dir;
    write_text(dir.file("c.jsonl"),
               R"({"id":"u1","source":"s1","mt":"m1","pe":"p1","extra":42})"
               "\n"
               R"({"id":"u2","source":"s2","mt":"m2","pe":"m2"})"
               "\n");
    const auto result = parse_jsonl(make_file(dir.file("c.jsonl"), CorpusFormat::Jsonl));
    REQUIRE(result.units.size() == 2);
    CHECK(result.units[0].id == "u1");
    CHECK(result.units[1].mt == "m2");
    CHECK(result.report.rejected == 0);
}

TEST_CASE("jsonl: bad JSON and missing keys reject per line") {
    TempDir dir;
    write_text(dir.file("c.jsonl"),
               R"({"id":"u1","source":"s","mt":"m","pe":"p"})"
               "\n"
               "not json at all\n"
               R"({"id":"u3","source":"s","mt":"m"})"
               "\n");
    const auto result = parse_jsonl(make_file(dir.file("c.jsonl"), CorpusFormat::Jsonl));
    CHECK(result.report.accepted == 1);
    CHECK(result.report.rejected == 2);
    CHECK(result.report.scanned() == 3);
    CHECK(result.report.rejections[0].locator == "line 2");
    CHECK(result.report.rejections[1].locator == "line 3");
}

TEST_CASE("jsonl: duplicate id is fatal") {
    TempDir dir;
    write_text(dir.file("c.jsonl"),
               R"({"id":"u1","source":"s","mt":"m","pe":"p"})"
               "\n"
               R"({"id":"u1","source":"s","mt":"m","pe":"p"})"
               "\n");
    CHECK_THROWS_AS((void)parse_jsonl(make_file(dir.file("c.jsonl"), CorpusFormat::Jsonl)),
                    ValidationError);
}

TEST_CASE("tmx pair: joins on tuid, source and mt from one file, pe from the other") {
    TempDir dir;
    write_text(dir.file("mt.tmx"), R"(<?xml version="1.0"?>
<tmx version="1.4"><body>
  <tu tuid="t1">
    <tuv xml:lang="en"><seg>hello world</seg></tuv>
    <tuv xml:lang="it"><seg>ciao <b>mondo</b></seg></tuv>
  </tu>
  <tu tuid="t2">
    <tuv xml:lang="en"><seg>good morning</seg></tuv>
    <tuv xml:lang="it-IT"><seg>buongiorno</seg></tuv>
  </tu>
  <tu tuid="t3">
    <tuv xml:lang="en"><seg>lonely</seg></tuv>
    <tuv xml:lang="it"><seg>solitario</seg></tuv>
  </tu>
</body></tmx>
)");
    write_text(dir.file("pe.tmx"), R"(<?xml version="1.0"?>
<tmx version="1.4"><body>
  <tu tuid="t1"><tuv xml:lang="it"><seg>ciao mondo</seg></tuv></tu>
  <tu tuid="t2"><tuv xml:lang="it"><seg>buona giornata</seg></tuv></tu>
  <tu tuid="t9"><tuv xml:lang="it"><seg>orfano</seg></tuv></tu>
</body></tmx>
)");
    const auto result = parse_tmx_pair(make_file(dir.file("mt.tmx"), CorpusFormat::TmxPair),
                                       make_file(dir.file("pe.tmx"), CorpusFormat::TmxPair));
    REQUIRE(result.units.size() == 2);
    CHECK(result.units[0].id == "t1");
    CHECK(result.units[0].source == "hello world");
    CHECK(result.units[0].mt == "ciao mondo");  // inline markup stripped
    CHECK(result.units[0].pe == "ciao mondo");
    CHECK(result.units[1].id == "t2");  // it-IT matches declared it
    CHECK(result.units[1].pe == "buona giornata");
    // t3 only in the mt file, t9 only in the pe file: both rejected
    CHECK(result.report.rejected == 2);
    CHECK(has_rejection(result.report, "tuid t3", "unmatched tuid"));
    CHECK(result.report.scanned() == result.report.accepted + result.report.rejected);
}

TEST_CASE("tmx pair: missing variants reject, malformed XML is fatal") {
    TempDir dir;
    write_text(dir.file("mt.tmx"), R"(<?xml version="1.0"?>
<tmx version="1.4"><body>
  <tu tuid="t1"><tuv xml:lang="en"><seg>only source</seg></tuv></tu>
  <tu><tuv xml:lang="en"><seg>x</seg></tuv><tuv xml:lang="it"><seg>y</seg></tuv></tu>
</body></tmx>
)");
    write_text(dir.file("pe.tmx"), R"(<?xml version="1.0"?>
<tmx version="1.4"><body>
  <tu tuid="t1"><tuv xml:lang="it"><seg>pe</seg></tuv></tu>
</body></tmx>
)");
    const auto result = parse_tmx_pair(make_file(dir.file("mt.tmx"), CorpusFormat::TmxPair),
                                       make_file(dir.file("pe.tmx"), CorpusFormat::TmxPair));
    CHECK(result.report.accepted == 0);
    CHECK(has_rejection(result.report, "tuid t1 (mt file)", "missing variant"));
    CHECK(has_rejection(result.report, "tu #2 (mt file)", "missing tuid"));

    write_text(dir.file("bad.tmx"), "<tmx><body><tu>unclosed");
    CHECK_THROWS_AS(
        (void)parse_tmx_pair(make_file(dir.file("bad.tmx"), CorpusFormat::TmxPair),
                             make_file(dir.file("pe.tmx"), CorpusFormat::TmxPair)),
        ValidationError);
}

TEST_CASE("validate_corpus flags duplicates, empty ids and empty sources") {
    std::vector<TranslationUnit> units(4);
    units[0] = {"u1", "source", "mt", "pe", {"en", "it"}};
    units[1] = {"u1", "other", "mt", "pe", {"en", "it"}};   // duplicate id
    units[2] = {"u2", "   ", "mt", "pe", {"en", "it"}};     // empty source
    units[3] = {"", "source", "mt", "pe", {"en", "it"}};    // empty id
    const auto report = validate_corpus(units);
    CHECK(report.accepted == 1);
    CHECK(report.rejected == 3);
    CHECK(has_rejection(report, "id:u1", "duplicate id"));
    CHECK(has_rejection(report, "id:u2", "empty source"));

    auto filtered = filter_valid(units);
    REQUIRE(filtered.units.size() == 1);
    CHECK(filtered.units[0].id == "u1");
    CHECK(filtered.units[0].source == "source");  // first occurrence wins
}

TEST_CASE("to_jsonl emits one canonical object per line") {
    std::vector<TranslationUnit> units(1);
    units[0] = {"u1", "so", "mt", "pe", {"en", "it"}};
    CHECK(to_jsonl(units) == R"({"id":"u1","source":"so","mt":"mt","pe":"pe"})"
                                 "\n");

    TempDir dir;
    write_jsonl(units, dir.file("out.jsonl"));
    const auto back = parse_jsonl(make_file(dir.file("out.jsonl"), CorpusFormat::Jsonl));
    REQUIRE(back.units.size() == 1);
    CHECK(back.units[0].id == "u1");
    CHECK(back.units[0].pe == "pe");
}

}  // TEST_SUITE
