#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtpe/corpus.hpp"
#include "mtpe/metrics.hpp"

namespace mtpe {

// "sha256:<hex>" over the canonical JSONL serialization of the corpus
// sorted by id. Sensitive to every (id, source, mt, pe); insensitive to
// input order.
std::string corpus_fingerprint(std::vector<TranslationUnit> units);

// All run identity flows from the seed, so replays reuse the same id.
std::string derive_run_id(std::uint64_t seed);

enum class ReportFormat { Text, Json, Csv };

std::string_view to_string(ReportFormat format);
std::optional<ReportFormat> report_format_from_string(std::string_view s);
std::string_view file_extension(ReportFormat format);

std::string render_report(const MetricsReport& report, ReportFormat format);

// Crash-safe file write: temp file in the target directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// A project directory:
//
//   corpus/ splits/ jobs/ predictions/ reports/ manifest.json
//
// The manifest records one JSON payload per completed pipeline stage,
// strictly append-only: re-recording a stage is an error, and appending
// never rewrites earlier payloads. Single writer per directory; every
// write is atomic. Stage payloads cross this API as serialized JSON so
// the core headers stay dependency-free.
class Project {
public:
    // Creates the layout; the path must not exist or be an empty
    // directory. Running init on an initialized project is refused.
    static Project init(const std::filesystem::path& dir);

    // Opens an existing project (manifest.json must be present).
    static Project open(const std::filesystem::path& dir);

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path corpus_dir() const { return dir_ / "corpus"; }
    std::filesystem::path splits_dir() const { return dir_ / "splits"; }
    std::filesystem::path jobs_dir() const { return dir_ / "jobs"; }
    std::filesystem::path predictions_dir() const { return dir_ / "predictions"; }
    std::filesystem::path reports_dir() const { return dir_ / "reports"; }
    std::filesystem::path manifest_path() const { return dir_ / "manifest.json"; }

    // The manifest document as pretty-printed JSON.
    std::string manifest_text() const;

    std::vector<std::string> recorded_stages() const;
    bool has_stage(const std::string& stage) const;

    // The stage's payload as JSON; throws StageError naming the stage
    // when it has not been recorded.
    std::string stage(const std::string& stage) const;

    // Appends the stage payload (a JSON object); duplicates are rejected.
    void record_stage(const std::string& stage, const std::string& payload_json);

private:
    explicit Project(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::filesystem::path dir_;
};

}  // namespace mtpe
