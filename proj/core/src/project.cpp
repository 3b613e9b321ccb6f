#include "mtpe/project.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>
#include <openssl/evp.h>

#include "mtpe/errors.hpp"
#include "mtpe/ingest.hpp"
#include "mtpe/splitter.hpp"

namespace mtpe {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string corpus_fingerprint(std::vector<TranslationUnit> units) {
    std::sort(units.begin(), units.end(),
              [](const TranslationUnit& a, const TranslationUnit& b) { return a.id < b.id; });
    const std::string canonical = to_jsonl(units);

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest, &digest_len, EVP_sha256(),
                   nullptr) != 1)
        throw Error("SHA-256 digest failed");

    static const char* hex = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < digest_len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string derive_run_id(std::uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "run-%016llx",
                  static_cast<unsigned long long>(splitmix64(seed)));
    return buf;
}

std::string_view to_string(ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return "text";
        case ReportFormat::Json: return "json";
        case ReportFormat::Csv: return "csv";
    }
    return "?";
}

std::optional<ReportFormat> report_format_from_string(std::string_view s) {
    if (s == "text") return ReportFormat::Text;
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    return std::nullopt;
}

std::string_view file_extension(ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return "txt";
        case ReportFormat::Json: return "json";
        case ReportFormat::Csv: return "csv";
    }
    return "txt";
}

std::string render_report(const MetricsReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Text: return render_text(report);
        case ReportFormat::Json: return render_json(report);
        case ReportFormat::Csv: return render_csv(report);
    }
    throw ValidationError("unknown report format");
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const fs::path tmp =
        path.parent_path() /
        (path.filename().string() + ".tmp" + std::to_string(::getpid()) + "." +
         std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot replace '" + path.string() + "': " + ec.message());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::string now_iso8601() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

ordered_json empty_manifest() {
    ordered_json doc;
    doc["version"] = 1;
    doc["created_at"] = now_iso8601();
    doc["stages"] = ordered_json::object();
    return doc;
}

ordered_json load_manifest(const fs::path& path) {
    ordered_json doc =
        ordered_json::parse(read_file(path), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("stages") ||
        !doc["stages"].is_object())
        throw ValidationError("manifest '" + path.string() + "' is corrupt");
    return doc;
}

}  // namespace

Project Project::init(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir))
            throw ValidationError("'" + dir.string() + "' exists and is not a directory");
        if (!fs::is_empty(dir, ec))
            throw ValidationError("directory '" + dir.string() + "' is not empty");
    } else {
        fs::create_directories(dir, ec);
        if (ec)
            throw Error("cannot create '" + dir.string() + "': " + ec.message());
    }
    Project project(dir);
    for (const auto& sub : {project.corpus_dir(), project.splits_dir(), project.jobs_dir(),
                            project.predictions_dir(), project.reports_dir()})
        fs::create_directory(sub);
    write_file_atomic(project.manifest_path(), empty_manifest().dump(2) + "\n");
    return project;
}

Project Project::open(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw ValidationError("'" + dir.string() + "' is not a project directory");
    Project project(dir);
    if (!fs::exists(project.manifest_path()))
        throw ValidationError("'" + dir.string() + "' has no manifest.json (run init)");
    load_manifest(project.manifest_path());  // validates
    return project;
}

std::string Project::manifest_text() const { return read_file(manifest_path()); }

std::vector<std::string> Project::recorded_stages() const {
    const ordered_json doc = load_manifest(manifest_path());
    std::vector<std::string> out;
    for (const auto& [name, payload] : doc["stages"].items()) out.push_back(name);
    return out;
}

bool Project::has_stage(const std::string& stage) const {
    const ordered_json doc = load_manifest(manifest_path());
    return doc["stages"].contains(stage);
}

std::string Project::stage(const std::string& stage) const {
    const ordered_json doc = load_manifest(manifest_path());
    if (!doc["stages"].contains(stage)) throw StageError(stage);
    return doc["stages"][stage].dump(2);
}

void Project::record_stage(const std::string& stage, const std::string& payload_json) {
    ordered_json payload =
        ordered_json::parse(payload_json, nullptr, /*allow_exceptions=*/false);
    if (payload.is_discarded() || !payload.is_object())
        throw ValidationError("stage payload for '" + stage + "' must be a JSON object");
    ordered_json doc = load_manifest(manifest_path());
    if (doc["stages"].contains(stage))
        throw ValidationError("stage '" + stage + "' is already recorded");
    doc["stages"][stage] = std::move(payload);
    write_file_atomic(manifest_path(), doc.dump(2) + "\n");
}

}  // namespace mtpe
