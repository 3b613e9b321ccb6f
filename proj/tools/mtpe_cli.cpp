// mtpe: corpus preparation, classifier fine-tuning/inference, and
// evaluation for machine-translation post-editing pipelines.
//
// Exit codes: 0 success, 2 missing prerequisite stage, 3 validation
// failure, 4 transport failure, 1 anything else. Errors are a single
// stderr line: "error: <category>: <message>".

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtpe/baseline.hpp"
#include "mtpe/corpus.hpp"
#include "mtpe/errors.hpp"
#include "mtpe/finetune/backend.hpp"
#include "mtpe/finetune/client.hpp"
#include "mtpe/finetune/encoding.hpp"
#include "mtpe/finetune/http_transport.hpp"
#include "mtpe/finetune/scripted_transport.hpp"
#include "mtpe/finetune/types.hpp"
#include "mtpe/ingest.hpp"
#include "mtpe/metrics.hpp"
#include "mtpe/project.hpp"
#include "mtpe/splitter.hpp"
#include "mtpe/text.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
using namespace mtpe;

constexpr std::size_t kMaxManifestRejections = 50;

struct Options {
    std::string project;
    std::uint64_t seed = 42;
    std::string api_base = "https://api.openai.com";
    std::string backend = "baseline";
    std::string format = "text";
    std::string buckets = "1-5,6-10,11-20,21-40,41+";
    std::string mock_scenario;
    std::string api_key_file;
    double pay_rate = 0.10;
    std::size_t concurrency = 4;
    std::int64_t poll_interval_ms = 30000;
    std::int64_t poll_timeout_ms = 40 * 60 * 1000;
    std::int64_t retry_backoff_ms = 1000;
};

ReportFormat report_format(const Options& o) {
    const auto format = report_format_from_string(o.format);
    if (!format) throw ValidationError("unknown format '" + o.format + "'");
    return *format;
}

std::uint64_t parse_count(const std::string& token, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long value = std::stoull(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw ValidationError(what + ": '" + token + "' is not a non-negative integer");
    }
}

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) {
        const auto begin = token.find_first_not_of(" \t");
        const auto end = token.find_last_not_of(" \t");
        out.push_back(begin == std::string::npos
                          ? std::string()
                          : token.substr(begin, end - begin + 1));
    }
    return out;
}

// "tp,fp,tn,fn" with an optional fifth abstained count.
ConfusionMatrix parse_matrix(const std::string& text) {
    const auto tokens = split_on(text, ',');
    if (tokens.size() != 4 && tokens.size() != 5)
        throw ValidationError("--matrix wants tp,fp,tn,fn[,abstained], got '" + text +
                              "'");
    ConfusionMatrix m;
    m.tp = parse_count(tokens[0], "--matrix tp");
    m.fp = parse_count(tokens[1], "--matrix fp");
    m.tn = parse_count(tokens[2], "--matrix tn");
    m.fn = parse_count(tokens[3], "--matrix fn");
    if (tokens.size() == 5) m.abstained = parse_count(tokens[4], "--matrix abstained");
    if (m.total() == 0) throw ValidationError("--matrix needs a nonzero total");
    return m;
}

Project open_project(const Options& o) {
    if (o.project.empty()) throw ValidationError("--project is required here");
    return Project::open(o.project);
}

ordered_json stage_json(const Project& project, const std::string& stage) {
    return ordered_json::parse(project.stage(stage));
}

std::vector<TranslationUnit> load_corpus(const Project& project) {
    const ordered_json ingest = stage_json(project, "ingest");
    CorpusFile file;
    file.path = project.dir() / ingest.at("corpus_path").get<std::string>();
    file.format = CorpusFormat::Jsonl;
    file.lang_pair = parse_lang_pair(ingest.at("lang_pair").get<std::string>());
    IngestResult result = parse_jsonl(file);
    if (result.report.rejected != 0)
        throw ValidationError("stored corpus is corrupt: " +
                              result.report.rejections.front().reason);
    return std::move(result.units);
}

DatasetSplit load_project_split(const Project& project) {
    const ordered_json stage = stage_json(project, "split");
    return load_split(project.dir() / stage.at("path").get<std::string>());
}

std::vector<LabeledSegment> select_by_ids(const std::vector<LabeledSegment>& segments,
                                          const std::vector<std::string>& ids) {
    std::unordered_map<std::string, const LabeledSegment*> index;
    index.reserve(segments.size());
    for (const auto& seg : segments) index.emplace(seg.unit.id, &seg);
    std::vector<LabeledSegment> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = index.find(id);
        if (it == index.end())
            throw ValidationError("split references unknown unit id '" + id + "'");
        out.push_back(*it->second);
    }
    return out;
}

std::string api_key(const Options& o) {
    if (!o.api_key_file.empty()) {
        const std::string text = read_file(o.api_key_file);
        const auto end = text.find_first_of("\r\n");
        std::string key = text.substr(0, end);
        const auto begin = key.find_first_not_of(" \t");
        if (begin == std::string::npos)
            throw ValidationError("api key file '" + o.api_key_file + "' is blank");
        const auto last = key.find_last_not_of(" \t");
        return key.substr(begin, last - begin + 1);
    }
    const char* env = std::getenv("OPENAI_API_KEY");
    return env ? env : "";
}

std::shared_ptr<OpenAiClient> make_client(const Options& o) {
    std::shared_ptr<Transport> transport;
    if (!o.mock_scenario.empty())
        transport = std::make_shared<ScriptedTransport>(read_file(o.mock_scenario));
    else
        transport = std::make_shared<HttplibTransport>(o.api_base);
    ClientConfig config;
    config.api_key = api_key(o);
    if (o.mock_scenario.empty() && config.api_key.empty())
        throw ValidationError(
            "no API key: set OPENAI_API_KEY, pass --api-key-file, or use "
            "--mock-scenario for offline runs");
    config.jitter_seed = o.seed;
    config.retry.initial_backoff = std::chrono::milliseconds(o.retry_backoff_ms);
    return std::make_shared<OpenAiClient>(std::move(transport), std::move(config));
}

ordered_json job_to_json(const FineTuneJob& job) {
    ordered_json j;
    j["id"] = job.job_id;
    j["base_model"] = job.base_model;
    j["status"] = std::string(to_string(job.status));
    if (job.fine_tuned_model)
        j["fine_tuned_model"] = *job.fine_tuned_model;
    else
        j["fine_tuned_model"] = nullptr;
    j["created_at"] = job.created_at;
    if (job.finished_at)
        j["finished_at"] = *job.finished_at;
    else
        j["finished_at"] = nullptr;
    if (!job.hyperparams.empty()) {
        ordered_json params = ordered_json::object();
        for (const auto& [name, value] : job.hyperparams) params[name] = value;
        j["hyperparams"] = std::move(params);
    }
    return j;
}

ordered_json rejections_to_json(const std::vector<Rejection>& rejections) {
    ordered_json out = ordered_json::array();
    for (const auto& r : rejections) {
        if (out.size() >= kMaxManifestRejections) break;
        out.push_back(ordered_json{{"locator", r.locator}, {"reason", r.reason}});
    }
    return out;
}

PromptEncoding encoding_from_project(const Project& project) {
    const ordered_json prepare = stage_json(project, "prepare");
    const auto dialect = dialect_from_string(prepare.at("dialect").get<std::string>());
    if (!dialect) throw ValidationError("prepare stage has an unknown dialect");
    PromptEncoding enc;
    enc.dialect = *dialect;
    return enc;
}

// ---------------------------------------------------------------- commands

void cmd_init(const Options& o) {
    if (o.project.empty()) throw ValidationError("--project is required here");
    Project project = Project::init(o.project);
    std::cout << "initialized project at " << project.dir().string() << "\n";
}

struct IngestArgs {
    std::string input;
    std::string input_format;  // empty = guess from extension
    std::string pe_file;
    std::string lang;
};

CorpusFormat resolve_format(const IngestArgs& args) {
    if (!args.input_format.empty()) {
        const auto format = corpus_format_from_string(args.input_format);
        if (!format)
            throw ValidationError("unknown input format '" + args.input_format + "'");
        return *format;
    }
    const std::string ext = std::filesystem::path(args.input).extension().string();
    if (ext == ".tsv" || ext == ".tab") return CorpusFormat::Tsv;
    if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::Jsonl;
    if (ext == ".tmx") return CorpusFormat::TmxPair;
    throw ValidationError("cannot guess format of '" + args.input +
                          "', pass --input-format");
}

void cmd_ingest(const Options& o, const IngestArgs& args) {
    Project project = open_project(o);
    const CorpusFormat format = resolve_format(args);
    CorpusFile file;
    file.path = args.input;
    file.format = format;
    file.lang_pair = parse_lang_pair(args.lang);

    IngestResult parsed;
    if (format == CorpusFormat::TmxPair) {
        if (args.pe_file.empty())
            throw ValidationError("tmx ingest needs --pe-file with the post-edited TMX");
        CorpusFile pe = file;
        pe.path = args.pe_file;
        parsed = parse_tmx_pair(file, pe);
    } else if (format == CorpusFormat::Tsv) {
        parsed = parse_tsv(file);
    } else {
        parsed = parse_jsonl(file);
    }

    IngestResult valid = filter_valid(std::move(parsed.units));
    IngestReport report;
    report.accepted = valid.units.size();
    report.rejected = parsed.report.rejected + valid.report.rejected;
    report.rejections = parsed.report.rejections;
    report.rejections.insert(report.rejections.end(), valid.report.rejections.begin(),
                             valid.report.rejections.end());
    if (valid.units.empty()) throw ValidationError("no valid units survived ingest");

    write_file_atomic(project.corpus_dir() / "corpus.jsonl", to_jsonl(valid.units));
    const std::string fingerprint = corpus_fingerprint(valid.units);

    ordered_json payload;
    payload["input"] = args.input;
    if (!args.pe_file.empty()) payload["pe_input"] = args.pe_file;
    payload["format"] = std::string(to_string(format));
    payload["lang_pair"] = to_string(file.lang_pair);
    payload["accepted"] = report.accepted;
    payload["rejected"] = report.rejected;
    payload["rejections"] = rejections_to_json(report.rejections);
    if (report.rejections.size() > kMaxManifestRejections)
        payload["rejections_truncated"] = true;
    payload["corpus_path"] = "corpus/corpus.jsonl";
    payload["fingerprint_algorithm"] = "sha256";
    payload["corpus_fingerprint"] = fingerprint;
    project.record_stage("ingest", payload.dump());

    std::cout << "ingested " << report.accepted << " units (" << report.rejected
              << " rejected) fingerprint " << fingerprint << "\n";
}

void cmd_split(const Options& o, double ratio) {
    Project project = open_project(o);
    const std::vector<TranslationUnit> units = load_corpus(project);
    const std::vector<LengthBucket> buckets = parse_buckets(o.buckets);
    const std::vector<LabeledSegment> segments = label_segments(units, buckets);
    const DatasetSplit split = stratified_split(segments, ratio, o.seed, buckets);
    save_split(split, project.splits_dir() / "split.json");

    ordered_json payload;
    payload["path"] = "splits/split.json";
    payload["ratio"] = ratio;
    payload["seed"] = o.seed;
    payload["buckets"] = to_string(buckets);
    payload["train_count"] = split.train_ids.size();
    payload["test_count"] = split.test_ids.size();
    project.record_stage("split", payload.dump());

    std::cout << "split " << segments.size() << " segments: train=" << split.train_ids.size()
              << " test=" << split.test_ids.size() << " seed=" << o.seed << "\n";
}

void cmd_prepare(const Options& o, const std::string& dialect_name) {
    Project project = open_project(o);
    const DatasetSplit split = load_project_split(project);
    const std::vector<TranslationUnit> units = load_corpus(project);
    const std::vector<LabeledSegment> segments = label_segments(units, split.buckets);
    const std::vector<LabeledSegment> train = select_by_ids(segments, split.train_ids);

    const auto dialect = dialect_from_string(dialect_name);
    if (!dialect) throw ValidationError("unknown dialect '" + dialect_name + "'");
    PromptEncoding enc;
    enc.dialect = *dialect;

    const PreparedFile prepared = prepare_training_file(train, enc);
    write_file_atomic(project.jobs_dir() / "training.jsonl", prepared.jsonl);

    ordered_json payload;
    payload["path"] = "jobs/training.jsonl";
    payload["dialect"] = std::string(to_string(enc.dialect));
    payload["records"] = prepared.records;
    payload["rejected"] = prepared.report.rejected;
    if (prepared.report.rejected != 0)
        payload["rejections"] = rejections_to_json(prepared.report.rejections);
    project.record_stage("prepare", payload.dump());

    std::cout << "prepared " << prepared.records << " training records ("
              << prepared.report.rejected << " rejected) -> jobs/training.jsonl\n";
}

void cmd_finetune_start(const Options& o, const std::string& base_model,
                        const std::vector<std::string>& hyperparams) {
    Project project = open_project(o);
    const ordered_json prepare = stage_json(project, "prepare");
    const std::string training =
        read_file(project.dir() / prepare.at("path").get<std::string>());

    std::map<std::string, std::string> params;
    for (const auto& kv : hyperparams) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ValidationError("--hyperparam wants name=value, got '" + kv + "'");
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    auto client = make_client(o);
    const std::string file_id = client->upload_file(training);
    const FineTuneJob job = client->create_job(file_id, base_model, params);
    write_file_atomic(project.jobs_dir() / "job.json", job_to_json(job).dump(2) + "\n");

    ordered_json payload;
    payload["api_base"] = o.api_base;
    payload["file_id"] = file_id;
    payload["base_model"] = base_model;
    payload["job"] = job_to_json(job);
    project.record_stage("finetune", payload.dump());

    std::cout << "created job " << job.job_id << " status " << to_string(job.status)
              << "\n";
}

void cmd_finetune_status(const Options& o, bool wait) {
    Project project = open_project(o);
    const ordered_json finetune = stage_json(project, "finetune");
    const std::string job_id = finetune.at("job").at("id").get<std::string>();

    auto client = make_client(o);
    FineTuneJob job;
    bool timed_out = false;
    if (wait) {
        const auto result =
            client->poll_job(job_id, std::chrono::milliseconds(o.poll_interval_ms),
                             std::chrono::milliseconds(o.poll_timeout_ms));
        job = result.job;
        timed_out = result.timed_out;
    } else {
        job = client->retrieve_job(job_id);
    }
    write_file_atomic(project.jobs_dir() / "job.json", job_to_json(job).dump(2) + "\n");

    if (job.status == JobStatus::Succeeded && !project.has_stage("finetune_result")) {
        ordered_json payload;
        payload["job"] = job_to_json(job);
        payload["fine_tuned_model"] = *job.fine_tuned_model;
        project.record_stage("finetune_result", payload.dump());
    }

    std::cout << "job " << job.job_id << " status " << to_string(job.status);
    if (job.fine_tuned_model) std::cout << " model " << *job.fine_tuned_model;
    if (timed_out) std::cout << " (timed out waiting)";
    std::cout << "\n";
}

void cmd_finetune_events(const Options& o) {
    Project project = open_project(o);
    const ordered_json finetune = stage_json(project, "finetune");
    const std::string job_id = finetune.at("job").at("id").get<std::string>();

    auto client = make_client(o);
    const std::vector<TrainingEvent> events = client->fetch_events(job_id);

    std::string csv = "step,loss\n";
    for (const auto& event : events)
        csv += std::to_string(event.step) + "," + ordered_json(event.loss).dump() + "\n";
    write_file_atomic(project.jobs_dir() / "events.csv", csv);

    if (!project.has_stage("events")) {
        ordered_json payload;
        payload["path"] = "jobs/events.csv";
        payload["count"] = events.size();
        project.record_stage("events", payload.dump());
    }

    std::cout << "fetched " << events.size() << " events -> jobs/events.csv\n";
}

void cmd_predict(const Options& o) {
    Project project = open_project(o);
    const DatasetSplit split = load_project_split(project);
    const std::vector<TranslationUnit> units = load_corpus(project);
    const std::vector<LabeledSegment> segments = label_segments(units, split.buckets);
    const std::vector<LabeledSegment> test = select_by_ids(segments, split.test_ids);

    std::unique_ptr<ClassifierBackend> backend;
    if (o.backend == "baseline") {
        const std::vector<LabeledSegment> train = select_by_ids(segments, split.train_ids);
        BaselineModel model = train_baseline(train);
        save_baseline(model, (project.jobs_dir() / "baseline_model.jsonl").string());
        backend = std::make_unique<BaselineBackend>(std::move(model));
    } else if (o.backend == "remote") {
        const ordered_json result = stage_json(project, "finetune_result");
        const std::string model_ref = result.at("fine_tuned_model").get<std::string>();
        backend = std::make_unique<RemoteBackend>(make_client(o), model_ref,
                                                  encoding_from_project(project));
    } else {
        throw ValidationError("unknown backend '" + o.backend + "'");
    }

    BatchOptions batch;
    batch.concurrency = o.concurrency;
    const BatchResult result = classify_batch(*backend, test, batch);
    write_file_atomic(project.predictions_dir() / "predictions.jsonl",
                      predictions_to_jsonl(result.predictions));

    const std::string run_id = derive_run_id(split.seed);
    ordered_json payload;
    payload["run_id"] = run_id;
    payload["backend"] = backend->name();
    payload["concurrency"] = o.concurrency;
    payload["path"] = "predictions/predictions.jsonl";
    payload["total"] = result.predictions.size();
    payload["abstained"] = result.abstained;
    if (!result.errors.empty()) payload["errors"] = rejections_to_json(result.errors);
    project.record_stage("predict", payload.dump());

    std::cout << "predicted " << result.predictions.size() << " segments ("
              << result.abstained << " abstained) -> predictions/predictions.jsonl\n";
}

ordered_json matrix_to_manifest(const ConfusionMatrix& m) {
    ordered_json j;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    j["abstained"] = m.abstained;
    return j;
}

void export_lai(const std::vector<Prediction>& predictions, const std::string& path) {
    std::string csv = "unit_id,lai\n";
    for (const auto& p : predictions)
        csv += p.unit_id + "," +
               ((p.predicted && *p.predicted == Label::Keep) ? "true" : "false") + "\n";
    write_file_atomic(path, csv);
}

void cmd_eval(const Options& o, const std::string& matrix_arg,
              const std::string& export_lai_path) {
    const SavingsParams params{o.pay_rate};
    if (!matrix_arg.empty()) {
        if (!export_lai_path.empty())
            throw ValidationError("--export-lai needs project predictions, not --matrix");
        const MetricsReport report = metrics_report(parse_matrix(matrix_arg), params);
        std::cout << render_report(report, report_format(o));
        return;
    }

    Project project = open_project(o);
    const ordered_json predict = stage_json(project, "predict");
    const std::vector<Prediction> predictions = predictions_from_jsonl(
        read_file(project.dir() / predict.at("path").get<std::string>()));
    const ConfusionMatrix matrix = confusion_from(predictions);
    const MetricsReport report = metrics_report(matrix, params);

    const std::string run_id = predict.at("run_id").get<std::string>();
    const ReportFormat format = report_format(o);
    const std::string report_rel =
        "reports/" + run_id + "." + std::string(file_extension(format));
    write_file_atomic(project.dir() / report_rel, render_report(report, format));
    if (!export_lai_path.empty()) export_lai(predictions, export_lai_path);

    ordered_json payload;
    payload["run_id"] = run_id;
    payload["pay_rate"] = o.pay_rate;
    payload["matrix"] = matrix_to_manifest(matrix);
    payload["report_path"] = report_rel;
    payload["metrics"] = ordered_json::parse(render_json(report));
    project.record_stage("eval", payload.dump());

    std::cout << render_report(report, format);
}

std::string pay_rate_percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g%%", rate * 100.0);
    return buf;
}

std::string render_savings_text(const MetricsReport& report) {
    std::string out;
    out += "error ceiling (scenario 1): " + format_percent(report.error_ceiling) + "\n";
    out += "savings (scenario 1): " + format_percent(report.scenario1_savings) + "\n";
    out += "savings (scenario 2, pay rate " +
           pay_rate_percent(report.params.lai_review_pay_rate) +
           "): " + format_percent(report.scenario2_savings) + "\n";
    return out;
}

std::string render_savings(const MetricsReport& report, ReportFormat format) {
    if (format == ReportFormat::Text) return render_savings_text(report);
    if (format == ReportFormat::Json) {
        ordered_json doc;
        doc["pay_rate"] = report.params.lai_review_pay_rate;
        doc["error_ceiling"] = report.error_ceiling;
        doc["scenario1_savings"] = report.scenario1_savings;
        doc["scenario2_savings"] = report.scenario2_savings;
        return doc.dump(2) + "\n";
    }
    ordered_json ceiling = report.error_ceiling;
    ordered_json s1 = report.scenario1_savings;
    ordered_json s2 = report.scenario2_savings;
    return "error_ceiling,scenario1_savings,scenario2_savings\n" + ceiling.dump() + "," +
           s1.dump() + "," + s2.dump() + "\n";
}

void cmd_savings(const Options& o, const std::string& matrix_arg) {
    const SavingsParams params{o.pay_rate};
    if (!matrix_arg.empty()) {
        const MetricsReport report = metrics_report(parse_matrix(matrix_arg), params);
        std::cout << render_savings(report, report_format(o));
        return;
    }

    Project project = open_project(o);
    const ordered_json eval_stage = stage_json(project, "eval");
    ConfusionMatrix matrix;
    const ordered_json& jm = eval_stage.at("matrix");
    matrix.tp = jm.at("tp").get<std::uint64_t>();
    matrix.fp = jm.at("fp").get<std::uint64_t>();
    matrix.tn = jm.at("tn").get<std::uint64_t>();
    matrix.fn = jm.at("fn").get<std::uint64_t>();
    matrix.abstained = jm.at("abstained").get<std::uint64_t>();
    const MetricsReport report = metrics_report(matrix, params);

    if (!project.has_stage("savings")) {
        ordered_json payload;
        payload["run_id"] = eval_stage.at("run_id");
        payload["pay_rate"] = o.pay_rate;
        payload["error_ceiling"] = report.error_ceiling;
        payload["scenario1_savings"] = report.scenario1_savings;
        payload["scenario2_savings"] = report.scenario2_savings;
        project.record_stage("savings", payload.dump());
    }

    std::cout << render_savings(report, report_format(o));
}

// "name=correct/total" or "name=tp,fp,tn,fn[,abstained]".
std::pair<std::string, ConfusionMatrix> parse_compare_entry(const std::string& entry) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("--entry wants name=correct/total or name=tp,fp,tn,fn");
    const std::string name = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if (value.find('/') != std::string::npos) {
        const auto parts = split_on(value, '/');
        if (parts.size() != 2)
            throw ValidationError("--entry '" + name + "': wants correct/total");
        const std::uint64_t correct = parse_count(parts[0], "--entry correct");
        const std::uint64_t total = parse_count(parts[1], "--entry total");
        if (correct > total || total == 0)
            throw ValidationError("--entry '" + name + "': correct must be <= total, total > 0");
        // Accuracy-only view: correct lands in tp, the rest in fp.
        ConfusionMatrix m;
        m.tp = correct;
        m.fp = total - correct;
        return {name, m};
    }
    return {name, parse_matrix(value)};
}

void cmd_compare(const Options& o, const std::vector<std::string>& entries) {
    if (entries.size() < 2)
        throw ValidationError("compare needs at least two --entry values");
    std::vector<std::pair<std::string, ConfusionMatrix>> runs;
    runs.reserve(entries.size());
    for (const auto& entry : entries) runs.push_back(parse_compare_entry(entry));
    const std::vector<ModelComparisonRow> rows = compare_models(runs);
    const ReportFormat format = report_format(o);
    if (format == ReportFormat::Csv)
        throw ValidationError("compare renders text or json, not csv");
    std::cout << (format == ReportFormat::Json ? render_comparison_json(rows)
                                               : render_comparison_text(rows));
}

// "size=tp,fp,tn,fn[,abstained]"
LearningCurvePoint parse_curve_point(const std::string& point) {
    const auto eq = point.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("--point wants size=tp,fp,tn,fn");
    const std::uint64_t size = parse_count(point.substr(0, eq), "--point size");
    return learning_curve_point(static_cast<std::size_t>(size),
                                parse_matrix(point.substr(eq + 1)));
}

void cmd_curve(const Options& o, const std::vector<std::string>& points) {
    std::vector<LearningCurvePoint> parsed;
    parsed.reserve(points.size());
    for (const auto& point : points) parsed.push_back(parse_curve_point(point));
    const LearningCurve curve = learning_curve(std::move(parsed));
    const ReportFormat format = report_format(o);
    if (format == ReportFormat::Csv)
        throw ValidationError("curve renders text or json, not csv");
    std::cout << (format == ReportFormat::Json ? render_curve_json(curve)
                                               : render_curve_text(curve));
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"machine-translation post-editing classification pipeline"};
    app.set_version_flag("--version", "mtpe 0.1.0");
    app.set_config("--config", "", "config file (TOML, keys = long option names)");
    app.require_subcommand(1);

    app.add_option("--project", o.project, "project directory");
    app.add_option("--seed", o.seed, "seed for every random choice")
        ->capture_default_str();
    app.add_option("--api-base", o.api_base, "OpenAI-compatible base URL")
        ->capture_default_str();
    app.add_option("--backend", o.backend, "classifier backend")
        ->check(CLI::IsMember({"baseline", "remote"}))
        ->capture_default_str();
    app.add_option("--format", o.format, "report format")
        ->check(CLI::IsMember({"text", "json", "csv"}))
        ->capture_default_str();
    app.add_option("--buckets", o.buckets, "source-length buckets")
        ->capture_default_str();
    app.add_option("--mock-scenario", o.mock_scenario,
                   "scripted transport scenario JSON (offline testing)");
    app.add_option("--api-key-file", o.api_key_file,
                   "read the API key from this file instead of OPENAI_API_KEY");
    app.add_option("--pay-rate", o.pay_rate, "scenario-2 LAI review pay rate")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--concurrency", o.concurrency, "max in-flight classify requests")
        ->capture_default_str();
    app.add_option("--poll-interval-ms", o.poll_interval_ms, "job poll interval")
        ->capture_default_str();
    app.add_option("--poll-timeout-ms", o.poll_timeout_ms, "job poll timeout")
        ->capture_default_str();
    app.add_option("--retry-backoff-ms", o.retry_backoff_ms, "initial retry backoff")
        ->capture_default_str();

    auto* init = app.add_subcommand("init", "create an empty project layout");
    init->fallthrough();
    init->callback([&] { cmd_init(o); });

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "parse, validate and store a corpus");
    ingest->fallthrough();
    ingest->add_option("--input", ingest_args.input, "corpus file (mt TMX for tmx format)")
        ->required();
    ingest->add_option("--input-format", ingest_args.input_format,
                       "tsv | jsonl | tmx (default: by extension)");
    ingest->add_option("--pe-file", ingest_args.pe_file, "post-edited TMX (tmx format)");
    ingest->add_option("--lang", ingest_args.lang, "language pair, e.g. en-it")
        ->required();
    ingest->callback([&] { cmd_ingest(o, ingest_args); });

    double ratio = 0.9;
    auto* split = app.add_subcommand("split", "stratified train/test split");
    split->fallthrough();
    split->add_option("--ratio", ratio, "train fraction")->capture_default_str();
    split->callback([&] { cmd_split(o, ratio); });

    std::string dialect = "completion";
    auto* prepare = app.add_subcommand("prepare", "encode the training JSONL");
    prepare->fallthrough();
    prepare->add_option("--dialect", dialect, "prompt encoding dialect")
        ->check(CLI::IsMember({"completion", "chat"}))
        ->capture_default_str();
    prepare->callback([&] { cmd_prepare(o, dialect); });

    auto* finetune = app.add_subcommand("finetune", "fine-tuning job lifecycle");
    finetune->require_subcommand(1);
    finetune->fallthrough();

    std::string base_model = "curie";
    std::vector<std::string> hyperparams;
    auto* ft_start = finetune->add_subcommand("start", "upload the file and create a job");
    ft_start->fallthrough();
    ft_start->add_option("--base-model", base_model, "base model identifier")
        ->capture_default_str();
    ft_start->add_option("--hyperparam", hyperparams, "name=value, repeatable");
    ft_start->callback([&] { cmd_finetune_start(o, base_model, hyperparams); });

    bool wait = false;
    auto* ft_status = finetune->add_subcommand("status", "show (or await) job status");
    ft_status->fallthrough();
    ft_status->add_flag("--wait", wait, "poll until the job is terminal");
    ft_status->callback([&] { cmd_finetune_status(o, wait); });

    auto* ft_events = finetune->add_subcommand("events", "fetch the training event log");
    ft_events->fallthrough();
    ft_events->callback([&] { cmd_finetune_events(o); });

    auto* predict = app.add_subcommand("predict", "classify the test set");
    predict->fallthrough();
    predict->callback([&] { cmd_predict(o); });

    std::string eval_matrix;
    std::string export_lai_path;
    auto* eval = app.add_subcommand("eval", "confusion matrix and derived metrics");
    eval->fallthrough();
    eval->add_option("--matrix", eval_matrix, "literal tp,fp,tn,fn[,abstained] counts");
    eval->add_option("--export-lai", export_lai_path,
                     "write (unit_id, lai) CSV of leave-as-is flags");
    eval->callback([&] { cmd_eval(o, eval_matrix, export_lai_path); });

    std::string savings_matrix;
    auto* savings = app.add_subcommand("savings", "cost-savings scenarios");
    savings->fallthrough();
    savings->add_option("--matrix", savings_matrix,
                        "literal tp,fp,tn,fn[,abstained] counts");
    savings->callback([&] { cmd_savings(o, savings_matrix); });

    std::vector<std::string> entries;
    auto* compare = app.add_subcommand("compare", "model accuracy comparison");
    compare->fallthrough();
    compare->add_option("--entry", entries,
                        "name=correct/total or name=tp,fp,tn,fn, repeatable");
    compare->callback([&] { cmd_compare(o, entries); });

    std::vector<std::string> points;
    auto* curve = app.add_subcommand("curve", "learning-curve table and trend");
    curve->fallthrough();
    curve->add_option("--point", points, "size=tp,fp,tn,fn, repeatable")->required();
    curve->callback([&] { cmd_curve(o, points); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 3;
    } catch (const StageError& e) {
        std::cerr << "error: stage: " << e.what() << "\n";
        return 2;
    } catch (const TransportError& e) {
        std::cerr << "error: transport: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
