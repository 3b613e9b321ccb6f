#include "mtpe/finetune/client.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "mtpe/errors.hpp"
#include "mtpe/splitter.hpp"

namespace mtpe {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kBoundary = "mtpe-multipart-2f6b1c94d8";

json parse_body(const std::string& body, const std::string& context) {
    json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded())
        throw ValidationError(context + ": response is not valid JSON");
    return doc;
}

std::string server_message(const std::string& body) {
    json doc = json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (doc.is_object() && doc.contains("error")) {
        const auto& err = doc["error"];
        if (err.is_string()) return err.get<std::string>();
        if (err.is_object() && err.contains("message") && err["message"].is_string())
            return err["message"].get<std::string>();
    }
    return body.substr(0, 200);
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

FineTuneJob parse_job(const json& j) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
        throw ValidationError("job response missing string 'id'");
    FineTuneJob job;
    job.job_id = j["id"].get<std::string>();
    job.base_model = j.value("model", "");
    const std::string status = j.value("status", "");
    const auto parsed = job_status_from_string(status);
    if (!parsed)
        throw ValidationError("job '" + job.job_id + "': unknown status '" + status + "'");
    job.status = *parsed;
    if (j.contains("fine_tuned_model") && j["fine_tuned_model"].is_string())
        job.fine_tuned_model = j["fine_tuned_model"].get<std::string>();
    job.created_at = j.value("created_at", std::int64_t{0});
    if (j.contains("finished_at") && j["finished_at"].is_number())
        job.finished_at = j["finished_at"].get<std::int64_t>();
    if (j.contains("hyperparameters") && j["hyperparameters"].is_object())
        for (const auto& [name, value] : j["hyperparameters"].items())
            job.hyperparams[name] =
                value.is_string() ? value.get<std::string>() : value.dump();
    validate_job(job);
    return job;
}

// Hyperparameter values round-trip as JSON when they parse as scalars
// ("4" stays the number 4), otherwise as strings.
ordered_json hyperparams_to_json(const std::map<std::string, std::string>& params) {
    ordered_json out = ordered_json::object();
    for (const auto& [name, value] : params) {
        json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
        if (!parsed.is_discarded() && (parsed.is_number() || parsed.is_boolean()))
            out[name] = parsed;
        else
            out[name] = value;
    }
    return out;
}

std::optional<TrainingEvent> parse_event(const json& entry) {
    if (!entry.is_object()) return std::nullopt;
    TrainingEvent event;
    event.timestamp = entry.value("created_at", std::int64_t{0});
    if (entry.contains("step") && entry.contains("loss")) {
        event.step = entry["step"].get<std::uint64_t>();
        event.loss = entry["loss"].get<double>();
        return event;
    }
    if (entry.contains("data") && entry["data"].is_object()) {
        const auto& data = entry["data"];
        if (data.contains("step") && data.contains("train_loss")) {
            event.step = data["step"].get<std::uint64_t>();
            event.loss = data["train_loss"].get<double>();
            return event;
        }
    }
    return std::nullopt;  // message-only event
}

}  // namespace

OpenAiClient::OpenAiClient(std::shared_ptr<Transport> transport, ClientConfig config)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      jitter_state_(splitmix64(config_.jitter_seed)) {
    if (!transport_) throw ValidationError("client needs a transport");
}

HttpRequest OpenAiClient::make_request(std::string method, std::string path,
                                       std::string body,
                                       std::string content_type) const {
    HttpRequest request;
    request.method = std::move(method);
    request.path = std::move(path);
    request.body = std::move(body);
    request.content_type = std::move(content_type);
    if (!request.content_type.empty())
        request.headers["Content-Type"] = request.content_type;
    if (!config_.api_key.empty())
        request.headers["Authorization"] = "Bearer " + config_.api_key;
    return request;
}

HttpResponse OpenAiClient::send_with_retry(const HttpRequest& request) {
    const RetryPolicy& policy = config_.retry;
    const int attempts = std::max(policy.attempts, 1);
    auto backoff = policy.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        std::string failure;
        try {
            ++request_count_;
            HttpResponse response = transport_->send(request);
            if (!retryable_status(response.status)) return response;
            failure = "HTTP " + std::to_string(response.status) + ": " +
                      server_message(response.body);
        } catch (const TransportError& e) {
            if (!e.retryable()) throw;
            failure = e.what();
        }
        if (attempt >= attempts)
            throw TransportError(request.method + " " + request.path + " failed after " +
                                     std::to_string(attempts) + " attempts: " + failure,
                                 /*retryable=*/true);
        const std::uint64_t jitter_ms =
            splitmix64(jitter_state_.fetch_add(1)) % (backoff.count() / 10 + 1);
        std::this_thread::sleep_for(backoff + std::chrono::milliseconds(jitter_ms));
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(backoff.count() * policy.multiplier));
    }
}

namespace {

void reject_client_error(const HttpResponse& response, const std::string& context) {
    if (response.status >= 200 && response.status < 300) return;
    std::string msg = context + ": HTTP " + std::to_string(response.status);
    if (response.status == 401 || response.status == 403)
        msg += " invalid credentials";
    const std::string detail = server_message(response.body);
    if (!detail.empty()) msg += " (" + detail + ")";
    throw TransportError(msg, /*retryable=*/false, response.status);
}

}  // namespace

std::string OpenAiClient::upload_file(const std::string& jsonl,
                                      const std::string& filename) {
    if (jsonl.empty()) throw ValidationError("refusing to upload an empty file");
    std::string body;
    body += "--" + std::string(kBoundary) + "\r\n";
    body += "Content-Disposition: form-data; name=\"purpose\"\r\n\r\n";
    body += "fine-tune\r\n";
    body += "--" + std::string(kBoundary) + "\r\n";
    body += "Content-Disposition: form-data; name=\"file\"; filename=\"" + filename +
            "\"\r\n";
    body += "Content-Type: application/jsonl\r\n\r\n";
    body += jsonl;
    body += "\r\n--" + std::string(kBoundary) + "--\r\n";

    HttpResponse response = send_with_retry(
        make_request("POST", "/v1/files", std::move(body),
                     "multipart/form-data; boundary=" + std::string(kBoundary)));
    reject_client_error(response, "file upload");
    json doc = parse_body(response.body, "file upload");
    if (!doc.contains("id") || !doc["id"].is_string())
        throw ValidationError("file upload response missing string 'id'");
    return doc["id"].get<std::string>();
}

FineTuneJob OpenAiClient::create_job(const std::string& file_id,
                                     const std::string& base_model,
                                     const std::map<std::string, std::string>& hyperparams) {
    if (file_id.empty()) throw ValidationError("create_job needs a file id");
    if (base_model.empty()) throw ValidationError("create_job needs a base model");
    ordered_json body;
    body["training_file"] = file_id;
    body["model"] = base_model;
    if (!hyperparams.empty()) body["hyperparameters"] = hyperparams_to_json(hyperparams);

    HttpResponse response = send_with_retry(
        make_request("POST", "/v1/fine_tuning/jobs", body.dump(), "application/json"));
    reject_client_error(response, "job creation");
    return parse_job(parse_body(response.body, "job creation"));
}

FineTuneJob OpenAiClient::retrieve_job(const std::string& job_id) {
    HttpResponse response =
        send_with_retry(make_request("GET", "/v1/fine_tuning/jobs/" + job_id, "", ""));
    reject_client_error(response, "job '" + job_id + "'");
    return parse_job(parse_body(response.body, "job '" + job_id + "'"));
}

OpenAiClient::PollResult OpenAiClient::poll_job(const std::string& job_id,
                                                std::chrono::milliseconds interval,
                                                std::chrono::milliseconds timeout) {
    if (interval.count() < 1) interval = std::chrono::milliseconds(1);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    PollResult result;
    for (;;) {
        result.job = retrieve_job(job_id);
        ++result.polls;
        if (is_terminal(result.job.status)) return result;
        if (std::chrono::steady_clock::now() >= deadline) {
            result.timed_out = true;
            return result;
        }
        const std::uint64_t jitter_ms =
            splitmix64(jitter_state_.fetch_add(1)) % (interval.count() / 10 + 1);
        std::this_thread::sleep_for(interval + std::chrono::milliseconds(jitter_ms));
    }
}

std::vector<TrainingEvent> OpenAiClient::fetch_events(const std::string& job_id) {
    HttpResponse response = send_with_retry(
        make_request("GET", "/v1/fine_tuning/jobs/" + job_id + "/events", "", ""));
    reject_client_error(response, "events for job '" + job_id + "'");
    json doc = parse_body(response.body, "events for job '" + job_id + "'");
    if (!doc.contains("data") || !doc["data"].is_array())
        throw ValidationError("events response missing 'data' array");
    std::vector<TrainingEvent> events;
    for (const auto& entry : doc["data"])
        if (auto event = parse_event(entry)) events.push_back(*event);
    validate_events(events);
    return events;
}

namespace {

OpenAiClient::CompletionResult parse_completion(const json& doc, bool chat) {
    if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
        doc["choices"].empty())
        throw ValidationError("completion response has no choices");
    const json& choice = doc["choices"][0];
    OpenAiClient::CompletionResult result;
    if (chat) {
        if (!choice.contains("message") || !choice["message"].is_object() ||
            !choice["message"].contains("content") ||
            !choice["message"]["content"].is_string())
            throw ValidationError("chat completion choice has no message content");
        result.text = choice["message"]["content"].get<std::string>();
        if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
            const auto& lp = choice["logprobs"];
            if (lp.contains("content") && lp["content"].is_array() &&
                !lp["content"].empty() && lp["content"][0].contains("logprob") &&
                lp["content"][0]["logprob"].is_number())
                result.logprob = lp["content"][0]["logprob"].get<double>();
        }
    } else {
        if (!choice.contains("text") || !choice["text"].is_string())
            throw ValidationError("completion choice has no text");
        result.text = choice["text"].get<std::string>();
        if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
            const auto& lp = choice["logprobs"];
            if (lp.contains("token_logprobs") && lp["token_logprobs"].is_array() &&
                !lp["token_logprobs"].empty() && lp["token_logprobs"][0].is_number())
                result.logprob = lp["token_logprobs"][0].get<double>();
        }
    }
    return result;
}

}  // namespace

OpenAiClient::CompletionResult OpenAiClient::complete(const std::string& model,
                                                      const std::string& prompt,
                                                      int max_tokens) {
    ordered_json body;
    body["model"] = model;
    body["prompt"] = prompt;
    body["max_tokens"] = max_tokens;
    body["temperature"] = 0;
    body["logprobs"] = 1;

    HttpResponse response = send_with_retry(
        make_request("POST", "/v1/completions", body.dump(), "application/json"));
    reject_client_error(response, "completion");
    return parse_completion(parse_body(response.body, "completion"), /*chat=*/false);
}

OpenAiClient::CompletionResult OpenAiClient::chat_complete(const std::string& model,
                                                           const std::string& system,
                                                           const std::string& user,
                                                           int max_tokens) {
    ordered_json body;
    body["model"] = model;
    body["messages"] = ordered_json::array({
        ordered_json{{"role", "system"}, {"content", system}},
        ordered_json{{"role", "user"}, {"content", user}},
    });
    body["max_tokens"] = max_tokens;
    body["temperature"] = 0;

    HttpResponse response = send_with_retry(
        make_request("POST", "/v1/chat/completions", body.dump(), "application/json"));
    reject_client_error(response, "chat completion");
    return parse_completion(parse_body(response.body, "chat completion"), /*chat=*/true);
}

}  // namespace mtpe
