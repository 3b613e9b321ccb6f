#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtpe/finetune/transport.hpp"
#include "mtpe/finetune/types.hpp"

namespace mtpe {

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
};

struct ClientConfig {
    std::string api_key;  // empty = no Authorization header (mock runs)
    RetryPolicy retry;
    std::uint64_t jitter_seed = 0;  // poll/backoff jitter; fixed for replay
};

class OpenAiClient {
public:
    OpenAiClient(std::shared_ptr<Transport> transport, ClientConfig config);

    // POST /v1/files (multipart, purpose=fine-tune) -> server file id.
    std::string upload_file(const std::string& jsonl,
                            const std::string& filename = "training.jsonl");

    // POST /v1/fine_tuning/jobs
    FineTuneJob create_job(const std::string& file_id, const std::string& base_model,
                           const std::map<std::string, std::string>& hyperparams = {});

    // GET /v1/fine_tuning/jobs/{id}
    FineTuneJob retrieve_job(const std::string& job_id);

    struct PollResult {
        FineTuneJob job;
        bool timed_out = false;
        std::size_t polls = 0;
    };

    // Polls at `interval` (plus up to 10% jitter) until the job reaches a
    // terminal status or `timeout` elapses; a timeout is not an error and
    // carries the last state seen. Issues at most
    // ceil(timeout/interval)+1 requests.
    PollResult poll_job(const std::string& job_id,
                        std::chrono::milliseconds interval = std::chrono::seconds(30),
                        std::chrono::milliseconds timeout = std::chrono::minutes(40));

    // GET /v1/fine_tuning/jobs/{id}/events, oldest first.
    std::vector<TrainingEvent> fetch_events(const std::string& job_id);

    struct CompletionResult {
        std::string text;                  // first choice
        std::optional<double> logprob;     // label-token log-probability
    };

    // POST /v1/completions, temperature 0.
    CompletionResult complete(const std::string& model, const std::string& prompt,
                              int max_tokens = 2);

    // POST /v1/chat/completions, temperature 0.
    CompletionResult chat_complete(const std::string& model, const std::string& system,
                                   const std::string& user, int max_tokens = 2);

    std::size_t request_count() const { return request_count_.load(); }

private:
    HttpResponse send_with_retry(const HttpRequest& request);
    HttpRequest make_request(std::string method, std::string path, std::string body,
                             std::string content_type) const;

    std::shared_ptr<Transport> transport_;
    ClientConfig config_;
    std::atomic<std::size_t> request_count_{0};
    std::atomic<std::uint64_t> jitter_state_;
};

}  // namespace mtpe
