#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtpe {

enum class JobStatus { Pending, Running, Succeeded, Failed, Cancelled };

std::string_view to_string(JobStatus status);

// Maps API status strings; "validating_files" and "queued" fold into
// Pending. Unknown strings yield nullopt.
std::optional<JobStatus> job_status_from_string(std::string_view s);

bool is_terminal(JobStatus status);

struct FineTuneJob {
    std::string job_id;
    std::string base_model;
    JobStatus status = JobStatus::Pending;
    std::optional<std::string> fine_tuned_model;
    std::int64_t created_at = 0;  // unix seconds
    std::optional<std::int64_t> finished_at;
    // Passed through opaque; values are the server's JSON values rendered
    // as text (numbers keep their JSON spelling).
    std::map<std::string, std::string> hyperparams;
};

// Enforces: fine_tuned_model present iff Succeeded; finished_at present
// iff terminal status.
void validate_job(const FineTuneJob& job);

struct TrainingEvent {
    std::uint64_t step = 0;
    double loss = 0.0;
    std::int64_t timestamp = 0;

    bool operator==(const TrainingEvent&) const = default;
};

// Enforces strictly increasing steps and non-negative losses.
void validate_events(std::span<const TrainingEvent> events);

}  // namespace mtpe
