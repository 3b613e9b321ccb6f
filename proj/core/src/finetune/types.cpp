#include "mtpe/finetune/types.hpp"

#include "mtpe/errors.hpp"

namespace mtpe {

std::string_view to_string(JobStatus status) {
    switch (status) {
        case JobStatus::Pending: return "pending";
        case JobStatus::Running: return "running";
        case JobStatus::Succeeded: return "succeeded";
        case JobStatus::Failed: return "failed";
        case JobStatus::Cancelled: return "cancelled";
    }
    return "?";
}

std::optional<JobStatus> job_status_from_string(std::string_view s) {
    if (s == "pending" || s == "queued" || s == "validating_files" ||
        s == "created")
        return JobStatus::Pending;
    if (s == "running") return JobStatus::Running;
    if (s == "succeeded") return JobStatus::Succeeded;
    if (s == "failed") return JobStatus::Failed;
    if (s == "cancelled" || s == "canceled") return JobStatus::Cancelled;
    return std::nullopt;
}

bool is_terminal(JobStatus status) {
    return status == JobStatus::Succeeded || status == JobStatus::Failed ||
           status == JobStatus::Cancelled;
}

void validate_job(const FineTuneJob& job) {
    if (job.job_id.empty()) throw ValidationError("job has no id");
    const bool succeeded = job.status == JobStatus::Succeeded;
    if (succeeded != job.fine_tuned_model.has_value())
        throw ValidationError("job '" + job.job_id + "': fine_tuned_model must be " +
                              (succeeded ? "present" : "absent") + " for status '" +
                              std::string(to_string(job.status)) + "'");
    if (is_terminal(job.status) != job.finished_at.has_value())
        throw ValidationError("job '" + job.job_id + "': finished_at must be " +
                              (is_terminal(job.status) ? "present" : "absent") +
                              " for status '" + std::string(to_string(job.status)) + "'");
}

void validate_events(std::span<const TrainingEvent> events) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].loss < 0.0)
            throw ValidationError("event " + std::to_string(i) + " has negative loss");
        if (i > 0 && events[i].step <= events[i - 1].step)
            throw ValidationError("event steps not strictly increasing at index " +
                                  std::to_string(i));
    }
}

}  // namespace mtpe
