#pragma once

#include <stdexcept>
#include <string>

namespace mtpe {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data or parameters: rejected files, out-of-range ratios,
// duplicate ids, malformed --matrix strings, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

// A pipeline command was invoked before its prerequisite stage ran.
class StageError : public Error {
public:
    explicit StageError(const std::string& missing_stage)
        : Error("missing prerequisite stage '" + missing_stage + "'"),
          missing_stage_(missing_stage) {}

    const std::string& missing_stage() const { return missing_stage_; }

private:
    std::string missing_stage_;
};

// HTTP/transport failure. `retryable` distinguishes transient conditions
// (timeouts, 5xx, 429) from hard failures (4xx, bad credentials).
class TransportError : public Error {
public:
    TransportError(const std::string& msg, bool retryable, int http_status = 0)
        : Error(msg), retryable_(retryable), http_status_(http_status) {}

    bool retryable() const { return retryable_; }
    int http_status() const { return http_status_; }

private:
    bool retryable_;
    int http_status_;
};

}  // namespace mtpe
