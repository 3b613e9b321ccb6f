#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "mtpe/finetune/transport.hpp"

namespace mtpe {

// In-process mock transport driven by a JSON scenario:
//
//   {"rules": [
//     {"match": {"method": "POST", "path": "/v1/files",
//                "body_contains": "optional substring"},
//      "responses": [
//        {"status": 200, "body": {"id": "file-0001"}},
//        {"error": "timeout"}
//      ],
//      "repeat_last": true}
//   ]}
//
// Every match key is optional; "path" matches exactly. Rules are tried in
// order; the first matching rule with a response left serves (and
// consumes) the head of its queue. With "repeat_last" an exhausted rule
// keeps serving its final response; otherwise it stops matching. A
// {"error": ...} entry throws a retryable TransportError instead of
// responding. "body" may be a JSON value (serialized compactly) or a
// plain string. A request no rule matches is a scenario bug and throws.
class ScriptedTransport : public Transport {
public:
    explicit ScriptedTransport(const std::string& scenario_json);
    static ScriptedTransport from_file(const std::filesystem::path& path);

    HttpResponse send(const HttpRequest& request) override;

    std::size_t request_count() const;
    // Snapshot of every request seen, in arrival order.
    std::vector<HttpRequest> requests() const;

private:
    struct Rule {
        std::string method;         // empty = any
        std::string path;           // empty = any
        std::string body_contains;  // empty = any
        struct Entry {
            bool fail = false;
            std::string fail_reason;
            HttpResponse response;
        };
        std::vector<Entry> entries;
        bool repeat_last = false;
        std::size_t next = 0;
    };

    mutable std::mutex mutex_;
    std::vector<Rule> rules_;
    std::vector<HttpRequest> log_;
};

}  // namespace mtpe
