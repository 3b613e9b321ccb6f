#pragma once

#include <map>
#include <string>

namespace mtpe {

struct HttpRequest {
    std::string method;  // "GET" | "POST"
    std::string path;    // "/v1/files"
    std::map<std::string, std::string> headers;
    std::string body;
    std::string content_type;
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Minimal HTTP abstraction so the client can run against a scripted
// in-process mock or a real server. Implementations must be safe for
// concurrent send() calls. Connection-level failures are reported by
// throwing TransportError(retryable=true); HTTP error statuses come back
// as ordinary responses for the caller to interpret.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

}  // namespace mtpe
