#pragma once

#include <chrono>
#include <string>

#include "mtpe/finetune/transport.hpp"

namespace mtpe {

// Real HTTP transport. `base_url` is scheme://host[:port]; paths from the
// request are appended verbatim. Each send() uses a fresh connection,
// which keeps the transport trivially safe for concurrent use.
class HttplibTransport : public Transport {
public:
    explicit HttplibTransport(std::string base_url,
                              std::chrono::seconds read_timeout = std::chrono::seconds(120));

    HttpResponse send(const HttpRequest& request) override;

private:
    std::string base_url_;
    std::chrono::seconds read_timeout_;
};

}  // namespace mtpe
