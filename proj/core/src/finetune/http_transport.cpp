#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "mtpe/finetune/http_transport.hpp"

#include "mtpe/errors.hpp"

namespace mtpe {

HttplibTransport::HttplibTransport(std::string base_url, std::chrono::seconds read_timeout)
    : base_url_(std::move(base_url)), read_timeout_(read_timeout) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(read_timeout_);
    client.set_follow_location(true);

    httplib::Headers headers;
    for (const auto& [name, value] : request.headers) headers.emplace(name, value);

    httplib::Result result;
    if (request.method == "GET") {
        result = client.Get(request.path, headers);
    } else if (request.method == "POST") {
        result = client.Post(request.path, headers, request.body, request.content_type);
    } else {
        throw Error("unsupported HTTP method '" + request.method + "'");
    }

    if (!result)
        throw TransportError("transport failure against " + base_url_ + request.path +
                                 ": " + httplib::to_string(result.error()),
                             /*retryable=*/true);
    return HttpResponse{result->status, result->body};
}

}  // namespace mtpe
