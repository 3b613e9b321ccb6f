#include "mtpe/finetune/scripted_transport.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mtpe/errors.hpp"

namespace mtpe {

using json = nlohmann::json;

ScriptedTransport::ScriptedTransport(const std::string& scenario_json) {
    json doc = json::parse(scenario_json, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("rules") ||
        !doc["rules"].is_array())
        throw ValidationError("scenario must be a JSON object with a \"rules\" array");

    for (const auto& jr : doc["rules"]) {
        if (!jr.is_object()) throw ValidationError("scenario rule must be an object");
        Rule rule;
        if (jr.contains("match")) {
            const auto& m = jr["match"];
            rule.method = m.value("method", "");
            rule.path = m.value("path", "");
            rule.body_contains = m.value("body_contains", "");
        }
        rule.repeat_last = jr.value("repeat_last", false);
        if (!jr.contains("responses") || !jr["responses"].is_array() ||
            jr["responses"].empty())
            throw ValidationError("scenario rule needs a non-empty \"responses\" array");
        for (const auto& je : jr["responses"]) {
            Rule::Entry entry;
            if (je.contains("error")) {
                entry.fail = true;
                entry.fail_reason = je["error"].is_string()
                                        ? je["error"].get<std::string>()
                                        : je["error"].dump();
            } else {
                entry.response.status = je.value("status", 200);
                if (je.contains("body"))
                    entry.response.body = je["body"].is_string()
                                              ? je["body"].get<std::string>()
                                              : je["body"].dump();
            }
            rule.entries.push_back(std::move(entry));
        }
        rules_.push_back(std::move(rule));
    }
}

ScriptedTransport ScriptedTransport::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return ScriptedTransport(buf.str());
}

HttpResponse ScriptedTransport::send(const HttpRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    log_.push_back(request);
    for (auto& rule : rules_) {
        if (!rule.method.empty() && rule.method != request.method) continue;
        if (!rule.path.empty() && rule.path != request.path) continue;
        if (!rule.body_contains.empty() &&
            request.body.find(rule.body_contains) == std::string::npos)
            continue;
        if (rule.next >= rule.entries.size()) {
            if (!rule.repeat_last) continue;  // exhausted, stops matching
            rule.next = rule.entries.size() - 1;
        }
        const Rule::Entry& entry = rule.entries[rule.next++];
        if (entry.fail)
            throw TransportError("scripted failure: " + entry.fail_reason,
                                 /*retryable=*/true);
        return entry.response;
    }
    throw Error("scripted transport: no rule matches " + request.method + " " +
                request.path);
}

std::size_t ScriptedTransport::request_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_.size();
}

std::vector<HttpRequest> ScriptedTransport::requests() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_;
}

}  // namespace mtpe
