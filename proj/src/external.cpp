#include "mhqa/external.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace mhqa {

namespace {

struct ParsedUrl {
    std::string host_port; // scheme://host:port
    std::string path;
};

ParsedUrl parse_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("external endpoint must include a scheme: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme_end + 3);
    ParsedUrl url;
    if (path_start == std::string::npos) {
        url.host_port = endpoint;
        url.path = "/";
    } else {
        url.host_port = endpoint.substr(0, path_start);
        url.path = endpoint.substr(path_start);
    }
    return url;
}

} // namespace

GenerationResult external_generate(const ExternalConfig& cfg, const std::string& prompt,
                                   int max_tokens) {
    const ParsedUrl url = parse_endpoint(cfg.endpoint);
    httplib::Client client(url.host_port);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000);
    client.set_read_timeout(0, cfg.timeout_ms * 1000);
    client.set_write_timeout(0, cfg.timeout_ms * 1000);

    httplib::Headers headers;
    if (const char* token = std::getenv(cfg.token_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    nlohmann::json body;
    body["prompt"] = prompt;
    body["max_tokens"] = max_tokens;

    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            throw ServiceError(ServiceErrorKind::Timeout,
                               "generation request timed out: " + httplib::to_string(err));
        }
        throw ServiceError(ServiceErrorKind::Network,
                           "generation request failed: " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ServiceError(ServiceErrorKind::HttpStatus,
                           "generation service returned status " + std::to_string(res->status),
                           res->status);
    }
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ServiceError(ServiceErrorKind::MalformedBody,
                           std::string("generation response is not valid JSON: ") + e.what());
    }
    if (!parsed.is_object() || !parsed.contains("text") || !parsed["text"].is_string()) {
        throw ServiceError(ServiceErrorKind::MalformedBody,
                           "generation response is missing the 'text' field");
    }
    GenerationResult result;
    result.text = parsed["text"].get<std::string>();
    if (parsed.contains("token_logprobs")) {
        if (!parsed["token_logprobs"].is_array()) {
            throw ServiceError(ServiceErrorKind::MalformedBody, "'token_logprobs' must be an array");
        }
        std::vector<double> lps;
        for (const auto& v : parsed["token_logprobs"]) lps.push_back(v.get<double>());
        result.token_logprobs = std::move(lps);
    }
    return result;
}

} // namespace mhqa
