#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mhqa {

enum class ServiceErrorKind { Network, Timeout, HttpStatus, MalformedBody };

class ServiceError : public std::runtime_error {
public:
    ServiceError(ServiceErrorKind kind, std::string message, int status = 0)
        : std::runtime_error(std::move(message)), kind_(kind), status_(status) {}
    ServiceErrorKind kind() const { return kind_; }
    int status() const { return status_; } // HTTP status for HttpStatus errors

private:
    ServiceErrorKind kind_;
    int status_;
};

struct GenerationResult {
    std::string text;
    // Absent log-probs make the backend inference-only; training never goes
    // through it either way.
    std::optional<std::vector<double>> token_logprobs;
};

struct ExternalConfig {
    std::string endpoint; // full URL, e.g. http://localhost:8080/generate
    int timeout_ms = 5000;
    // Name of the environment variable holding an optional bearer token.
    std::string token_env = "MHQA_EXTERNAL_TOKEN";
};

// POST {"prompt": ..., "max_tokens": ...}; expects {"text": ..., "token_logprobs": [...]?}.
GenerationResult external_generate(const ExternalConfig& cfg, const std::string& prompt,
                                   int max_tokens);

} // namespace mhqa
