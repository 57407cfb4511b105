#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexdiar/core.hpp"

namespace lexdiar {

// Deterministic stand-in for the scoring endpoint. Behavior comes entirely
// from a rule table: a request candidate is scored by the first rule whose
// prompt suffix matches, else by summing per-token log probabilities from
// the token table (chain rule), else by the default back-off value.
struct MockRule {
    std::string suffix;    // matches when the request prompt ends with this
    std::string candidate; // must equal the continuation exactly
    double log_prob = 0.0; // natural log
};

struct MockRules {
    double default_log_prob = -13.815510557964274; // ln 1e-6
    std::vector<MockRule> rules;
    std::unordered_map<std::string, std::vector<std::string>> token_splits;
    std::unordered_map<std::string, double> token_log_probs;

    double score(const std::string &prompt, const std::string &candidate) const;
};

// Rule file: JSON object with optional fields `default_log_prob` (real),
// `rules` (array of {"suffix", "candidate", "log_prob"}), `token_splits`
// (candidate -> array of tokens) and `token_log_probs` (token -> real).
MockRules load_mock_rules(const std::string &path);
MockRules parse_mock_rules(const std::string &json_text);

// HTTP server implementing POST /v1/score over a MockRules table. State is
// immutable after construction, so concurrent requests are safe. Identical
// request bodies always produce byte-identical responses.
class MockLlmServer {
  public:
    explicit MockLlmServer(MockRules rules);
    ~MockLlmServer();
    MockLlmServer(const MockLlmServer &) = delete;
    MockLlmServer &operator=(const MockLlmServer &) = delete;

    // Bind and serve on a background thread. port 0 picks a free port.
    void start(const std::string &host = "127.0.0.1", int port = 0);
    void stop();
    int port() const { return port_; }
    std::string endpoint() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

} // namespace lexdiar
