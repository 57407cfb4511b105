#include "lexdiar/mock_llm.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace lexdiar {

namespace {

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

double MockRules::score(const std::string &prompt,
                        const std::string &candidate) const {
    for (const MockRule &rule : rules)
        if (rule.candidate == candidate && ends_with(prompt, rule.suffix))
            return rule.log_prob;
    auto split = token_splits.find(candidate);
    if (split != token_splits.end()) {
        double total = 0.0;
        for (const std::string &token : split->second) {
            auto it = token_log_probs.find(token);
            total += it == token_log_probs.end() ? default_log_prob : it->second;
        }
        return total;
    }
    return default_log_prob;
}

MockRules parse_mock_rules(const std::string &json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw ParseError("mock rule file is not a JSON object");
    MockRules rules;
    if (doc.contains("default_log_prob"))
        rules.default_log_prob = doc["default_log_prob"].get<double>();
    if (doc.contains("rules")) {
        if (!doc["rules"].is_array())
            throw ParseError("'rules' must be an array");
        for (const auto &r : doc["rules"]) {
            if (!r.is_object() || !r.contains("suffix") || !r.contains("candidate") ||
                !r.contains("log_prob"))
                throw ParseError(
                    "each rule needs 'suffix', 'candidate' and 'log_prob'");
            rules.rules.push_back(MockRule{r["suffix"].get<std::string>(),
                                           r["candidate"].get<std::string>(),
                                           r["log_prob"].get<double>()});
        }
    }
    if (doc.contains("token_splits"))
        rules.token_splits =
            doc["token_splits"]
                .get<std::unordered_map<std::string, std::vector<std::string>>>();
    if (doc.contains("token_log_probs"))
        rules.token_log_probs =
            doc["token_log_probs"].get<std::unordered_map<std::string, double>>();
    return rules;
}

MockRules load_mock_rules(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open mock rule file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mock_rules(buf.str());
}

struct MockLlmServer::Impl {
    MockRules rules;
    httplib::Server server;
    std::thread thread;

    explicit Impl(MockRules r) : rules(std::move(r)) {
        server.Post("/v1/score", [this](const httplib::Request &req,
                                        httplib::Response &res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object() || !body.contains("id") ||
                !body["id"].is_string() || !body.contains("prompt") ||
                !body["prompt"].is_string() || !body.contains("continuations") ||
                !body["continuations"].is_array() || body["continuations"].empty()) {
                res.status = 400;
                res.set_content("{\"error\":\"malformed request\"}",
                                "application/json");
                return;
            }
            const std::string prompt = body["prompt"].get<std::string>();
            nlohmann::ordered_json reply;
            reply["id"] = body["id"].get<std::string>();
            std::vector<double> log_probs;
            for (const auto &cand : body["continuations"]) {
                if (!cand.is_string()) {
                    res.status = 400;
                    res.set_content("{\"error\":\"continuations must be strings\"}",
                                    "application/json");
                    return;
                }
                log_probs.push_back(rules.score(prompt, cand.get<std::string>()));
            }
            reply["log_probs"] = log_probs;
            res.set_content(reply.dump(), "application/json");
        });
    }
};

MockLlmServer::MockLlmServer(MockRules rules)
    : impl_(std::make_unique<Impl>(std::move(rules))) {}

MockLlmServer::~MockLlmServer() { stop(); }

void MockLlmServer::start(const std::string &host, int port) {
    if (impl_->thread.joinable())
        throw Error("mock server already running");
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ <= 0)
            throw Error("mock server failed to bind on " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw Error("mock server failed to bind " + host + ":" +
                        std::to_string(port));
        port_ = port;
    }
    impl_->thread = std::thread([this]() { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockLlmServer::stop() {
    if (!impl_)
        return;
    if (impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

std::string MockLlmServer::endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
}

} // namespace lexdiar
