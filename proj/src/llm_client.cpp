#include "lexdiar/llm_client.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace lexdiar {

namespace {

// Last `word_budget` words of the turn history, as (speaker, words) lines.
// The oldest turn may be rendered partially.
std::vector<Turn> dialogue_window(const std::vector<Turn> &turns, int word_budget) {
    std::vector<Turn> window;
    int remaining = word_budget;
    for (auto it = turns.rbegin(); it != turns.rend() && remaining > 0; ++it) {
        const long take = std::min<long>(remaining, static_cast<long>(it->words.size()));
        Turn t;
        t.speaker = it->speaker;
        t.words.assign(it->words.end() - take, it->words.end());
        window.push_back(std::move(t));
        remaining -= static_cast<int>(take);
    }
    std::reverse(window.begin(), window.end());
    return window;
}

std::string render_dialogue(const std::vector<Turn> &window) {
    std::string text;
    for (const Turn &t : window) {
        if (!text.empty())
            text += '\n';
        text += "[Speaker" + std::to_string(t.speaker) + "]: ";
        for (size_t i = 0; i < t.words.size(); ++i) {
            if (i > 0)
                text += ' ';
            text += t.words[i];
        }
    }
    return text;
}

} // namespace

LlmPrompt build_speaker_prompt(const Hypothesis &hyp, const std::string &word,
                               int context_window) {
    LlmPrompt prompt;
    std::string dialogue = render_dialogue(dialogue_window(hyp.turns, context_window));
    if (!dialogue.empty())
        dialogue += '\n';
    prompt.text = dialogue + "[end]\nQuestion: The next word is (" + word +
                  "). Who spoke (" + word + ")?\nAnswer:[Speaker";
    for (int k = 0; k < hyp.num_speakers(); ++k)
        prompt.continuation_candidates.push_back(std::to_string(k));
    return prompt;
}

LlmPrompt build_word_prompt(const Hypothesis &hyp, const std::string &word,
                            int context_window) {
    LlmPrompt prompt;
    prompt.text = render_dialogue(dialogue_window(hyp.turns, context_window));
    prompt.continuation_candidates.push_back(word);
    return prompt;
}

struct LlmClient::Impl {
    httplib::Client http;
    explicit Impl(const std::string &endpoint) : http(endpoint) {
        http.set_connection_timeout(10);
        http.set_read_timeout(30);
    }
};

LlmClient::LlmClient(const std::string &endpoint)
    : endpoint_(endpoint), impl_(std::make_unique<Impl>(endpoint)) {}

LlmClient::~LlmClient() = default;
LlmClient::LlmClient(LlmClient &&) noexcept = default;
LlmClient &LlmClient::operator=(LlmClient &&) noexcept = default;

ScoreResponse LlmClient::score(const LlmPrompt &prompt) {
    if (prompt.continuation_candidates.empty())
        throw LlmError("score request needs at least one continuation candidate");

    nlohmann::json body;
    const std::string request_id = "req-" + std::to_string(next_id_++);
    body["id"] = request_id;
    body["prompt"] = prompt.text;
    body["continuations"] = prompt.continuation_candidates;

    httplib::Result res =
        impl_->http.Post("/v1/score", body.dump(), "application/json");
    if (!res)
        throw LlmError("transport failure talking to " + endpoint_ + ": " +
                       httplib::to_string(res.error()));
    if (res->status != 200)
        throw LlmError("scoring endpoint returned HTTP " +
                       std::to_string(res->status));

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object())
        throw LlmError("malformed response body from scoring endpoint");
    if (!reply.contains("id") || !reply["id"].is_string() ||
        reply["id"].get<std::string>() != request_id)
        throw LlmError("response id does not match request id " + request_id);
    if (!reply.contains("log_probs") || !reply["log_probs"].is_array())
        throw LlmError("response missing log_probs array");

    ScoreResponse out;
    out.id = reply["id"].get<std::string>();
    out.log_probs = reply["log_probs"].get<std::vector<double>>();
    if (out.log_probs.size() != prompt.continuation_candidates.size())
        throw LlmError("response has " + std::to_string(out.log_probs.size()) +
                       " log_probs for " +
                       std::to_string(prompt.continuation_candidates.size()) +
                       " continuations");
    for (double lp : out.log_probs)
        if (!std::isfinite(lp))
            throw LlmError("non-finite log probability in response");
    return out;
}

SpeakerProbVector speaker_posterior_llm(LlmClient &client, const LlmPrompt &prompt) {
    ScoreResponse res = client.score(prompt);
    // Shift by the max before exponentiating; the ratio is unchanged and
    // deeply negative responses cannot underflow to an all-zero vector.
    const double max_lp = *std::max_element(res.log_probs.begin(), res.log_probs.end());
    std::vector<double> p(res.log_probs.size());
    for (size_t k = 0; k < p.size(); ++k)
        p[k] = std::exp(res.log_probs[k] - max_lp);
    return SpeakerProbVector::normalized(p);
}

double word_probability_llm(LlmClient &client, const LlmPrompt &prompt,
                            double prob_floor) {
    ScoreResponse res = client.score(prompt);
    const double p = std::exp(res.log_probs.front());
    return std::min(std::max(p, prob_floor), 1.0);
}

} // namespace lexdiar
