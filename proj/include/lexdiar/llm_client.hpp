#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lexdiar/core.hpp"
#include "lexdiar/scorer.hpp"

namespace lexdiar {

// Transport failures and malformed responses. The decoder does not fall
// back on these; a run that hits one aborts.
class LlmError : public Error {
  public:
    explicit LlmError(const std::string &msg) : Error(msg) {}
};

struct LlmPrompt {
    std::string text;
    std::vector<std::string> continuation_candidates;
};

struct ScoreResponse {
    std::string id;
    std::vector<double> log_probs; // natural log
};

// Dialogue prompt asking which speaker utters `word` next. The last
// context_window words of the combined history render as
// "[Speaker<k>]: <turn words>" lines, followed by "[end]", the question and
// the "Answer:[Speaker" stem. Candidates are the bare speaker digits.
// Whitespace is normalized: single space after ':', single newline between
// lines, no trailing newline.
LlmPrompt build_speaker_prompt(const Hypothesis &hyp, const std::string &word,
                               int context_window);

// Same dialogue lines cut at the insertion point: everything at and after
// "[end]" removed, so the text ends with the last committed word (empty for
// an empty history). The single candidate is the word itself.
LlmPrompt build_word_prompt(const Hypothesis &hyp, const std::string &word,
                            int context_window);

// HTTP client for the scoring protocol: POST /v1/score with
// {"id", "prompt", "continuations"}, response {"id", "log_probs"}. Request
// ids are generated per call and responses must echo them.
class LlmClient {
  public:
    explicit LlmClient(const std::string &endpoint);
    ~LlmClient();
    LlmClient(LlmClient &&) noexcept;
    LlmClient &operator=(LlmClient &&) noexcept;

    ScoreResponse score(const LlmPrompt &prompt);
    const std::string &endpoint() const { return endpoint_; }

  private:
    std::string endpoint_;
    unsigned long next_id_ = 0;
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// P(S|W): softmax-free normalization of exp(log_probs) over the speaker
// candidates.
SpeakerProbVector speaker_posterior_llm(LlmClient &client, const LlmPrompt &prompt);

// P(W): exp of the single candidate's total log probability, clamped to
// [prob_floor, 1]. Multi-token words arrive already chain-ruled by the
// server.
double word_probability_llm(LlmClient &client, const LlmPrompt &prompt,
                            double prob_floor = 1e-10);

class LlmScorer : public LexicalScorer {
  public:
    LlmScorer(const std::string &endpoint, double prob_floor = 1e-10)
        : client_(std::make_unique<LlmClient>(endpoint)), prob_floor_(prob_floor) {}

    SpeakerProbVector speaker_posterior(const Hypothesis &hyp,
                                        const std::string &word,
                                        int context_window) const override {
        return speaker_posterior_llm(*client_,
                                     build_speaker_prompt(hyp, word, context_window));
    }
    double word_probability(const Hypothesis &hyp, const std::string &word,
                            int context_window) const override {
        return word_probability_llm(
            *client_, build_word_prompt(hyp, word, context_window), prob_floor_);
    }

  private:
    mutable std::unique_ptr<LlmClient> client_;
    double prob_floor_;
};

} // namespace lexdiar
