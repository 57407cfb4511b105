#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lexdiar/core.hpp"
#include "lexdiar/scorer.hpp"

namespace lexdiar {

struct NgramEntry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;
};

// ARPA back-off model. tables[n-1] maps space-joined n-token sequences to
// their entry; probabilities stay in log10 as stored in the file.
struct NgramModel {
    int order = 0;
    std::vector<std::unordered_map<std::string, NgramEntry>> tables;
    std::unordered_set<std::string> vocabulary;

    bool in_vocabulary(const std::string &token) const {
        return vocabulary.count(token) > 0;
    }
    const NgramEntry *find(size_t n, const std::string &key) const {
        if (n == 0 || n > tables.size())
            return nullptr;
        auto it = tables[n - 1].find(key);
        return it == tables[n - 1].end() ? nullptr : &it->second;
    }
};

// Parse ARPA text: \data\ header with ngram counts, \N-grams: sections,
// \end\. Declared counts must match parsed entries; every higher-order
// gram's prefix must exist one order down; the vocabulary must contain
// <unk>.
NgramModel parse_arpa(std::istream &in);
NgramModel load_arpa(const std::string &path);

// Katz back-off score of `word` after `context` (most recent token last),
// in log10. Tokens outside the vocabulary are mapped to <unk>; the context
// is truncated to the model's order minus one.
double score_word(const NgramModel &model, const std::vector<std::string> &context,
                  const std::string &word);

// Shortest suffix of `tokens` containing min(word_budget, #words) word
// tokens, extended backward over the marker tokens immediately preceding it.
// Markers never count against the budget.
std::vector<std::string> truncate_context(const std::vector<std::string> &tokens,
                                          int word_budget);

// Per-speaker posterior over who utters `word` next: each speaker's context
// is the last C-1 words of its token history, with <s> appended for every
// speaker other than the hypothesis's last speaker (they would be opening a
// new turn). Raw probabilities 10^score are normalized to sum to one; if
// every speaker is at or below the floor the posterior is uniform.
SpeakerProbVector speaker_posterior_ngram(const NgramModel &model,
                                          const Hypothesis &hyp,
                                          const std::string &word, int context_window,
                                          double prob_floor = 1e-10);

// Probability of `word` continuing the combined all-speaker context,
// clamped to [prob_floor, 1].
double word_probability_ngram(const NgramModel &model, const Hypothesis &hyp,
                              const std::string &word, int context_window,
                              double prob_floor = 1e-10);

// LexicalScorer backed by an ARPA model. The model must outlive the scorer.
class NgramScorer : public LexicalScorer {
  public:
    explicit NgramScorer(const NgramModel &model, double prob_floor = 1e-10)
        : model_(&model), prob_floor_(prob_floor) {}

    SpeakerProbVector speaker_posterior(const Hypothesis &hyp,
                                        const std::string &word,
                                        int context_window) const override {
        return speaker_posterior_ngram(*model_, hyp, word, context_window,
                                       prob_floor_);
    }
    double word_probability(const Hypothesis &hyp, const std::string &word,
                            int context_window) const override {
        return word_probability_ngram(*model_, hyp, word, context_window,
                                      prob_floor_);
    }

  private:
    const NgramModel *model_;
    double prob_floor_;
};

} // namespace lexdiar
