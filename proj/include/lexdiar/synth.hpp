#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexdiar/core.hpp"

namespace lexdiar {

// Synthetic dialogue generator: speaker turns with geometric lengths,
// per-speaker vocabularies with controllable overlap, and acoustic vectors
// derived from the true labels by temperature softening with per-word
// Gumbel logit noise (so the argmax flips at a rate that grows with
// acoustic_noise while q stays a valid probability vector).
struct SynthConfig {
    int num_speakers = 2;
    int num_words = 120;
    double lexical_separability = 1.0; // 1: disjoint per-speaker vocabularies
    double acoustic_noise = 0.5;       // temperature; 0: exact one-hot q
    double turn_change_prob = 0.25;
    uint64_t seed = 0;
    int exclusive_vocab_size = 15; // words owned by each speaker
    int shared_vocab_size = 10;    // words any speaker may use

    void validate() const;
};

struct SynthVocabulary {
    std::vector<std::vector<std::string>> exclusive; // per speaker
    std::vector<std::string> shared;
};

struct SynthSession {
    SessionInput session;
    SpeakerAttributedTranscript reference;
};

// Deterministic word lists for a config; independent of the seed.
SynthVocabulary synth_vocabulary(const SynthConfig &cfg);

// Fully determined by cfg (including cfg.seed).
SynthSession generate_synthetic_session(const SynthConfig &cfg);

// Bigram ARPA model of the generating process, derived analytically from
// the config (no sampling): same-speaker continuations at their true
// probabilities, turn-end mass on </s>, turn-initial words under <s>, and a
// harsh back-off for cross-vocabulary continuations.
std::string build_synthetic_arpa(const SynthConfig &cfg);

} // namespace lexdiar
