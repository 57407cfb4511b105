#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexdiar/core.hpp"

namespace lexdiar {

struct AlignmentResult {
    long substitutions = 0;
    long insertions = 0;
    long deletions = 0;
    long reference_length = 0;
    double rate = 0.0;
    // Set when the reference is empty but the hypothesis is not; the rate is
    // then errors over a unit length.
    bool degenerate = false;

    long errors() const { return substitutions + insertions + deletions; }
};

// Lowercase, strip leading/trailing punctuation (intra-word apostrophes and
// hyphens survive), drop words that end up empty.
std::vector<std::string> normalize_text(const std::vector<std::string> &words);

// normalize_text applied per entry; entries that normalize away are dropped.
SpeakerAttributedTranscript
normalize_transcript(const SpeakerAttributedTranscript &transcript);

// Minimum-edit-distance alignment with unit costs over already-normalized
// word sequences.
AlignmentResult wer(const std::vector<std::string> &reference,
                    const std::vector<std::string> &hypothesis);

// Per-speaker WER under a fixed mapping from hypothesis speakers to
// reference speakers. Error counts are summed over speakers and divided by
// the total reference word count.
AlignmentResult sa_wer(const SpeakerAttributedTranscript &reference,
                       const SpeakerAttributedTranscript &hypothesis,
                       const std::unordered_map<int, int> &mapping);

std::unordered_map<int, int>
identity_mapping(const SpeakerAttributedTranscript &hypothesis);

// Concatenated minimum-permutation WER: minimum over all bijections of
// hypothesis speakers onto reference speakers (smaller side padded with
// empty speakers) of the summed per-speaker alignment. Returns the best
// permutation as perm[hyp_speaker] = ref_speaker. Brute force, limited to 8
// speakers.
std::pair<AlignmentResult, std::vector<int>>
cp_wer(const SpeakerAttributedTranscript &reference,
       const SpeakerAttributedTranscript &hypothesis);

// delta_sa = sa_rate - wer_rate, delta_cp = cp_rate - wer_rate.
std::pair<double, double> deltas(double wer_rate, double sa_rate, double cp_rate);

// Onset-ordered word strings of a transcript, markers-free.
std::vector<std::string> transcript_words(const SpeakerAttributedTranscript &t);

} // namespace lexdiar
