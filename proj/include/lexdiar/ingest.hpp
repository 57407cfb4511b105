#pragma once

#include <string>
#include <vector>

#include "lexdiar/core.hpp"

namespace lexdiar {

// Frame-level diarizer sigmoids, one vector per frame, frame i starting at
// i * frame_rate_seconds.
struct FrameLogits {
    double frame_rate_seconds = 0.05;
    std::vector<std::vector<double>> frames;

    void validate() const;
};

// Aggregate the frames whose start time falls in [start, end) into one
// normalized speaker probability vector: q_k = sum_t p_k(t) / sum_k sum_t
// p_k(t). An empty or all-zero span yields the uniform vector and sets
// *degenerate when given.
SpeakerProbVector aggregate_word_probability(const FrameLogits &frames,
                                             double start, double end,
                                             bool *degenerate = nullptr);

// Load a session from a JSON-lines file: one record per line with fields
// `word`, `start`, `end` and optionally `q` (array of per-speaker
// probabilities). Words lacking `q` are aggregated from the sidecar
// frame-logits file (default <path>.frames). Non-fatal issues (unsorted
// input, degenerate frame spans) are appended to *warnings when given.
SessionInput load_session(const std::string &path,
                          std::vector<std::string> *warnings = nullptr);
SessionInput load_session(const std::string &path, const std::string &frames_path,
                          std::vector<std::string> *warnings = nullptr);

// Sidecar frame-logits file: header line `frame_rate <seconds>`, then one
// whitespace-separated frame vector per line.
FrameLogits load_frame_logits(const std::string &path);

// Reference / hypothesis transcripts use the session record format plus a
// `speaker` integer field per word.
SpeakerAttributedTranscript load_transcript(const std::string &path);
void save_transcript(const SpeakerAttributedTranscript &transcript,
                     const std::string &path);

} // namespace lexdiar
