#pragma once

#include <string>
#include <vector>

#include "lexdiar/core.hpp"
#include "lexdiar/scorer.hpp"

namespace lexdiar {

// Pooled alignment counts for one system over one or more sessions; rates
// derive from the pooled integer counts so session means are word-count
// weighted.
struct MetricCounts {
    long wer_errors = 0;
    long sa_errors = 0;
    long cp_errors = 0;
    long reference_words = 0;

    double wer_rate() const;
    double sa_rate() const;
    double cp_rate() const;
    double delta_sa() const { return sa_rate() - wer_rate(); }
    double delta_cp() const { return cp_rate() - wer_rate(); }

    MetricCounts &operator+=(const MetricCounts &other);
};

// Reference vs hypothesis under the identity speaker mapping; both sides
// are text-normalized first.
MetricCounts evaluate_transcripts(const SpeakerAttributedTranscript &reference,
                                  const SpeakerAttributedTranscript &hypothesis);

struct ReportRecord {
    std::string session;
    std::string system; // "TS-match" or "BSD"
    MetricCounts counts;
};

struct ExperimentReport {
    std::vector<ReportRecord> records; // per-session rows, then two mean rows
    std::string to_jsonl() const;
};

// Decode every session with both TS-match and beam search, score each
// against its reference and append pooled mean rows. Session and reference
// lists must align.
ExperimentReport run_experiment(const std::vector<SessionInput> &sessions,
                                const std::vector<SpeakerAttributedTranscript> &references,
                                const LexicalScorerPair &scorers,
                                const DecoderConfig &config,
                                const std::vector<std::string> &names = {});

} // namespace lexdiar
