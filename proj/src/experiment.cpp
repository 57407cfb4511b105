#include "lexdiar/experiment.hpp"

#include <json.hpp>

#include "lexdiar/decoder.hpp"
#include "lexdiar/metrics.hpp"

namespace lexdiar {

namespace {

double safe_rate(long errors, long reference_words) {
    return static_cast<double>(errors) /
           static_cast<double>(std::max(reference_words, 1L));
}

} // namespace

double MetricCounts::wer_rate() const { return safe_rate(wer_errors, reference_words); }
double MetricCounts::sa_rate() const { return safe_rate(sa_errors, reference_words); }
double MetricCounts::cp_rate() const { return safe_rate(cp_errors, reference_words); }

MetricCounts &MetricCounts::operator+=(const MetricCounts &other) {
    wer_errors += other.wer_errors;
    sa_errors += other.sa_errors;
    cp_errors += other.cp_errors;
    reference_words += other.reference_words;
    return *this;
}

MetricCounts evaluate_transcripts(const SpeakerAttributedTranscript &reference,
                                  const SpeakerAttributedTranscript &hypothesis) {
    const SpeakerAttributedTranscript ref = normalize_transcript(reference);
    const SpeakerAttributedTranscript hyp = normalize_transcript(hypothesis);

    MetricCounts counts;
    AlignmentResult w = wer(transcript_words(ref), transcript_words(hyp));
    counts.wer_errors = w.errors();
    counts.reference_words = w.reference_length;
    counts.sa_errors = sa_wer(ref, hyp, identity_mapping(hyp)).errors();
    counts.cp_errors = cp_wer(ref, hyp).first.errors();
    return counts;
}

std::string ExperimentReport::to_jsonl() const {
    std::string out;
    for (const ReportRecord &r : records) {
        nlohmann::ordered_json rec;
        rec["session"] = r.session;
        rec["system"] = r.system;
        rec["wer"] = r.counts.wer_rate();
        rec["sa_wer"] = r.counts.sa_rate();
        rec["cp_wer"] = r.counts.cp_rate();
        rec["delta_sa"] = r.counts.delta_sa();
        rec["delta_cp"] = r.counts.delta_cp();
        out += rec.dump();
        out += '\n';
    }
    return out;
}

ExperimentReport run_experiment(const std::vector<SessionInput> &sessions,
                                const std::vector<SpeakerAttributedTranscript> &references,
                                const LexicalScorerPair &scorers,
                                const DecoderConfig &config,
                                const std::vector<std::string> &names) {
    if (sessions.size() != references.size())
        throw Error("session/reference list length mismatch: " +
                    std::to_string(sessions.size()) + " vs " +
                    std::to_string(references.size()));
    if (!names.empty() && names.size() != sessions.size())
        throw Error("session name list length mismatch");

    ExperimentReport report;
    MetricCounts ts_total, bsd_total;
    for (size_t i = 0; i < sessions.size(); ++i) {
        const std::string name =
            names.empty() ? "session_" + std::to_string(i) : names[i];
        MetricCounts ts = evaluate_transcripts(references[i], ts_match(sessions[i]));
        MetricCounts bsd = evaluate_transcripts(
            references[i], decode_beam(sessions[i], scorers, config));
        ts_total += ts;
        bsd_total += bsd;
        report.records.push_back(ReportRecord{name, "TS-match", ts});
        report.records.push_back(ReportRecord{name, "BSD", bsd});
    }
    report.records.push_back(ReportRecord{"mean", "TS-match", ts_total});
    report.records.push_back(ReportRecord{"mean", "BSD", bsd_total});
    return report;
}

} // namespace lexdiar
