#include "lexdiar/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lexdiar {

void FrameLogits::validate() const {
    if (frame_rate_seconds <= 0.0)
        throw Error("frame_rate must be positive");
    size_t width = frames.empty() ? 0 : frames.front().size();
    for (size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != width)
            throw Error("frame " + std::to_string(i) + " has " +
                        std::to_string(frames[i].size()) + " entries, expected " +
                        std::to_string(width));
        for (double v : frames[i])
            if (!(v >= 0.0 && v <= 1.0))
                throw Error("frame " + std::to_string(i) +
                            " value outside [0, 1]: " + std::to_string(v));
    }
}

SpeakerProbVector aggregate_word_probability(const FrameLogits &frames,
                                             double start, double end,
                                             bool *degenerate) {
    if (end < start)
        throw Error("word span has end < start");
    if (frames.frames.empty())
        throw Error("no frames available for aggregation");
    const size_t num_speakers = frames.frames.front().size();
    if (num_speakers == 0)
        throw Error("frames have zero speaker channels");

    std::vector<double> sums(num_speakers, 0.0);
    double total = 0.0;
    bool any = false;
    for (size_t i = 0; i < frames.frames.size(); ++i) {
        const double t = static_cast<double>(i) * frames.frame_rate_seconds;
        if (t < start || t >= end)
            continue;
        any = true;
        for (size_t k = 0; k < num_speakers; ++k) {
            sums[k] += frames.frames[i][k];
            total += frames.frames[i][k];
        }
    }
    if (!any || total <= 0.0) {
        if (degenerate)
            *degenerate = true;
        return SpeakerProbVector::uniform(num_speakers);
    }
    if (degenerate)
        *degenerate = false;
    for (double &s : sums)
        s /= total;
    return SpeakerProbVector(std::move(sums));
}

FrameLogits load_frame_logits(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open frame-logits file: " + path);
    FrameLogits fl;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string key;
            ls >> key >> fl.frame_rate_seconds;
            if (key != "frame_rate" || ls.fail())
                throw ParseError("expected header 'frame_rate <seconds>' in " + path,
                                 line_no);
            have_header = true;
            continue;
        }
        std::vector<double> frame;
        double v;
        while (ls >> v)
            frame.push_back(v);
        if (!ls.eof())
            throw ParseError("non-numeric frame value in " + path, line_no);
        fl.frames.push_back(std::move(frame));
    }
    if (!have_header)
        throw ParseError("missing frame_rate header in " + path);
    fl.validate();
    return fl;
}

namespace {

nlohmann::json parse_record(const std::string &line, const std::string &path,
                            long line_no) {
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
        throw ParseError("malformed record in " + path, line_no);
    return rec;
}

void require_fields(const nlohmann::json &rec, const std::string &path,
                    long line_no) {
    for (const char *field : {"word", "start", "end"})
        if (!rec.contains(field))
            throw ParseError(std::string("record missing field '") + field +
                                 "' in " + path,
                             line_no);
    if (!rec["word"].is_string() || rec["word"].get<std::string>().empty())
        throw ParseError("field 'word' must be a non-empty string in " + path,
                         line_no);
    if (!rec["start"].is_number() || !rec["end"].is_number())
        throw ParseError("fields 'start'/'end' must be numbers in " + path, line_no);
    if (rec["end"].get<double>() < rec["start"].get<double>())
        throw ParseError("word '" + rec["word"].get<std::string>() +
                             "' has end < start in " + path,
                         line_no);
}

// Loader tolerance for per-word q vectors read from disk; vectors within it
// are renormalized exactly, anything further off is rejected.
constexpr double kLoadSumTolerance = 1e-6;

} // namespace

SessionInput load_session(const std::string &path,
                          std::vector<std::string> *warnings) {
    return load_session(path, path + ".frames", warnings);
}

SessionInput load_session(const std::string &path, const std::string &frames_path,
                          std::vector<std::string> *warnings) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open session file: " + path);

    FrameLogits frames;
    bool frames_loaded = false;

    SessionInput session;
    std::string line;
    long line_no = 0;
    size_t word_index = 0;
    int num_speakers = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        nlohmann::json rec = parse_record(line, path, line_no);
        require_fields(rec, path, line_no);

        WordToken word;
        word.text = rec["word"].get<std::string>();
        word.start = rec["start"].get<double>();
        word.end = rec["end"].get<double>();

        if (rec.contains("q")) {
            if (!rec["q"].is_array() || rec["q"].empty())
                throw ParseError("field 'q' must be a non-empty array in " + path,
                                 line_no);
            std::vector<double> q = rec["q"].get<std::vector<double>>();
            double sum = 0.0;
            for (double v : q) {
                if (v < 0.0)
                    throw ParseError("negative probability in 'q' for word '" +
                                         word.text + "'",
                                     line_no);
                sum += v;
            }
            if (std::abs(sum - 1.0) > kLoadSumTolerance)
                throw ParseError("'q' for word '" + word.text + "' sums to " +
                                     std::to_string(sum) + ", expected 1",
                                 line_no);
            word.acoustic = SpeakerProbVector::normalized(q);
        } else {
            if (!frames_loaded) {
                frames = load_frame_logits(frames_path);
                frames_loaded = true;
            }
            bool degenerate = false;
            word.acoustic =
                aggregate_word_probability(frames, word.start, word.end, &degenerate);
            if (degenerate && warnings)
                warnings->push_back("word " + std::to_string(word_index) + " ('" +
                                    word.text +
                                    "'): no usable frames in span, uniform q");
        }

        if (num_speakers == 0) {
            num_speakers = static_cast<int>(word.acoustic.size());
        } else if (static_cast<int>(word.acoustic.size()) != num_speakers) {
            throw ParseError("word " + std::to_string(word_index) + " ('" +
                                 word.text + "') has " +
                                 std::to_string(word.acoustic.size()) +
                                 " speaker probabilities, expected " +
                                 std::to_string(num_speakers),
                             line_no);
        }
        session.words.push_back(std::move(word));
        ++word_index;
    }

    bool sorted = std::is_sorted(session.words.begin(), session.words.end(),
                                 [](const WordToken &a, const WordToken &b) {
                                     if (a.start != b.start)
                                         return a.start < b.start;
                                     return a.end < b.end;
                                 });
    if (!sorted) {
        std::stable_sort(session.words.begin(), session.words.end(),
                         [](const WordToken &a, const WordToken &b) {
                             if (a.start != b.start)
                                 return a.start < b.start;
                             return a.end < b.end;
                         });
        if (warnings)
            warnings->push_back("session not onset-ordered; sorted by start time");
    }
    session.num_speakers = num_speakers;
    return session;
}

SpeakerAttributedTranscript load_transcript(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open transcript file: " + path);
    SpeakerAttributedTranscript out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos)
            continue;
        nlohmann::json rec = parse_record(line, path, line_no);
        require_fields(rec, path, line_no);
        if (!rec.contains("speaker") || !rec["speaker"].is_number_integer())
            throw ParseError("record missing integer field 'speaker' in " + path,
                             line_no);
        int speaker = rec["speaker"].get<int>();
        if (speaker < 0)
            throw ParseError("negative speaker index in " + path, line_no);
        out.entries.push_back(TranscriptEntry{rec["word"].get<std::string>(),
                                              rec["start"].get<double>(),
                                              rec["end"].get<double>(), speaker});
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const TranscriptEntry &a, const TranscriptEntry &b) {
                         if (a.start != b.start)
                             return a.start < b.start;
                         return a.end < b.end;
                     });
    return out;
}

void save_transcript(const SpeakerAttributedTranscript &transcript,
                     const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write transcript file: " + path);
    for (const TranscriptEntry &e : transcript.entries) {
        nlohmann::ordered_json rec;
        rec["word"] = e.text;
        rec["start"] = e.start;
        rec["end"] = e.end;
        rec["speaker"] = e.speaker;
        out << rec.dump() << '\n';
    }
}

} // namespace lexdiar
