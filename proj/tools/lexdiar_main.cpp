#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexdiar/decoder.hpp"
#include "lexdiar/experiment.hpp"
#include "lexdiar/ingest.hpp"
#include "lexdiar/llm_client.hpp"
#include "lexdiar/metrics.hpp"
#include "lexdiar/mock_llm.hpp"
#include "lexdiar/ngram.hpp"
#include "lexdiar/synth.hpp"
#include "lexdiar/tune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScorerOptions {
    std::string lm = "none"; // sets both sides
    std::string speaker_lm;  // overrides P(S|W) side
    std::string word_lm;     // overrides P(W) side
    std::string arpa_path;
    std::string llm_endpoint;
};

void add_scorer_options(CLI::App *cmd, ScorerOptions &opts) {
    cmd->add_option("--lm", opts.lm, "language model for both terms")
        ->check(CLI::IsMember({"none", "ngram", "llm"}));
    cmd->add_option("--speaker-lm", opts.speaker_lm, "language model for P(S|W)")
        ->check(CLI::IsMember({"ngram", "llm"}));
    cmd->add_option("--word-lm", opts.word_lm, "language model for P(W)")
        ->check(CLI::IsMember({"ngram", "llm"}));
    cmd->add_option("--arpa", opts.arpa_path, "ARPA model file");
    cmd->add_option("--llm-endpoint", opts.llm_endpoint,
                    "scoring endpoint, e.g. http://127.0.0.1:8080");
}

// Owns whichever scorers the options call for and exposes the pair view.
// Heap-held members keep the pair's pointers stable if the bundle moves.
struct ScorerBundle {
    std::unique_ptr<lexdiar::NgramModel> model;
    std::unique_ptr<lexdiar::NgramScorer> ngram;
    std::unique_ptr<lexdiar::LlmScorer> llm;
    lexdiar::LexicalScorerPair pair;
};

ScorerBundle make_scorers(const ScorerOptions &opts, double prob_floor) {
    const std::string speaker_kind =
        opts.speaker_lm.empty() ? opts.lm : opts.speaker_lm;
    const std::string word_kind = opts.word_lm.empty() ? opts.lm : opts.word_lm;
    if ((speaker_kind == "none") != (word_kind == "none"))
        throw lexdiar::Error(
            "either both of P(S|W) and P(W) use a language model or neither does");

    ScorerBundle bundle;
    if (speaker_kind == "none")
        return bundle;

    if (speaker_kind == "ngram" || word_kind == "ngram") {
        if (opts.arpa_path.empty())
            throw lexdiar::Error("--arpa is required with an ngram scorer");
        bundle.model = std::make_unique<lexdiar::NgramModel>(
            lexdiar::load_arpa(opts.arpa_path));
        bundle.ngram =
            std::make_unique<lexdiar::NgramScorer>(*bundle.model, prob_floor);
    }
    if (speaker_kind == "llm" || word_kind == "llm") {
        if (opts.llm_endpoint.empty())
            throw lexdiar::Error("--llm-endpoint is required with an llm scorer");
        bundle.llm =
            std::make_unique<lexdiar::LlmScorer>(opts.llm_endpoint, prob_floor);
    }
    bundle.pair.speaker = speaker_kind == "ngram"
                              ? static_cast<lexdiar::LexicalScorer *>(bundle.ngram.get())
                              : static_cast<lexdiar::LexicalScorer *>(bundle.llm.get());
    bundle.pair.word = word_kind == "ngram"
                           ? static_cast<lexdiar::LexicalScorer *>(bundle.ngram.get())
                           : static_cast<lexdiar::LexicalScorer *>(bundle.llm.get());
    return bundle;
}

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw lexdiar::Error("cannot open " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        throw lexdiar::Error("invalid JSON in " + path);
    return doc;
}

// Paired <name>.session.jsonl / <name>.ref.jsonl files in a directory.
std::vector<lexdiar::DevSession> load_session_dir(const std::string &dir) {
    std::vector<fs::path> session_files;
    for (const auto &entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 14 && name.substr(name.size() - 14) == ".session.jsonl")
            session_files.push_back(entry.path());
    }
    std::sort(session_files.begin(), session_files.end());
    if (session_files.empty())
        throw lexdiar::Error("no *.session.jsonl files in " + dir);

    std::vector<lexdiar::DevSession> out;
    for (const fs::path &sp : session_files) {
        std::string base = sp.string();
        base.erase(base.size() - 14);
        lexdiar::DevSession dev;
        dev.name = fs::path(base).filename().string();
        std::vector<std::string> warnings;
        dev.session = lexdiar::load_session(sp.string(), &warnings);
        for (const std::string &w : warnings)
            std::cerr << "warning: " << sp.string() << ": " << w << "\n";
        dev.reference = lexdiar::load_transcript(base + ".ref.jsonl");
        out.push_back(std::move(dev));
    }
    return out;
}

int cmd_decode(const ScorerOptions &scorer_opts, const std::string &session_path,
               const lexdiar::DecoderConfig &config, const std::string &out_path) {
    std::vector<std::string> warnings;
    lexdiar::SessionInput session = lexdiar::load_session(session_path, &warnings);
    for (const std::string &w : warnings)
        std::cerr << "warning: " << w << "\n";

    ScorerBundle scorers = make_scorers(scorer_opts, config.prob_floor);
    lexdiar::SpeakerAttributedTranscript transcript =
        lexdiar::decode_beam(session, scorers.pair, config);
    if (out_path.empty()) {
        for (const auto &e : transcript.entries)
            std::cout << e.speaker << '\t' << e.text << '\t' << e.start << '\t'
                      << e.end << '\n';
    } else {
        lexdiar::save_transcript(transcript, out_path);
    }
    return 0;
}

int cmd_score(const std::string &ref_path, const std::string &hyp_path,
              const std::string &metric) {
    using namespace lexdiar;
    SpeakerAttributedTranscript ref =
        normalize_transcript(load_transcript(ref_path));
    SpeakerAttributedTranscript hyp =
        normalize_transcript(load_transcript(hyp_path));

    auto print = [](const char *name, const AlignmentResult &a) {
        std::cout << name << " " << a.rate << " [S=" << a.substitutions
                  << " I=" << a.insertions << " D=" << a.deletions
                  << " N=" << a.reference_length << "]"
                  << (a.degenerate ? " (degenerate: empty reference)" : "") << "\n";
    };

    if (metric == "wer" || metric == "all")
        print("wer", wer(transcript_words(ref), transcript_words(hyp)));
    if (metric == "sawer" || metric == "all")
        print("sa_wer", sa_wer(ref, hyp, identity_mapping(hyp)));
    if (metric == "cpwer" || metric == "all") {
        auto [result, perm] = cp_wer(ref, hyp);
        print("cp_wer", result);
        std::cout << "cp_wer permutation:";
        for (size_t h = 0; h < perm.size(); ++h)
            std::cout << " " << h << "->" << perm[h];
        std::cout << "\n";
    }
    return 0;
}

int cmd_tune(const ScorerOptions &scorer_opts, const std::string &dev_dir,
             const std::string &space_path, int budget_override,
             long long seed_override) {
    lexdiar::SearchSpace space;
    if (!space_path.empty()) {
        json doc = read_json_file(space_path);
        if (doc.contains("alpha")) {
            space.alpha_lo = doc["alpha"].at(0).get<double>();
            space.alpha_hi = doc["alpha"].at(1).get<double>();
        }
        if (doc.contains("beta")) {
            space.beta_lo = doc["beta"].at(0).get<double>();
            space.beta_hi = doc["beta"].at(1).get<double>();
        }
        if (doc.contains("context"))
            space.context_values = doc["context"].get<std::vector<int>>();
        if (doc.contains("beam_width"))
            space.beam_widths = doc["beam_width"].get<std::vector<int>>();
        if (doc.contains("budget"))
            space.budget = doc["budget"].get<int>();
        if (doc.contains("seed"))
            space.seed = doc["seed"].get<uint64_t>();
    }
    if (budget_override > 0)
        space.budget = budget_override;
    if (seed_override >= 0)
        space.seed = static_cast<uint64_t>(seed_override);

    std::vector<lexdiar::DevSession> dev = load_session_dir(dev_dir);
    ScorerBundle scorers = make_scorers(scorer_opts, lexdiar::DecoderConfig{}.prob_floor);
    lexdiar::TuneResult result = lexdiar::tune(dev, scorers.pair, space);

    json out;
    out["alpha"] = result.best.alpha;
    out["beta"] = result.best.beta;
    out["context"] = result.best.context_window;
    out["beam_width"] = result.best.beam_width;
    out["objective"] = result.trials[result.best_index].objective;
    out["trials"] = result.trials.size();
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_synth(const std::string &config_path, const std::string &out_dir,
              long long seed_override) {
    lexdiar::SynthConfig cfg;
    int num_sessions = 10;
    if (!config_path.empty()) {
        json doc = read_json_file(config_path);
        if (doc.contains("num_speakers"))
            cfg.num_speakers = doc["num_speakers"].get<int>();
        if (doc.contains("num_words"))
            cfg.num_words = doc["num_words"].get<int>();
        if (doc.contains("lexical_separability"))
            cfg.lexical_separability = doc["lexical_separability"].get<double>();
        if (doc.contains("acoustic_noise"))
            cfg.acoustic_noise = doc["acoustic_noise"].get<double>();
        if (doc.contains("turn_change_prob"))
            cfg.turn_change_prob = doc["turn_change_prob"].get<double>();
        if (doc.contains("seed"))
            cfg.seed = doc["seed"].get<uint64_t>();
        if (doc.contains("exclusive_vocab_size"))
            cfg.exclusive_vocab_size = doc["exclusive_vocab_size"].get<int>();
        if (doc.contains("shared_vocab_size"))
            cfg.shared_vocab_size = doc["shared_vocab_size"].get<int>();
        if (doc.contains("num_sessions"))
            num_sessions = doc["num_sessions"].get<int>();
    }
    if (seed_override >= 0)
        cfg.seed = static_cast<uint64_t>(seed_override);

    fs::create_directories(out_dir);
    for (int i = 0; i < num_sessions; ++i) {
        lexdiar::SynthConfig session_cfg = cfg;
        session_cfg.seed = cfg.seed + static_cast<uint64_t>(i);
        lexdiar::SynthSession s = lexdiar::generate_synthetic_session(session_cfg);

        char stem[32];
        snprintf(stem, sizeof(stem), "%03d", i);
        const fs::path base = fs::path(out_dir) / stem;
        std::ofstream session_out(base.string() + ".session.jsonl");
        for (const lexdiar::WordToken &w : s.session.words) {
            nlohmann::ordered_json rec;
            rec["word"] = w.text;
            rec["start"] = w.start;
            rec["end"] = w.end;
            rec["q"] = w.acoustic.probs();
            session_out << rec.dump() << '\n';
        }
        lexdiar::save_transcript(s.reference, base.string() + ".ref.jsonl");
    }
    std::ofstream arpa_out(fs::path(out_dir) / "model.arpa");
    arpa_out << lexdiar::build_synthetic_arpa(cfg);
    std::cout << "wrote " << num_sessions << " sessions and model.arpa to "
              << out_dir << "\n";
    return 0;
}

int cmd_experiment(const ScorerOptions &scorer_opts, const std::string &dir,
                   const lexdiar::DecoderConfig &config,
                   const std::string &out_path) {
    std::vector<lexdiar::DevSession> data = load_session_dir(dir);
    std::vector<lexdiar::SessionInput> sessions;
    std::vector<lexdiar::SpeakerAttributedTranscript> references;
    std::vector<std::string> names;
    for (auto &d : data) {
        sessions.push_back(std::move(d.session));
        references.push_back(std::move(d.reference));
        names.push_back(d.name);
    }
    ScorerBundle scorers = make_scorers(scorer_opts, config.prob_floor);
    lexdiar::ExperimentReport report =
        lexdiar::run_experiment(sessions, references, scorers.pair, config, names);
    if (out_path.empty()) {
        std::cout << report.to_jsonl();
    } else {
        std::ofstream out(out_path);
        out << report.to_jsonl();
    }
    return 0;
}

int cmd_mock_llm(const std::string &rules_path, int port) {
    lexdiar::MockLlmServer server(lexdiar::load_mock_rules(rules_path));
    server.start("0.0.0.0", port);
    std::cout << "mock-llm listening on port " << server.port() << "\n";
    std::cout << "POST /v1/score; stop with Ctrl-C\n" << std::flush;
    // Serve until killed.
    for (;;)
        std::this_thread::sleep_for(std::chrono::hours(1));
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Speaker attribution by joint acoustic-lexical beam search"};
    app.require_subcommand(1);

    ScorerOptions scorer_opts;
    lexdiar::DecoderConfig config;
    std::string session_path, out_path, ref_path, hyp_path, metric = "all";
    std::string dev_dir, space_path, synth_config, out_dir, rules_path, data_dir;
    int budget = -1, port = 8080;
    long long seed = -1;

    CLI::App *decode = app.add_subcommand("decode", "assign speakers to a session");
    decode->add_option("--session", session_path, "session JSONL file")->required();
    add_scorer_options(decode, scorer_opts);
    decode->add_option("--alpha", config.alpha, "P(W) exponent");
    decode->add_option("--beta", config.beta, "lexical mixing coefficient");
    decode->add_option("--context", config.context_window, "context window words");
    decode->add_option("--beam-width", config.beam_width, "beam width");
    decode->add_option("--out", out_path, "output transcript JSONL");

    CLI::App *score = app.add_subcommand("score", "compare transcripts");
    score->add_option("--ref", ref_path, "reference transcript")->required();
    score->add_option("--hyp", hyp_path, "hypothesis transcript")->required();
    score->add_option("--metric", metric, "which metric to print")
        ->check(CLI::IsMember({"wer", "sawer", "cpwer", "all"}));

    CLI::App *tune = app.add_subcommand("tune", "random-search decoder parameters");
    tune->add_option("--dev-dir", dev_dir, "directory of session/ref pairs")
        ->required();
    tune->add_option("--space", space_path, "search space JSON file");
    tune->add_option("--budget", budget, "number of trials");
    tune->add_option("--seed", seed, "search seed");
    add_scorer_options(tune, scorer_opts);

    CLI::App *synth = app.add_subcommand("synth", "generate synthetic sessions");
    synth->add_option("--config", synth_config, "generator config JSON");
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->add_option("--seed", seed, "base seed");

    CLI::App *experiment =
        app.add_subcommand("experiment", "decode and score a session directory");
    experiment->add_option("--dir", data_dir, "directory of session/ref pairs")
        ->required();
    add_scorer_options(experiment, scorer_opts);
    experiment->add_option("--alpha", config.alpha, "P(W) exponent");
    experiment->add_option("--beta", config.beta, "lexical mixing coefficient");
    experiment->add_option("--context", config.context_window, "context window words");
    experiment->add_option("--beam-width", config.beam_width, "beam width");
    experiment->add_option("--out", out_path, "report JSONL path (default stdout)");

    CLI::App *mock = app.add_subcommand("mock-llm", "serve a deterministic scorer");
    mock->add_option("--rules", rules_path, "rule table JSON")->required();
    mock->add_option("--port", port, "listen port");

    CLI11_PARSE(app, argc, argv);

    try {
        if (decode->parsed())
            return cmd_decode(scorer_opts, session_path, config, out_path);
        if (score->parsed())
            return cmd_score(ref_path, hyp_path, metric);
        if (tune->parsed())
            return cmd_tune(scorer_opts, dev_dir, space_path, budget, seed);
        if (synth->parsed())
            return cmd_synth(synth_config, out_dir, seed);
        if (experiment->parsed())
            return cmd_experiment(scorer_opts, data_dir, config, out_path);
        if (mock->parsed())
            return cmd_mock_llm(rules_path, port);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
