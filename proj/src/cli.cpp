#include "diec/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "diec/discourse.hpp"
#include "diec/error.hpp"
#include "diec/fusion.hpp"
#include "diec/lexchain.hpp"
#include "diec/pipeline.hpp"

namespace diec::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config

HashEmbedSpec parse_hash_embed(const std::string& text) {
    HashEmbedSpec spec;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("--hash-embed expects key=value items, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            std::size_t used = 0;
            if (key == "d") {
                spec.dim = std::stoi(value, &used);
                if (spec.dim < 1) throw ConfigError("--hash-embed d must be >= 1");
            } else if (key == "seed") {
                spec.seed = std::stoull(value, &used);
            } else {
                throw ConfigError("--hash-embed: unknown key '" + key + "'");
            }
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw ConfigError("--hash-embed: bad value '" + value + "' for " + key);
        }
    }
    return spec;
}

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key " + where + "." + key);
}

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void PipelineConfig::validate() const {
    model.validate();
    train.validate();
    check_unit(cluster.filter_threshold, "cluster.filter_threshold");
    check_unit(cluster.stop_threshold, "cluster.stop_threshold");
    if (neg_ratio < 1) throw ConfigError("pairs.neg_ratio must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (test_topics < 1) throw ConfigError("test_topics must be >= 1");
    if (buckets.overlap_edges.size() < 2 || buckets.length_edges.empty())
        throw ConfigError("bucket edges need at least two overlap and one length boundary");
    if (!std::is_sorted(buckets.overlap_edges.begin(), buckets.overlap_edges.end()) ||
        !std::is_sorted(buckets.length_edges.begin(), buckets.length_edges.end()))
        throw ConfigError("bucket edges must be ascending");
    if (hash_embed && hash_embed->dim != model.embed_dim)
        throw ConfigError("--hash-embed d=" + std::to_string(hash_embed->dim) +
                          " differs from model.d=" + std::to_string(model.embed_dim));
    synth.validate();
}

json PipelineConfig::to_json() const {
    json out = {
        {"paths",
         {{"corpus", paths.corpus},
          {"embeddings", paths.embeddings},
          {"rst_dir", paths.rst_dir},
          {"lexicon", paths.lexicon},
          {"stoplist", paths.stoplist},
          {"pairs", paths.pairs},
          {"model", paths.model},
          {"scores", paths.scores},
          {"clusters", paths.clusters},
          {"output_dir", paths.output_dir}}},
        {"model", model.to_json()},
        {"train", train.to_json()},
        {"cluster",
         {{"filter_threshold", cluster.filter_threshold},
          {"stop_threshold", cluster.stop_threshold},
          {"within_topic", within_topic}}},
        {"pairs", {{"mode", std::string(to_string(pair_mode))}, {"neg_ratio", neg_ratio}}},
        {"buckets", {{"overlap_edges", buckets.overlap_edges}, {"length_edges", buckets.length_edges}}},
        {"synth", synth.to_json()},
        {"test_topics", test_topics},
        {"seed", seed},
        {"workers", workers},
    };
    if (hash_embed) out["hash_embed"] = {{"d", hash_embed->dim}, {"seed", hash_embed->seed}};
    return out;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    check_keys(j, {"paths", "model", "train", "cluster", "pairs", "buckets", "synth", "test_topics",
                   "seed", "workers", "hash_embed"},
               "config");
    try {
        if (j.contains("paths")) {
            const auto& p = j["paths"];
            check_keys(p, {"corpus", "embeddings", "rst_dir", "lexicon", "stoplist", "pairs", "model",
                           "scores", "clusters", "output_dir"},
                       "paths");
            c.paths.corpus = p.value("corpus", "");
            c.paths.embeddings = p.value("embeddings", "");
            c.paths.rst_dir = p.value("rst_dir", "");
            c.paths.lexicon = p.value("lexicon", "");
            c.paths.stoplist = p.value("stoplist", "");
            c.paths.pairs = p.value("pairs", "");
            c.paths.model = p.value("model", "");
            c.paths.scores = p.value("scores", "");
            c.paths.clusters = p.value("clusters", "");
            c.paths.output_dir = p.value("output_dir", "");
        }
        if (j.contains("model")) {
            check_keys(j["model"], {"d", "d_prime", "K", "layers", "M", "leaky_slope", "mlp_hidden", "mirror_init"},
                       "model");
            c.model = ModelConfig::from_json(j["model"]);
        }
        if (j.contains("train")) {
            check_keys(j["train"], {"learning_rate", "warmup_steps", "batch_size", "weight_decay", "epochs",
                                    "seed", "beta1", "beta2", "epsilon"},
                       "train");
            c.train = TrainConfig::from_json(j["train"]);
        }
        if (j.contains("cluster")) {
            const auto& cl = j["cluster"];
            check_keys(cl, {"filter_threshold", "stop_threshold", "within_topic"}, "cluster");
            c.cluster.filter_threshold = cl.value("filter_threshold", c.cluster.filter_threshold);
            c.cluster.stop_threshold = cl.value("stop_threshold", c.cluster.stop_threshold);
            c.within_topic = cl.value("within_topic", c.within_topic);
        }
        if (j.contains("pairs")) {
            const auto& p = j["pairs"];
            check_keys(p, {"mode", "neg_ratio"}, "pairs");
            if (p.contains("mode")) c.pair_mode = parse_pair_mode(p["mode"].get<std::string>());
            c.neg_ratio = p.value("neg_ratio", c.neg_ratio);
        }
        if (j.contains("buckets")) {
            const auto& b = j["buckets"];
            check_keys(b, {"overlap_edges", "length_edges"}, "buckets");
            c.buckets.overlap_edges = b.value("overlap_edges", c.buckets.overlap_edges);
            c.buckets.length_edges = b.value("length_edges", c.buckets.length_edges);
        }
        if (j.contains("synth")) c.synth = SynthConfig::from_json(j["synth"]);
        c.test_topics = j.value("test_topics", c.test_topics);
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        if (j.contains("hash_embed")) {
            const auto& h = j["hash_embed"];
            check_keys(h, {"d", "seed"}, "hash_embed");
            c.hash_embed = HashEmbedSpec{h.value("d", 16), h.value("seed", std::uint64_t{0})};
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const DataError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return from_json(j);
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool within_topic = false;
    std::string hash_embed;
    std::string ablate_relation;

    // file arguments shared by several subcommands
    std::string corpus, embeddings, rst_dir, lexicon, stoplist, pairs, model, scores, clusters;
    std::string gold, sys, out;
    std::string mode;
    int neg_ratio = 0;
    int test_topics = 0;
};

std::string pick(const std::string& flag, const std::string& configured, const char* what) {
    const std::string& v = flag.empty() ? configured : flag;
    if (v.empty()) throw ConfigError(std::string("no ") + what + " given (flag or config paths." + what + ")");
    return v;
}

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) throw DataError(std::string("missing ") + what + ": " + path);
}

void ensure_parent(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

std::ofstream open_out(const std::string& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
    auto out = open_out(path);
    fn(out);
    if (!out) throw DataError("write failed for " + path);
}

/// Loaded inputs of the graph-based subcommands.
struct Loaded {
    Corpus corpus;
    EmbeddingTable embeddings;
    RstTrees trees;
    Lexicon lexicon;
    Stoplist stoplist;
    std::optional<Relation> ablate;

    PipelineInputs view() const {
        return {&corpus, &embeddings, &trees, &lexicon, &stoplist, ablate};
    }
};

Loaded load_inputs(const Options& o, const PipelineConfig& cfg) {
    Loaded in;
    const std::string corpus = pick(o.corpus, cfg.paths.corpus, "corpus");
    const std::string rst = pick(o.rst_dir, cfg.paths.rst_dir, "rst_dir");
    require_file(corpus, "corpus");
    require_file(rst, "RST directory");
    const std::string lexicon = o.lexicon.empty() ? cfg.paths.lexicon : o.lexicon;
    const std::string stoplist = o.stoplist.empty() ? cfg.paths.stoplist : o.stoplist;
    if (!lexicon.empty()) require_file(lexicon, "lexicon");
    if (!stoplist.empty()) require_file(stoplist, "stoplist");
    std::string embeddings;
    if (!cfg.hash_embed) {
        embeddings = pick(o.embeddings, cfg.paths.embeddings, "embeddings");
        require_file(embeddings, "embeddings");
    }

    in.corpus = load_corpus(corpus);
    if (cfg.hash_embed)
        in.embeddings = hash_embed_corpus(in.corpus, cfg.hash_embed->seed, cfg.hash_embed->dim);
    else
        in.embeddings = load_embeddings(embeddings);
    in.embeddings.check_covers(in.corpus);
    in.trees = load_rst_dir(rst, in.corpus);
    if (!lexicon.empty()) in.lexicon = load_lexicon(lexicon);
    if (!stoplist.empty()) in.stoplist = load_stoplist(stoplist);
    if (!o.ablate_relation.empty()) in.ablate = parse_relation(o.ablate_relation);
    return in;
}

std::vector<MentionPair> load_pair_file(const Options& o, const PipelineConfig& cfg) {
    const std::string path = pick(o.pairs, cfg.paths.pairs, "pairs");
    require_file(path, "pairs");
    return load_pairs(path);
}

void check_pairs(const std::vector<MentionPair>& pairs, const Corpus& corpus) {
    for (const auto& p : pairs) {
        corpus.mention(p.mention_a);
        corpus.mention(p.mention_b);
    }
}

Model load_model(const Options& o, const PipelineConfig& cfg, const EmbeddingTable& embeddings) {
    const std::string path = pick(o.model, cfg.paths.model, "model");
    require_file(path, "model");
    Model model = Model::load(path);
    if (model.config.embed_dim != embeddings.dim())
        throw DataError("checkpoint expects d=" + std::to_string(model.config.embed_dim) +
                        " but embeddings have d=" + std::to_string(embeddings.dim()));
    return model;
}

std::vector<std::string> mention_ids(const Corpus& corpus) {
    std::vector<std::string> ids;
    for (const auto& m : corpus.mentions()) ids.push_back(m.mention_id);
    return ids;
}

ClusterSet run_clustering(const Corpus& corpus, const std::vector<ScoredPair>& scores,
                          const PipelineConfig& cfg) {
    const auto ids = mention_ids(corpus);
    return cfg.within_topic ? agglomerate_within_topic(corpus, ids, scores, cfg.cluster)
                            : agglomerate(ids, scores, cfg.cluster);
}

/// Gold partition from a corpus file or a cluster file.
ClusterSet load_gold(const std::string& path) {
    require_file(path, "gold");
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(e.what(), 1);
        }
        if (rec.is_object() && rec.contains("mention_ids")) return load_clusters(path);
        break;
    }
    return gold_clusters(load_corpus(path));
}

std::string report_json(const json& j) { return j.dump(2) + "\n"; }

int cmd_gen_synth(const Options& o, PipelineConfig cfg) {
    if (o.seed) cfg.synth.seed = *o.seed;
    if (o.test_topics > 0) cfg.test_topics = o.test_topics;
    const std::string dir = pick(o.out, cfg.paths.output_dir, "output_dir");
    const SynthData data = generate_synthetic(cfg.synth);
    const CorpusSplit split = split_by_topic(data.corpus, cfg.test_topics);
    fs::create_directories(dir);
    const fs::path root(dir);
    write_file((root / "corpus.jsonl").string(), [&](auto& out) { write_corpus(data.corpus, out); });
    write_file((root / "train.jsonl").string(), [&](auto& out) { write_corpus(split.train, out); });
    write_file((root / "test.jsonl").string(), [&](auto& out) { write_corpus(split.test, out); });
    write_file((root / "embeddings.jsonl").string(),
               [&](auto& out) { write_embeddings(data.embeddings, data.corpus, out); });
    save_rst_dir(data.rst, root / "rst");
    write_file((root / "lexicon.json").string(),
               [&](auto& out) { out << data.lexicon.to_json().dump(2) << '\n'; });
    write_file((root / "stoplist.txt").string(), [&](auto& out) {
        std::vector<std::string> words(data.stoplist.begin(), data.stoplist.end());
        std::sort(words.begin(), words.end());
        for (const auto& w : words) out << w << '\n';
    });
    write_file((root / "synth_config.json").string(),
               [&](auto& out) { out << cfg.synth.to_json().dump(2) << '\n'; });
    std::cout << "generated " << data.corpus.mentions().size() << " mentions in "
              << data.corpus.documents().size() << " documents (train "
              << split.train.mentions().size() << ", test " << split.test.mentions().size() << ") under "
              << dir << "\n";
    return 0;
}

int cmd_pairs(const Options& o, PipelineConfig cfg) {
    if (o.seed) cfg.seed = *o.seed;
    if (!o.mode.empty()) cfg.pair_mode = parse_pair_mode(o.mode);
    if (o.neg_ratio > 0) cfg.neg_ratio = o.neg_ratio;
    const std::string corpus_path = pick(o.corpus, cfg.paths.corpus, "corpus");
    const std::string out = pick(o.out, cfg.paths.pairs, "pairs");
    require_file(corpus_path, "corpus");
    const Corpus corpus = load_corpus(corpus_path);
    const auto pairs = generate_pairs(corpus, cfg.pair_mode, cfg.neg_ratio, cfg.seed);
    write_file(out, [&](auto& os) { write_pairs(pairs, os); });
    std::size_t pos = 0;
    for (const auto& p : pairs) pos += p.label.value_or(false);
    std::cout << pairs.size() << " pairs (" << pos << " positive, " << pairs.size() - pos
              << " negative) -> " << out << "\n";
    return 0;
}

int cmd_build_graphs(const Options& o, const PipelineConfig& cfg) {
    const Loaded in = load_inputs(o, cfg);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, in.corpus);
    const std::string out = pick(o.out, "", "out");
    const auto view = in.view();
    std::size_t connected = 0;
    write_file(out, [&](auto& os) {
        for (const auto& p : pairs) {
            const auto g = build_pair_graph(view, in.corpus.mention(p.mention_a), in.corpus.mention(p.mention_b));
            connected += is_connected(g.graph);
            json rec = g.graph.to_json();
            rec["mention_a"] = p.mention_a;
            rec["mention_b"] = p.mention_b;
            os << rec.dump() << '\n';
        }
    });
    std::cout << pairs.size() << " graphs (" << connected << " weakly connected) -> " << out << "\n";
    return 0;
}

int cmd_train(const Options& o, PipelineConfig cfg) {
    if (o.seed) cfg.train.seed = *o.seed;
    const Loaded in = load_inputs(o, cfg);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, in.corpus);
    const std::string out = pick(o.model, cfg.paths.model, "model");
    const TrainResult result = train(pairs, in.view(), cfg.model, cfg.train);
    ensure_parent(out);
    result.model.save(out);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "epoch %zu loss %.6f\n", e + 1, result.epoch_loss[e]);
        std::cout << buf;
    }
    std::cout << "model (" << result.model.parameter_count() << " parameters) -> " << out << "\n";
    return 0;
}

int cmd_predict(const Options& o, PipelineConfig cfg) {
    if (o.workers) cfg.workers = *o.workers;
    const Loaded in = load_inputs(o, cfg);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, in.corpus);
    const Model model = load_model(o, cfg, in.embeddings);
    const std::string out = pick(o.scores, cfg.paths.scores, "scores");
    const auto scores = predict(pairs, model, in.view(), cfg.workers);
    write_file(out, [&](auto& os) { write_scores(scores, os); });
    std::cout << scores.size() << " scores -> " << out << "\n";
    return 0;
}

int cmd_cluster(const Options& o, PipelineConfig cfg) {
    if (o.within_topic) cfg.within_topic = true;
    const std::string corpus_path = pick(o.corpus, cfg.paths.corpus, "corpus");
    const std::string scores_path = pick(o.scores, cfg.paths.scores, "scores");
    const std::string out = pick(o.clusters, cfg.paths.clusters, "clusters");
    require_file(corpus_path, "corpus");
    require_file(scores_path, "scores");
    const Corpus corpus = load_corpus(corpus_path);
    const auto clusters = run_clustering(corpus, load_scores(scores_path), cfg);
    write_file(out, [&](auto& os) { write_clusters(clusters, os); });
    std::cout << clusters.size() << " clusters over " << corpus.mentions().size() << " mentions -> "
              << out << "\n";
    return 0;
}

int cmd_score(const Options& o, const PipelineConfig& cfg) {
    const std::string gold_path = o.gold.empty() ? pick(o.corpus, cfg.paths.corpus, "corpus") : o.gold;
    const std::string sys_path = o.sys.empty() ? pick(o.clusters, cfg.paths.clusters, "clusters") : o.sys;
    const ClusterSet gold = load_gold(gold_path);
    require_file(sys_path, "system clusters");
    const ClusterSet sys = load_clusters(sys_path);
    const MetricReport report = evaluate(gold, sys);
    std::cout << format_report_table({{"system", report}});
    if (!o.out.empty()) write_file(o.out, [&](auto& os) { os << report_json(report.to_json()); });
    return 0;
}

int cmd_stats(const Options& o, const PipelineConfig& cfg) {
    const std::string corpus_path = pick(o.corpus, cfg.paths.corpus, "corpus");
    require_file(corpus_path, "corpus");
    const auto stats = corpus_stats(load_corpus(corpus_path)).to_json();
    std::cout << report_json(stats);
    if (!o.out.empty()) write_file(o.out, [&](auto& os) { os << report_json(stats); });
    return 0;
}

int cmd_analyze(const Options& o, const PipelineConfig& cfg) {
    const std::string corpus_path = pick(o.corpus, cfg.paths.corpus, "corpus");
    const std::string sys_path = o.sys.empty() ? pick(o.clusters, cfg.paths.clusters, "clusters") : o.sys;
    require_file(corpus_path, "corpus");
    require_file(sys_path, "system clusters");
    const Corpus corpus = load_corpus(corpus_path);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, corpus);
    const ClusterSet sys = load_clusters(sys_path);
    const BucketReport report = bucketed_eval(corpus, pairs, sys, gold_clusters(corpus), cfg.buckets);

    std::vector<std::pair<std::string, MetricReport>> rows;
    for (const auto& name : cfg.buckets.overlap_names())
        if (auto it = report.overlap.find(name); it != report.overlap.end())
            rows.emplace_back("overlap " + name, it->second.report);
    for (const auto& name : cfg.buckets.length_names())
        if (auto it = report.length.find(name); it != report.length.end())
            rows.emplace_back("length " + name, it->second.report);
    std::cout << format_report_table(rows);
    json j = report.to_json();
    j["stats"] = corpus_stats(corpus).to_json();
    if (!o.out.empty()) write_file(o.out, [&](auto& os) { os << report_json(j); });
    return 0;
}

int cmd_ablate(Options o, PipelineConfig cfg) {
    if (o.workers) cfg.workers = *o.workers;
    if (o.within_topic) cfg.within_topic = true;
    std::vector<Relation> relations;
    if (o.ablate_relation.empty())
        relations.assign(kAllRelations.begin(), kAllRelations.end());
    else
        relations.push_back(parse_relation(o.ablate_relation));
    o.ablate_relation.clear();
    Loaded in = load_inputs(o, cfg);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, in.corpus);
    const Model model = load_model(o, cfg, in.embeddings);
    const ClusterSet gold = gold_clusters(in.corpus);

    auto run_once = [&](std::optional<Relation> r) {
        in.ablate = r;
        const auto scores = predict(pairs, model, in.view(), cfg.workers);
        return evaluate(gold, run_clustering(in.corpus, scores, cfg));
    };
    const MetricReport base = run_once(std::nullopt);
    std::vector<std::pair<std::string, MetricReport>> rows{{"full", base}};
    json j = {{"full", base.to_json()}, {"ablated", json::object()}};
    std::string delta = "relation               CoNLL F1    delta\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-20s %10.3f %8s\n", "full", base.conll_f1, "-");
    delta += buf;
    for (Relation r : relations) {
        const MetricReport rep = run_once(r);
        const std::string name(to_string(r));
        rows.emplace_back("-" + name, rep);
        json entry = rep.to_json();
        entry["delta_conll_f1"] = rep.conll_f1 - base.conll_f1;
        j["ablated"][name] = entry;
        std::snprintf(buf, sizeof buf, "%-20s %10.3f %+8.3f\n", name.c_str(), rep.conll_f1,
                      rep.conll_f1 - base.conll_f1);
        delta += buf;
    }
    std::cout << format_report_table(rows) << "\n" << delta;
    if (!o.out.empty()) write_file(o.out, [&](auto& os) { os << report_json(j); });
    return 0;
}

int cmd_baseline_lemma(const Options& o, PipelineConfig cfg) {
    if (o.within_topic) cfg.within_topic = true;
    const std::string corpus_path = pick(o.corpus, cfg.paths.corpus, "corpus");
    require_file(corpus_path, "corpus");
    const Corpus corpus = load_corpus(corpus_path);
    const auto pairs = load_pair_file(o, cfg);
    check_pairs(pairs, corpus);
    const auto scores = lemma_baseline_scores(pairs, corpus);
    if (!o.scores.empty()) write_file(o.scores, [&](auto& os) { write_scores(scores, os); });
    const ClusterSet clusters = run_clustering(corpus, scores, cfg);
    if (!o.clusters.empty()) write_file(o.clusters, [&](auto& os) { write_clusters(clusters, os); });
    const MetricReport report = evaluate(gold_clusters(corpus), clusters);
    std::cout << format_report_table({{"lemma", report}});
    if (!o.out.empty()) write_file(o.out, [&](auto& os) { os << report_json(report.to_json()); });
    return 0;
}

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Discourse-informed cross-document event coreference"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config_path, "JSON pipeline config");
    app.add_option("--seed", o.seed, "seed of the subcommand's random draws");
    app.add_option("--workers", o.workers, "prediction worker threads");
    app.add_flag("--within-topic", o.within_topic, "cluster each topic separately");
    app.add_option("--hash-embed", o.hash_embed, "use hash embeddings: d=<n>,seed=<n>");
    app.add_option("--ablate-relation", o.ablate_relation, "drop one rhetorical relation from the graphs");

    auto inputs = [&](CLI::App* sub) {
        sub->add_option("--corpus", o.corpus, "corpus JSONL");
        sub->add_option("--embeddings", o.embeddings, "embedding JSONL");
        sub->add_option("--rst-dir", o.rst_dir, "directory of <doc_id>.rst trees");
        sub->add_option("--lexicon", o.lexicon, "lexicon JSON");
        sub->add_option("--stoplist", o.stoplist, "stoplist, one word per line");
        sub->add_option("--pairs", o.pairs, "pair TSV");
    };

    std::function<int()> action;
    PipelineConfig cfg;

    auto* gen = app.add_subcommand("gen-synth", "write a synthetic corpus with trees and embeddings");
    gen->add_option("--out", o.out, "output directory");
    gen->add_option("--test-topics", o.test_topics, "topics held out for test.jsonl");
    gen->callback([&] { action = [&] { return cmd_gen_synth(o, cfg); }; });

    auto* pairs = app.add_subcommand("pairs", "sample labeled mention pairs");
    pairs->add_option("--corpus", o.corpus, "corpus JSONL");
    pairs->add_option("--mode", o.mode, "wec_train | wec_eval | ecb_subtopic");
    pairs->add_option("--neg-ratio", o.neg_ratio, "negatives per positive (wec_train)");
    pairs->add_option("--out", o.out, "pair TSV");
    pairs->callback([&] { action = [&] { return cmd_pairs(o, cfg); }; });

    auto* graphs = app.add_subcommand("build-graphs", "write the merged graph of every pair");
    inputs(graphs);
    graphs->add_option("--out", o.out, "graph JSONL")->required();
    graphs->callback([&] { action = [&] { return cmd_build_graphs(o, cfg); }; });

    auto* tr = app.add_subcommand("train", "train the pair scorer");
    inputs(tr);
    tr->add_option("--model", o.model, "checkpoint to write");
    tr->callback([&] { action = [&] { return cmd_train(o, cfg); }; });

    auto* pred = app.add_subcommand("predict", "score pairs with a checkpoint");
    inputs(pred);
    pred->add_option("--model", o.model, "checkpoint");
    pred->add_option("--out", o.scores, "score TSV");
    pred->callback([&] { action = [&] { return cmd_predict(o, cfg); }; });

    auto* clu = app.add_subcommand("cluster", "agglomerative clustering of scored pairs");
    clu->add_option("--corpus", o.corpus, "corpus JSONL (mention universe)");
    clu->add_option("--scores", o.scores, "score TSV");
    clu->add_option("--out", o.clusters, "cluster JSONL");
    clu->callback([&] { action = [&] { return cmd_cluster(o, cfg); }; });

    auto* sc = app.add_subcommand("score", "MUC, B3, CEAF-e and CoNLL F1");
    sc->add_option("--gold", o.gold, "gold corpus JSONL or cluster JSONL");
    sc->add_option("--sys", o.sys, "system cluster JSONL");
    sc->add_option("--out", o.out, "report JSON");
    sc->callback([&] { action = [&] { return cmd_score(o, cfg); }; });

    auto* st = app.add_subcommand("stats", "corpus statistics");
    st->add_option("--corpus", o.corpus, "corpus JSONL");
    st->add_option("--out", o.out, "stats JSON");
    st->callback([&] { action = [&] { return cmd_stats(o, cfg); }; });

    auto* an = app.add_subcommand("analyze", "metrics by lexical overlap and document length");
    an->add_option("--corpus", o.corpus, "corpus JSONL");
    an->add_option("--pairs", o.pairs, "pair TSV");
    an->add_option("--sys", o.sys, "system cluster JSONL");
    an->add_option("--out", o.out, "report JSON");
    an->callback([&] { action = [&] { return cmd_analyze(o, cfg); }; });

    auto* ab = app.add_subcommand("ablate", "re-score with rhetorical relations removed");
    inputs(ab);
    ab->add_option("--model", o.model, "checkpoint");
    ab->add_option("--out", o.out, "report JSON");
    ab->callback([&] { action = [&] { return cmd_ablate(o, cfg); }; });

    auto* bl = app.add_subcommand("baseline-lemma", "head-lemma baseline");
    bl->add_option("--corpus", o.corpus, "corpus JSONL");
    bl->add_option("--pairs", o.pairs, "pair TSV");
    bl->add_option("--scores", o.scores, "score TSV to write");
    bl->add_option("--clusters", o.clusters, "cluster JSONL to write");
    bl->add_option("--out", o.out, "report JSON");
    bl->callback([&] { action = [&] { return cmd_baseline_lemma(o, cfg); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }

    return run_guarded([&] {
        if (!o.config_path.empty()) cfg = PipelineConfig::load(o.config_path);
        if (o.workers) cfg.workers = *o.workers;
        if (o.within_topic) cfg.within_topic = true;
        if (!o.hash_embed.empty()) cfg.hash_embed = parse_hash_embed(o.hash_embed);
        cfg.validate();
        return action();
    });
}

}  // namespace diec::cli
