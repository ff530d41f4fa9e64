#include "diec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "diec/discourse.hpp"
#include "diec/error.hpp"
#include "diec/rng.hpp"

namespace diec {

using json = nlohmann::json;

namespace {

struct Layout {
    int shared = 0;   // cluster block
    int privates = 0; // per document
};

Layout layout_for(const SynthConfig& c) {
    Layout l;
    const int target = static_cast<int>(std::lround(c.overlap_rate_target * c.doc_length));
    // the year token and (most of the time) the head are shared within a cluster too
    l.shared = std::max(0, target - c.topic_words - 2);
    l.privates = c.doc_length - l.shared - c.topic_words - 2;
    if (l.privates < 0)
        throw ConfigError("doc_length " + std::to_string(c.doc_length) +
                          " too short for topic_words " + std::to_string(c.topic_words) +
                          " and overlap_rate_target " + std::to_string(c.overlap_rate_target));
    const double floor_rate = static_cast<double>(c.topic_words + 2) / c.doc_length;
    if (floor_rate > c.overlap_rate_target + 0.1)
        throw ConfigError("overlap_rate_target " + std::to_string(c.overlap_rate_target) +
                          " unreachable: topic words alone give " + std::to_string(floor_rate));
    return l;
}

class WordSource {
public:
    WordSource(int vocab_size, Rng& rng) : order_(static_cast<std::size_t>(vocab_size)) {
        for (int i = 0; i < vocab_size; ++i) order_[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order_);
        width_ = static_cast<int>(std::to_string(std::max(vocab_size - 1, 0)).size());
    }

    std::string take() {
        if (next_ >= order_.size()) throw ConfigError("vocabulary exhausted");
        char buf[32];
        std::snprintf(buf, sizeof buf, "w%0*d", width_, order_[next_++]);
        return buf;
    }

    std::vector<std::string> take(int n) {
        std::vector<std::string> out;
        for (int i = 0; i < n; ++i) out.push_back(take());
        return out;
    }

private:
    std::vector<int> order_;
    std::size_t next_ = 0;
    int width_ = 1;
};

std::vector<int> edu_sizes(int n, Rng& rng) {
    std::vector<int> sizes;
    while (n > 0) {
        int s = n <= 7 ? n : 3 + static_cast<int>(rng.below(5));
        if (n > 7 && n - s < 3) s = n - 3;
        sizes.push_back(s);
        n -= s;
    }
    return sizes;
}

void write_tree(const std::vector<std::pair<int, int>>& edus, std::size_t lo, std::size_t hi,
                Rng& rng, std::string& out) {
    if (lo == hi) {
        out += std::to_string(edus[lo].first) + " " + std::to_string(edus[lo].second);
        return;
    }
    const std::size_t split = lo + static_cast<std::size_t>(rng.below(hi - lo));
    const Relation rel = kAllRelations[static_cast<std::size_t>(rng.below(kAllRelations.size()))];
    const double u = rng.uniform();
    const char* left = u < 0.3 ? "N" : (u < 0.65 ? "N" : "S");
    const char* right = u < 0.3 ? "N" : (u < 0.65 ? "S" : "N");
    out += "(";
    out += to_string(rel);
    out += " (";
    out += left;
    out += " ";
    write_tree(edus, lo, split, rng, out);
    out += ") (";
    out += right;
    out += " ";
    write_tree(edus, split + 1, hi, rng, out);
    out += "))";
}

std::string random_tree(int tokens, Rng& rng) {
    const auto sizes = edu_sizes(tokens, rng);
    std::vector<std::pair<int, int>> edus;
    int start = 0;
    for (int s : sizes) {
        edus.emplace_back(start, start + s - 1);
        start += s;
    }
    std::string out;
    if (edus.size() == 1) return "(N 0 " + std::to_string(tokens - 1) + ")";
    write_tree(edus, 0, edus.size() - 1, rng, out);
    return out;
}

std::string two_digit(const char* prefix, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
    return buf;
}

}  // namespace

void SynthConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
    };
    positive(num_topics, "num_topics");
    positive(clusters_per_topic, "clusters_per_topic");
    positive(mentions_per_cluster, "mentions_per_cluster");
    positive(doc_length, "doc_length");
    positive(vocab_size, "vocab_size");
    positive(embedding_dim, "embedding_dim");
    if (topic_words < 0) throw ConfigError("topic_words must be >= 0");
    if (argument_words < 0) throw ConfigError("argument_words must be >= 0");
    if (docs != 0 && docs != total_mentions())
        throw ConfigError("docs must be 0 or the mention count " + std::to_string(total_mentions()) +
                          " (one document per mention)");
    if (!(overlap_rate_target >= 0.0 && overlap_rate_target <= 1.0))
        throw ConfigError("overlap_rate_target must lie in [0, 1]");
    if (!(synonym_head_rate >= 0.0 && ambiguous_head_rate >= 0.0 &&
          synonym_head_rate + ambiguous_head_rate <= 1.0))
        throw ConfigError("head rates must be non-negative and sum to at most 1");
    const Layout l = layout_for(*this);
    if (argument_words > l.shared)
        throw ConfigError("argument_words " + std::to_string(argument_words) +
                          " exceeds the shared cluster block of " + std::to_string(l.shared) + " words");
    const long clusters = static_cast<long>(num_topics) * clusters_per_topic;
    const long needed = static_cast<long>(num_topics) * (topic_words + 1) + clusters * (2 + l.shared) +
                        static_cast<long>(total_mentions()) * l.privates;
    if (needed > vocab_size)
        throw ConfigError("vocab_size " + std::to_string(vocab_size) + " too small: config needs " +
                          std::to_string(needed) + " distinct words");
    if (clusters > 1000) throw ConfigError("at most 1000 clusters (one year token each)");
}

json SynthConfig::to_json() const {
    return {{"num_topics", num_topics},
            {"clusters_per_topic", clusters_per_topic},
            {"mentions_per_cluster", mentions_per_cluster},
            {"docs", docs},
            {"doc_length", doc_length},
            {"vocab_size", vocab_size},
            {"overlap_rate_target", overlap_rate_target},
            {"seed", seed},
            {"embedding_dim", embedding_dim},
            {"topic_words", topic_words},
            {"argument_words", argument_words},
            {"synonym_head_rate", synonym_head_rate},
            {"ambiguous_head_rate", ambiguous_head_rate}};
}

SynthConfig SynthConfig::from_json(const json& j) {
    SynthConfig c;
    if (!j.is_object()) throw ConfigError("synthetic config must be an object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "num_topics") c.num_topics = value.get<int>();
            else if (key == "clusters_per_topic") c.clusters_per_topic = value.get<int>();
            else if (key == "mentions_per_cluster") c.mentions_per_cluster = value.get<int>();
            else if (key == "docs") c.docs = value.get<int>();
            else if (key == "doc_length") c.doc_length = value.get<int>();
            else if (key == "vocab_size") c.vocab_size = value.get<int>();
            else if (key == "overlap_rate_target") c.overlap_rate_target = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "embedding_dim") c.embedding_dim = value.get<int>();
            else if (key == "topic_words") c.topic_words = value.get<int>();
            else if (key == "argument_words") c.argument_words = value.get<int>();
            else if (key == "synonym_head_rate") c.synonym_head_rate = value.get<double>();
            else if (key == "ambiguous_head_rate") c.ambiguous_head_rate = value.get<double>();
            else throw ConfigError("unknown synthetic config key " + key);
        } catch (const json::exception& e) {
            throw ConfigError("synthetic config key " + key + ": " + e.what());
        }
    }
    return c;
}

SynthData generate_synthetic(const SynthConfig& config) {
    config.validate();
    const Layout layout = layout_for(config);
    Rng rng(config.seed);
    WordSource words(config.vocab_size, rng);

    SynthData out;
    std::vector<std::vector<std::string>> synonym_groups;
    std::vector<std::vector<std::string>> proximity_groups;

    int cluster_index = 0;
    for (int t = 0; t < config.num_topics; ++t) {
        const std::string topic = two_digit("t", t);
        const auto topic_pool = words.take(config.topic_words);
        const std::string generic_head = words.take();
        if (topic_pool.size() >= 2) proximity_groups.push_back(topic_pool);

        for (int c = 0; c < config.clusters_per_topic; ++c, ++cluster_index) {
            const std::string primary = words.take();
            const std::string secondary = words.take();
            synonym_groups.push_back({primary, secondary});
            const auto block = words.take(layout.shared);
            const std::string year = std::to_string(1900 + cluster_index);
            const std::string subtopic = topic + "-" + std::to_string(c / 2);

            for (int m = 0; m < config.mentions_per_cluster; ++m) {
                const double u = rng.uniform();
                const std::string& head =
                    u < config.ambiguous_head_rate
                        ? generic_head
                        : (u < config.ambiguous_head_rate + config.synonym_head_rate ? secondary
                                                                                     : primary);
                // mention phrase: first half of the arguments, head, the rest
                const auto args_end = block.begin() + config.argument_words;
                const auto args_mid = block.begin() + config.argument_words / 2;
                std::vector<std::string> phrase(block.begin(), args_mid);
                phrase.push_back(head);
                phrase.insert(phrase.end(), args_mid, args_end);

                std::vector<std::string> types(args_end, block.end());
                types.insert(types.end(), topic_pool.begin(), topic_pool.end());
                types.push_back(year);
                for (int p = 0; p < layout.privates; ++p) types.push_back(words.take());
                rng.shuffle(types);
                const std::size_t at = static_cast<std::size_t>(rng.below(types.size() + 1));
                types.insert(types.begin() + static_cast<std::ptrdiff_t>(at), phrase.begin(), phrase.end());

                Document doc;
                doc.doc_id = topic + two_digit("_c", c) + two_digit("_d", m);
                doc.topic_id = topic;
                doc.subtopic_id = subtopic;
                doc.language = "syn";
                for (std::size_t i = 0; i < types.size(); ++i)
                    doc.tokens.push_back({static_cast<int>(i), types[i], types[i]});
                const int start = static_cast<int>(at);
                out.rst[doc.doc_id] = random_tree(doc.size(), rng);

                EventMention mention;
                mention.mention_id = topic + two_digit("_c", c) + two_digit("_m", m);
                mention.doc_id = doc.doc_id;
                mention.span = {start, start + static_cast<int>(phrase.size()) - 1};
                mention.head_lemma = head;
                mention.gold_cluster = cluster_index;
                mention.event_type = "synthetic";
                out.corpus.add_document(std::move(doc));
                out.corpus.add_mention(std::move(mention));
            }
        }
    }

    out.lexicon = Lexicon(synonym_groups, proximity_groups, {"<year>", "later", "earlier"});
    out.stoplist = {"the", "a", "of"};
    out.embeddings = hash_embed_corpus(out.corpus, config.seed, config.embedding_dim);
    return out;
}

CorpusSplit split_by_topic(const Corpus& corpus, int test_topics) {
    std::set<std::string> topics;
    for (const auto& d : corpus.documents()) topics.insert(d.topic_id.value_or(""));
    if (test_topics < 1 || test_topics >= static_cast<int>(topics.size()))
        throw ConfigError("test_topics must lie in [1, " + std::to_string(topics.size() - 1) + "]");
    std::set<std::string> test(std::prev(topics.end(), test_topics), topics.end());
    auto in_test = [&](const EventMention& m) {
        return test.count(corpus.document(m.doc_id).topic_id.value_or("")) > 0;
    };
    CorpusSplit split;
    split.train = filter_corpus(corpus, [&](const EventMention& m) { return !in_test(m); });
    split.test = filter_corpus(corpus, in_test);
    return split;
}

}  // namespace diec
