#include "diec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diec/error.hpp"
#include "diec/rng.hpp"

namespace diec {

using json = nlohmann::json;

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return c < 128 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Corpus

void Corpus::add_document(Document doc) {
    if (doc.doc_id.empty()) throw DataError("document with empty doc_id");
    if (doc.tokens.empty()) throw DataError("document " + doc.doc_id + " has no tokens");
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        if (doc.tokens[i].index != static_cast<int>(i))
            throw DataError("document " + doc.doc_id + ": token indices must be 0..n-1 in order");
        if (doc.tokens[i].surface.empty())
            throw DataError("document " + doc.doc_id + ": empty token surface at " +
                            std::to_string(i));
    }
    if (auto it = doc_index_.find(doc.doc_id); it != doc_index_.end()) {
        if (!(documents_[it->second] == doc))
            throw DataError("document " + doc.doc_id + " repeated with different content");
        return;
    }
    doc_index_.emplace(doc.doc_id, documents_.size());
    documents_.push_back(std::move(doc));
}

void Corpus::add_mention(EventMention m) {
    if (m.mention_id.empty()) throw DataError("mention with empty mention_id");
    if (mention_index_.count(m.mention_id))
        throw DataError("duplicate mention_id " + m.mention_id);
    auto it = doc_index_.find(m.doc_id);
    if (it == doc_index_.end())
        throw DataError("mention " + m.mention_id + " references unknown doc_id " + m.doc_id);
    const Document& doc = documents_[it->second];
    if (m.span.start < 0 || m.span.start > m.span.end || m.span.end >= doc.size())
        throw DataError("mention " + m.mention_id + " span [" + std::to_string(m.span.start) +
                        ", " + std::to_string(m.span.end) + "] out of range for document " +
                        m.doc_id + " with " + std::to_string(doc.size()) + " tokens");
    if (m.head_lemma.empty()) throw DataError("mention " + m.mention_id + " has empty head_lemma");
    mention_index_.emplace(m.mention_id, mentions_.size());
    mentions_.push_back(std::move(m));
}

bool Corpus::has_document(std::string_view doc_id) const {
    return doc_index_.count(std::string(doc_id)) > 0;
}

const Document& Corpus::document(std::string_view doc_id) const {
    auto it = doc_index_.find(std::string(doc_id));
    if (it == doc_index_.end()) throw DataError("unknown doc_id " + std::string(doc_id));
    return documents_[it->second];
}

const EventMention& Corpus::mention(std::string_view mention_id) const {
    auto it = mention_index_.find(std::string(mention_id));
    if (it == mention_index_.end()) throw DataError("unknown mention_id " + std::string(mention_id));
    return mentions_[it->second];
}

std::optional<std::size_t> Corpus::mention_index(std::string_view mention_id) const {
    auto it = mention_index_.find(std::string(mention_id));
    if (it == mention_index_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::optional<std::string> optional_string(const json& rec, const char* key) {
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

void parse_record(Corpus& corpus, const json& rec) {
    if (!rec.is_object()) throw DataError("record is not a JSON object");
    const auto doc_id = rec.at("doc_id").get<std::string>();

    if (rec.contains("tokens")) {
        Document doc;
        doc.doc_id = doc_id;
        doc.topic_id = optional_string(rec, "topic_id");
        doc.subtopic_id = optional_string(rec, "subtopic_id");
        doc.language = rec.value("language", std::string());
        int idx = 0;
        for (const auto& t : rec.at("tokens")) {
            Token tok;
            tok.index = idx++;
            if (t.is_string()) {
                tok.surface = t.get<std::string>();
                tok.lemma = to_lower(tok.surface);
            } else {
                tok.surface = t.at("surface").get<std::string>();
                tok.lemma = t.contains("lemma") ? t.at("lemma").get<std::string>()
                                                : to_lower(tok.surface);
            }
            doc.tokens.push_back(std::move(tok));
        }
        corpus.add_document(std::move(doc));
    } else if (!corpus.has_document(doc_id)) {
        throw DataError("dangling doc_id " + doc_id + " (no tokens given and not seen before)");
    }

    EventMention m;
    m.mention_id = rec.at("mention_id").get<std::string>();
    m.doc_id = doc_id;
    const auto& span = rec.at("span");
    if (!span.is_array() || span.size() != 2) throw DataError("span must be [start, end]");
    m.span = {span[0].get<int>(), span[1].get<int>()};
    m.head_lemma = rec.at("head_lemma").get<std::string>();
    m.gold_cluster = rec.at("gold_cluster").get<std::int64_t>();
    m.event_type = optional_string(rec, "event_type");
    corpus.add_mention(std::move(m));
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace

Corpus parse_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            parse_record(corpus, json::parse(line));
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const DataError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_corpus(in);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& m : corpus.mentions()) {
        const Document& doc = corpus.document(m.doc_id);
        json rec;
        rec["mention_id"] = m.mention_id;
        rec["doc_id"] = m.doc_id;
        if (doc.topic_id) rec["topic_id"] = *doc.topic_id;
        if (doc.subtopic_id) rec["subtopic_id"] = *doc.subtopic_id;
        if (!doc.language.empty()) rec["language"] = doc.language;
        json tokens = json::array();
        for (const auto& t : doc.tokens) tokens.push_back({{"surface", t.surface}, {"lemma", t.lemma}});
        rec["tokens"] = std::move(tokens);
        rec["span"] = {m.span.start, m.span.end};
        rec["head_lemma"] = m.head_lemma;
        rec["gold_cluster"] = m.gold_cluster;
        if (m.event_type) rec["event_type"] = *m.event_type;
        out << rec.dump() << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_corpus(corpus, out);
}

// ---------------------------------------------------------------------------
// Embeddings

void EmbeddingTable::set(const std::string& doc_id, Eigen::MatrixXd vectors) {
    if (dim_ <= 0) dim_ = static_cast<int>(vectors.cols());
    if (vectors.cols() != dim_)
        throw DataError("embedding dimension mismatch for " + doc_id + ": expected " +
                        std::to_string(dim_) + ", got " + std::to_string(vectors.cols()));
    if (!vectors.allFinite()) throw DataError("non-finite embedding for document " + doc_id);
    table_[doc_id] = std::move(vectors);
}

bool EmbeddingTable::covers(std::string_view doc_id) const {
    return table_.count(std::string(doc_id)) > 0;
}

const Eigen::MatrixXd& EmbeddingTable::vectors(std::string_view doc_id) const {
    auto it = table_.find(std::string(doc_id));
    if (it == table_.end()) throw DataError("no embeddings for document " + std::string(doc_id));
    return it->second;
}

void EmbeddingTable::check_covers(const Corpus& corpus) const {
    for (const auto& doc : corpus.documents()) {
        const auto& v = vectors(doc.doc_id);
        if (v.rows() != doc.size())
            throw DataError("document " + doc.doc_id + " has " + std::to_string(doc.size()) +
                            " tokens but " + std::to_string(v.rows()) + " vectors");
    }
}

Eigen::VectorXd hash_embed(const Token& token, std::uint64_t seed, int dim) {
    Rng rng(hash_string(token.surface, seed));
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    if (norm > 0.0) {
        v /= norm;
    } else {
        v.setZero();
        v[0] = 1.0;
    }
    return v;
}

EmbeddingTable hash_embed_corpus(const Corpus& corpus, std::uint64_t seed, int dim) {
    EmbeddingTable table(dim);
    for (const auto& doc : corpus.documents()) {
        Eigen::MatrixXd m(doc.size(), dim);
        for (const auto& t : doc.tokens) m.row(t.index) = hash_embed(t, seed, dim).transpose();
        table.set(doc.doc_id, std::move(m));
    }
    return table;
}

EmbeddingTable parse_embeddings(std::istream& in) {
    EmbeddingTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto rec = json::parse(line);
            const auto doc_id = rec.at("doc_id").get<std::string>();
            const auto& rows = rec.at("vectors");
            if (rows.empty()) throw DataError("document " + doc_id + " has no vectors");
            const auto cols = rows[0].size();
            Eigen::MatrixXd m(rows.size(), cols);
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != cols) throw DataError("ragged vectors for " + doc_id);
                for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c].get<double>();
            }
            table.set(doc_id, std::move(m));
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const DataError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_embeddings(in);
}

void write_embeddings(const EmbeddingTable& table, const Corpus& corpus, std::ostream& out) {
    for (const auto& doc : corpus.documents()) {
        if (!table.covers(doc.doc_id)) continue;
        const auto& m = table.vectors(doc.doc_id);
        json rows = json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
        }
        out << json{{"doc_id", doc.doc_id}, {"vectors", std::move(rows)}}.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Pairs

MentionPair make_pair(std::string a, std::string b, std::optional<bool> label) {
    if (a == b) throw DataError("mention pair of " + a + " with itself");
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b), label};
}

PairMode parse_pair_mode(std::string_view name) {
    if (name == "wec_train") return PairMode::wec_train;
    if (name == "wec_eval") return PairMode::wec_eval;
    if (name == "ecb_subtopic") return PairMode::ecb_subtopic;
    throw ConfigError("unknown pair mode " + std::string(name));
}

std::string_view to_string(PairMode mode) {
    switch (mode) {
        case PairMode::wec_train: return "wec_train";
        case PairMode::wec_eval: return "wec_eval";
        case PairMode::ecb_subtopic: return "ecb_subtopic";
    }
    return "?";
}

std::vector<MentionPair> generate_pairs(const Corpus& corpus, PairMode mode, int neg_ratio,
                                        std::uint64_t seed) {
    if (mode == PairMode::wec_train && neg_ratio < 1)
        throw ConfigError("neg_ratio must be >= 1");

    std::vector<const EventMention*> ms;
    for (const auto& m : corpus.mentions()) ms.push_back(&m);
    std::sort(ms.begin(), ms.end(),
              [](const auto* x, const auto* y) { return x->mention_id < y->mention_id; });

    if (mode == PairMode::ecb_subtopic) {
        for (const auto* m : ms)
            if (!corpus.document(m->doc_id).subtopic_id)
                throw DataError("ecb_subtopic pairing requires subtopic ids; document " +
                                m->doc_id + " has none");
    }

    std::vector<MentionPair> positives;
    std::vector<MentionPair> negatives;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        for (std::size_t j = i + 1; j < ms.size(); ++j) {
            const bool same = ms[i]->gold_cluster == ms[j]->gold_cluster;
            MentionPair p{ms[i]->mention_id, ms[j]->mention_id, same};
            if (same) {
                positives.push_back(std::move(p));
                continue;
            }
            if (mode == PairMode::ecb_subtopic &&
                corpus.document(ms[i]->doc_id).subtopic_id !=
                    corpus.document(ms[j]->doc_id).subtopic_id)
                continue;
            negatives.push_back(std::move(p));
        }
    }

    if (mode == PairMode::wec_train) {
        // candidates are already in lexicographic order
        const std::size_t want = std::min(negatives.size(),
                                          static_cast<std::size_t>(neg_ratio) * positives.size());
        Rng rng(seed);
        rng.shuffle(negatives);
        negatives.resize(want);
    }

    std::vector<MentionPair> out = std::move(positives);
    out.insert(out.end(), std::make_move_iterator(negatives.begin()),
               std::make_move_iterator(negatives.end()));
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.mention_a, x.mention_b) < std::tie(y.mention_a, y.mention_b);
    });
    return out;
}

std::vector<MentionPair> parse_pairs(std::istream& in) {
    std::vector<MentionPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string a, b, label;
        if (!(fields >> a >> b)) throw ParseError("expected mention_a<TAB>mention_b[<TAB>label]", line_no);
        fields >> label;
        std::optional<bool> lab;
        if (label == "1") {
            lab = true;
        } else if (label == "0") {
            lab = false;
        } else if (!label.empty() && label != "-") {
            throw ParseError("label must be 0, 1 or -", line_no);
        }
        try {
            pairs.push_back(make_pair(a, b, lab));
        } catch (const DataError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return pairs;
}

std::vector<MentionPair> load_pairs(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_pairs(in);
}

void write_pairs(const std::vector<MentionPair>& pairs, std::ostream& out) {
    for (const auto& p : pairs) {
        out << p.mention_a << '\t' << p.mention_b << '\t'
            << (p.label ? (*p.label ? "1" : "0") : "-") << '\n';
    }
}

}  // namespace diec
