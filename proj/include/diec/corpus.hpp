#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace diec {

/// ASCII lower-casing; bytes outside ASCII pass through unchanged.
std::string to_lower(std::string_view text);

struct Token {
    int index = 0;
    std::string surface;
    std::string lemma;

    bool operator==(const Token&) const = default;
};

struct Document {
    std::string doc_id;
    std::optional<std::string> topic_id;
    std::optional<std::string> subtopic_id;
    std::vector<Token> tokens;
    std::string language;

    int size() const { return static_cast<int>(tokens.size()); }
    bool operator==(const Document&) const = default;
};

/// Inclusive token range.
struct TokenSpan {
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
    bool contains(int token) const { return start <= token && token <= end; }
    bool operator==(const TokenSpan&) const = default;
};

struct EventMention {
    std::string mention_id;
    std::string doc_id;
    TokenSpan span;
    std::string head_lemma;
    std::int64_t gold_cluster = 0;
    std::optional<std::string> event_type;

    bool operator==(const EventMention&) const = default;
};

/// Documents plus their annotated mentions. Validated on insertion, read-only
/// afterwards.
class Corpus {
public:
    /// Registers a document; a repeated doc_id must carry identical content.
    void add_document(Document doc);
    /// Registers a mention; its document must already exist.
    void add_mention(EventMention mention);

    const std::vector<Document>& documents() const { return documents_; }
    const std::vector<EventMention>& mentions() const { return mentions_; }

    bool has_document(std::string_view doc_id) const;
    const Document& document(std::string_view doc_id) const;
    const EventMention& mention(std::string_view mention_id) const;
    std::optional<std::size_t> mention_index(std::string_view mention_id) const;
    const Document& document_of(const EventMention& m) const { return document(m.doc_id); }

    bool operator==(const Corpus& other) const {
        return documents_ == other.documents_ && mentions_ == other.mentions_;
    }

private:
    std::vector<Document> documents_;
    std::vector<EventMention> mentions_;
    std::unordered_map<std::string, std::size_t> doc_index_;
    std::unordered_map<std::string, std::size_t> mention_index_;
};

Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Sub-corpus with only the mentions (and their documents) accepted by `keep`.
template <class Pred>
Corpus filter_corpus(const Corpus& corpus, Pred keep) {
    Corpus out;
    for (const auto& m : corpus.mentions()) {
        if (!keep(m)) continue;
        if (!out.has_document(m.doc_id)) out.add_document(corpus.document(m.doc_id));
        out.add_mention(m);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Embeddings

/// Per-document token vectors, one row per token.
class EmbeddingTable {
public:
    explicit EmbeddingTable(int dim = 0) : dim_(dim) {}

    int dim() const { return dim_; }
    void set(const std::string& doc_id, Eigen::MatrixXd vectors);
    bool covers(std::string_view doc_id) const;
    const Eigen::MatrixXd& vectors(std::string_view doc_id) const;
    const std::unordered_map<std::string, Eigen::MatrixXd>& all() const { return table_; }

    /// Throws DataError unless every token of every document has a vector.
    void check_covers(const Corpus& corpus) const;

private:
    int dim_;
    std::unordered_map<std::string, Eigen::MatrixXd> table_;
};

/// Deterministic unit-norm stand-in for a contextual encoder.
Eigen::VectorXd hash_embed(const Token& token, std::uint64_t seed, int dim);
EmbeddingTable hash_embed_corpus(const Corpus& corpus, std::uint64_t seed, int dim);

EmbeddingTable parse_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);
/// Documents are written in corpus order so output is reproducible.
void write_embeddings(const EmbeddingTable& table, const Corpus& corpus, std::ostream& out);

// ---------------------------------------------------------------------------
// Mention pairs

struct MentionPair {
    std::string mention_a;
    std::string mention_b;
    std::optional<bool> label;

    bool operator==(const MentionPair&) const = default;
};

/// Canonical (a < b) ordering by mention id.
MentionPair make_pair(std::string a, std::string b, std::optional<bool> label = std::nullopt);

enum class PairMode { wec_train, wec_eval, ecb_subtopic };

PairMode parse_pair_mode(std::string_view name);
std::string_view to_string(PairMode mode);

/// Labeled mention pairs sorted by (mention_a, mention_b).
std::vector<MentionPair> generate_pairs(const Corpus& corpus, PairMode mode, int neg_ratio,
                                        std::uint64_t seed);

std::vector<MentionPair> parse_pairs(std::istream& in);
std::vector<MentionPair> load_pairs(const std::filesystem::path& path);
void write_pairs(const std::vector<MentionPair>& pairs, std::ostream& out);

}  // namespace diec
