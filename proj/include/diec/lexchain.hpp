#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "diec/corpus.hpp"
#include "diec/discourse.hpp"

namespace diec {

enum class ChainKind { repetition, synonym, semantic_proximity, temporal };

std::string_view to_string(ChainKind k);

struct WordOccurrence {
    std::string doc_id;
    int token_index = 0;
    std::string surface;
    std::string lemma;

    bool operator==(const WordOccurrence&) const = default;
};

struct LexicalChain {
    int chain_id = 0;
    ChainKind kind = ChainKind::repetition;
    std::string key;  // lemma, group index or temporal entry that formed the chain
    std::vector<WordOccurrence> occurrences;
};

/// Relation groups backing the chain kinds. Lookups are case-normalized.
///
/// Temporal entries are lemmas, space-separated lemma sequences
/// ("four years later"), or the pattern `<year>` matching 4-digit years
/// 1000-2999.
class Lexicon {
public:
    Lexicon() = default;
    Lexicon(std::vector<std::vector<std::string>> synonyms,
            std::vector<std::vector<std::string>> proximity, std::vector<std::string> temporal);

    static Lexicon from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Group index of `lemma`, or -1.
    int synonym_group(std::string_view lemma) const;
    int proximity_group(std::string_view lemma) const;

    const std::vector<std::vector<std::string>>& synonyms() const { return synonyms_; }
    const std::vector<std::vector<std::string>>& proximity() const { return proximity_; }
    /// Temporal entries, each split into lower-cased lemma sequences.
    const std::vector<std::vector<std::string>>& temporal() const { return temporal_; }

private:
    std::vector<std::vector<std::string>> synonyms_;
    std::vector<std::vector<std::string>> proximity_;
    std::vector<std::vector<std::string>> temporal_;
    std::unordered_map<std::string, int> synonym_index_;
    std::unordered_map<std::string, int> proximity_index_;
};

Lexicon load_lexicon(const std::filesystem::path& path);

using Stoplist = std::unordered_set<std::string>;

Stoplist load_stoplist(const std::filesystem::path& path);
Stoplist parse_stoplist(std::istream& in);

/// Cross-document lexical chains over a document pair.
///
/// Each token joins at most one chain; kinds are claimed in the order
/// repetition, synonym, semantic_proximity, temporal. Stoplisted lemmas never
/// join a chain. When both arguments are the same document, chains are built
/// within it. Chains are numbered in (kind, key) order so the result does not
/// depend on which document comes first.
std::vector<LexicalChain> build_chains(const Document& doc_a, const Document& doc_b,
                                       const Lexicon& lexicon, const Stoplist& stoplist);

/// One node per occurrence, consecutive occurrences joined in both
/// directions. Node ids follow chain order then occurrence order.
GraphFragment chains_to_graph(const std::vector<LexicalChain>& chains);

}  // namespace diec
