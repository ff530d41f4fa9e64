#include "diec/lexchain.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;

std::string_view to_string(ChainKind k) {
    switch (k) {
        case ChainKind::repetition: return "repetition";
        case ChainKind::synonym: return "synonym";
        case ChainKind::semantic_proximity: return "semantic_proximity";
        case ChainKind::temporal: return "temporal";
    }
    return "?";
}

namespace {

std::vector<std::vector<std::string>> normalize_groups(std::vector<std::vector<std::string>> groups,
                                                       std::unordered_map<std::string, int>& index,
                                                       const char* category) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (auto& lemma : groups[g]) {
            lemma = to_lower(lemma);
            auto [it, inserted] = index.emplace(lemma, static_cast<int>(g));
            if (!inserted && it->second != static_cast<int>(g))
                throw DataError(std::string("lexicon ") + category + " groups overlap on '" +
                                lemma + "'");
        }
    }
    return groups;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::istringstream in{std::string(text)};
    std::string w;
    while (in >> w) out.push_back(to_lower(w));
    return out;
}

bool is_year(std::string_view s) {
    return s.size() == 4 && (s[0] == '1' || s[0] == '2') &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr std::string_view kYearPattern = "<year>";

struct Slot {
    const Document* doc;
    int side;  // 0 = first document, 1 = second
    int token;
    std::string lemma;
};

class ChainBuilder {
public:
    ChainBuilder(const Document& a, const Document& b, const Stoplist& stop)
        : same_doc_(a.doc_id == b.doc_id) {
        add_doc(a, 0, stop);
        if (!same_doc_) add_doc(b, 1, stop);
        claimed_.assign(slots_.size(), false);
    }

    // Groups of currently unclaimed slots by key.
    template <class KeyFn>
    std::map<std::string, std::vector<std::size_t>> group(KeyFn key) const {
        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (claimed_[i] || stopped_[i]) continue;
            auto k = key(slots_[i]);
            if (!k.empty()) groups[k].push_back(i);
        }
        return groups;
    }

    // Whether any slot on `side` (claimed or not) yields `key`.
    template <class KeyFn>
    bool side_has(int side, const std::string& k, KeyFn key) const {
        for (std::size_t i = 0; i < slots_.size(); ++i)
            if (slots_[i].side == side && !stopped_[i] && key(slots_[i]) == k) return true;
        return false;
    }

    // Decides whether a candidate group becomes a chain.
    template <class KeyFn>
    bool keep(const std::vector<std::size_t>& members, const std::string& k, KeyFn key) const {
        if (members.size() < 2) return false;
        if (same_doc_) return true;
        bool sides[2] = {false, false};
        for (auto i : members) sides[slots_[i].side] = true;
        if (sides[0] && sides[1]) return true;
        // wholly inside one document: kept only when the other document
        // still carries the same relation group
        return side_has(sides[0] ? 1 : 0, k, key);
    }

    template <class KeyFn>
    void run_kind(ChainKind kind, KeyFn key) {
        for (auto& [k, members] : group(key)) {
            if (!keep(members, k, key)) continue;
            emit(kind, k, members);
        }
    }

    void run_temporal(const Lexicon& lexicon) {
        const auto& entries = lexicon.temporal();
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const auto& entry = entries[e];
            std::vector<std::size_t> members;
            bool sides[2] = {false, false};
            bool any_match[2] = {false, false};
            for (std::size_t i = 0; i < slots_.size(); ++i) {
                if (!matches_at(entry, i, false)) continue;
                any_match[slots_[i].side] = true;
                if (!matches_at(entry, i, true)) continue;
                for (std::size_t j = 0; j < entry.size(); ++j) {
                    members.push_back(i + j);
                    claimed_tmp_.push_back(i + j);
                }
                sides[slots_[i].side] = true;
                i += entry.size() - 1;
            }
            for (auto i : claimed_tmp_) claimed_[i] = false;
            claimed_tmp_.clear();
            bool ok = members.size() >= 2;
            if (ok && !same_doc_ && !(sides[0] && sides[1]))
                ok = any_match[sides[0] ? 1 : 0];
            if (ok) {
                std::string key;
                for (const auto& w : entry) key += (key.empty() ? "" : " ") + w;
                emit(ChainKind::temporal, key, members);
            }
        }
    }

    std::vector<LexicalChain> finish() {
        std::stable_sort(chains_.begin(), chains_.end(), [](const auto& x, const auto& y) {
            return std::tie(x.kind, x.key) < std::tie(y.kind, y.key);
        });
        for (std::size_t c = 0; c < chains_.size(); ++c) chains_[c].chain_id = static_cast<int>(c);
        return std::move(chains_);
    }

    const std::vector<Slot>& slots() const { return slots_; }

private:
    void add_doc(const Document& d, int side, const Stoplist& stop) {
        for (const auto& t : d.tokens) {
            auto lemma = to_lower(t.lemma);
            stopped_.push_back(stop.count(lemma) > 0);
            slots_.push_back({&d, side, t.index, std::move(lemma)});
        }
    }

    // Entry match starting at slot i, staying inside one document. With
    // `require_free`, every covered slot must also be unclaimed.
    bool matches_at(const std::vector<std::string>& entry, std::size_t i, bool require_free) {
        if (i + entry.size() > slots_.size()) return false;
        for (std::size_t j = 0; j < entry.size(); ++j) {
            const auto& s = slots_[i + j];
            if (s.side != slots_[i].side) return false;
            if (stopped_[i + j]) return false;
            if (require_free && claimed_[i + j]) return false;
            const bool ok = entry[j] == kYearPattern
                                ? is_year(s.doc->tokens[static_cast<std::size_t>(s.token)].surface)
                                : entry[j] == s.lemma;
            if (!ok) return false;
        }
        if (require_free)
            for (std::size_t j = 0; j < entry.size(); ++j) claimed_[i + j] = true;
        return true;
    }

    void emit(ChainKind kind, const std::string& key, const std::vector<std::size_t>& members) {
        LexicalChain chain;
        chain.kind = kind;
        chain.key = key;
        auto sorted = members;
        std::sort(sorted.begin(), sorted.end());
        for (auto i : sorted) {
            claimed_[i] = true;
            const auto& s = slots_[i];
            const auto& tok = s.doc->tokens[static_cast<std::size_t>(s.token)];
            chain.occurrences.push_back({s.doc->doc_id, s.token, tok.surface, tok.lemma});
        }
        chains_.push_back(std::move(chain));
    }

    bool same_doc_;
    std::vector<Slot> slots_;
    std::vector<bool> stopped_;
    std::vector<bool> claimed_;
    std::vector<std::size_t> claimed_tmp_;
    std::vector<LexicalChain> chains_;
};

std::string group_key(int g) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06d", g);
    return buf;
}

}  // namespace

Lexicon::Lexicon(std::vector<std::vector<std::string>> synonyms,
                 std::vector<std::vector<std::string>> proximity, std::vector<std::string> temporal) {
    synonyms_ = normalize_groups(std::move(synonyms), synonym_index_, "synonym");
    proximity_ = normalize_groups(std::move(proximity), proximity_index_, "proximity");
    for (const auto& t : temporal) {
        auto words = split_words(t);
        if (words.empty()) throw DataError("empty temporal lexicon entry");
        temporal_.push_back(std::move(words));
    }
}

Lexicon Lexicon::from_json(const json& j) {
    try {
        return Lexicon(j.value("synonyms", std::vector<std::vector<std::string>>{}),
                       j.value("proximity", std::vector<std::vector<std::string>>{}),
                       j.value("temporal", std::vector<std::string>{}));
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid lexicon: ") + e.what());
    }
}

json Lexicon::to_json() const {
    std::vector<std::string> temporal;
    for (const auto& words : temporal_) {
        std::string s;
        for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
        temporal.push_back(std::move(s));
    }
    return {{"synonyms", synonyms_}, {"proximity", proximity_}, {"temporal", temporal}};
}

int Lexicon::synonym_group(std::string_view lemma) const {
    auto it = synonym_index_.find(to_lower(lemma));
    return it == synonym_index_.end() ? -1 : it->second;
}

int Lexicon::proximity_group(std::string_view lemma) const {
    auto it = proximity_index_.find(to_lower(lemma));
    return it == proximity_index_.end() ? -1 : it->second;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Lexicon::from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

Stoplist parse_stoplist(std::istream& in) {
    Stoplist stop;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        stop.insert(to_lower(line.substr(b, e - b + 1)));
    }
    return stop;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_stoplist(in);
}

std::vector<LexicalChain> build_chains(const Document& doc_a, const Document& doc_b,
                                       const Lexicon& lexicon, const Stoplist& stoplist) {
    ChainBuilder b(doc_a, doc_b, stoplist);
    b.run_kind(ChainKind::repetition, [](const Slot& s) { return s.lemma; });
    b.run_kind(ChainKind::synonym, [&](const Slot& s) {
        const int g = lexicon.synonym_group(s.lemma);
        return g < 0 ? std::string() : group_key(g);
    });
    b.run_kind(ChainKind::semantic_proximity, [&](const Slot& s) {
        const int g = lexicon.proximity_group(s.lemma);
        return g < 0 ? std::string() : group_key(g);
    });
    b.run_temporal(lexicon);
    return b.finish();
}

GraphFragment chains_to_graph(const std::vector<LexicalChain>& chains) {
    GraphFragment g;
    for (const auto& chain : chains) {
        const std::string label(to_string(chain.kind));
        int prev = -1;
        for (const auto& occ : chain.occurrences) {
            GraphNode node;
            node.id = static_cast<int>(g.nodes.size());
            node.kind = NodeKind::chain_word;
            node.doc_id = occ.doc_id;
            node.token_index = occ.token_index;
            node.chain_id = chain.chain_id;
            node.label = occ.surface;
            g.nodes.push_back(node);
            if (prev >= 0) {
                g.edges.push_back({prev, node.id, label, EdgeOrigin::chain});
                g.edges.push_back({node.id, prev, label, EdgeOrigin::chain});
            }
            prev = node.id;
        }
    }
    return g;
}

}  // namespace diec
