#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "diec/corpus.hpp"

namespace fixtures {

inline diec::Document doc(const std::string& id, const std::vector<std::string>& words,
                          const std::string& topic = "t0", const std::string& subtopic = "") {
    diec::Document d;
    d.doc_id = id;
    d.topic_id = topic;
    if (!subtopic.empty()) d.subtopic_id = subtopic;
    d.language = "en";
    for (std::size_t i = 0; i < words.size(); ++i)
        d.tokens.push_back({static_cast<int>(i), words[i], diec::to_lower(words[i])});
    return d;
}

inline diec::EventMention mention(const std::string& id, const std::string& doc_id, int start, int end,
                                  const std::string& head, std::int64_t cluster) {
    diec::EventMention m;
    m.mention_id = id;
    m.doc_id = doc_id;
    m.span = {start, end};
    m.head_lemma = head;
    m.gold_cluster = cluster;
    return m;
}

/// One single-token document per mention; clusters[i] is the gold cluster of mention i.
inline diec::Corpus one_doc_per_mention(const std::vector<std::int64_t>& clusters,
                                        const std::vector<std::string>& subtopics = {}) {
    diec::Corpus c;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const std::string id = "m" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        c.add_document(doc("d" + id, {"w" + std::to_string(i)}, "t0",
                           subtopics.empty() ? "" : subtopics[i]));
        c.add_mention(mention(id, "d" + id, 0, 0, "h" + std::to_string(clusters[i]), clusters[i]));
    }
    return c;
}

inline diec::Corpus parse(const std::string& text) {
    std::istringstream in(text);
    return diec::parse_corpus(in);
}

}  // namespace fixtures
