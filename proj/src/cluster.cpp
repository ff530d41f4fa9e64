#include "diec/cluster.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "diec/error.hpp"

namespace diec {

using json = nlohmann::json;

std::vector<std::string> ClusterSet::universe() const {
    std::vector<std::string> out;
    for (const auto& c : clusters) out.insert(out.end(), c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> ClusterSet::canonical() const {
    auto out = clusters;
    for (auto& c : out) std::sort(c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

ClusterSet gold_clusters(const Corpus& corpus) {
    std::map<std::int64_t, std::size_t> slot;
    ClusterSet out;
    for (const auto& m : corpus.mentions()) {
        auto [it, inserted] = slot.emplace(m.gold_cluster, out.clusters.size());
        if (inserted) out.clusters.emplace_back();
        out.clusters[it->second].push_back(m.mention_id);
    }
    for (auto& c : out.clusters) std::sort(c.begin(), c.end());
    return out;
}

ClusterSet restrict_to(const ClusterSet& clusters, const std::vector<std::string>& mentions) {
    const std::set<std::string> keep(mentions.begin(), mentions.end());
    ClusterSet out;
    for (const auto& c : clusters.clusters) {
        std::vector<std::string> kept;
        for (const auto& m : c)
            if (keep.count(m)) kept.push_back(m);
        if (!kept.empty()) out.clusters.push_back(std::move(kept));
    }
    return out;
}

ClusterSet agglomerate(const std::vector<std::string>& mentions,
                       const std::vector<ScoredPair>& scores, const ClusterConfig& config) {
    const std::size_t n = mentions.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) {
        if (!index.emplace(mentions[i], i).second)
            throw DataError("duplicate mention " + mentions[i] + " in clustering universe");
    }

    // cross-cluster similarity sums, indexed by slot
    std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
    for (const auto& s : scores) {
        if (!(s.score >= 0.0 && s.score <= 1.0))
            throw DataError("score " + std::to_string(s.score) + " for " + s.mention_a + " " +
                            s.mention_b + " outside [0, 1]");
        auto a = index.find(s.mention_a);
        auto b = index.find(s.mention_b);
        if (a == index.end() || b == index.end() || a->second == b->second) continue;
        const double sim = s.score < config.filter_threshold ? 0.0 : s.score;
        sum[a->second][b->second] = sim;
        sum[b->second][a->second] = sim;
    }

    std::vector<std::vector<std::size_t>> members(n);
    std::vector<std::size_t> id(n);
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        members[i] = {i};
        id[i] = i;
    }
    std::size_t next_id = n;

    while (true) {
        double best = -1.0;
        std::size_t bp = n;
        std::size_t bq = n;
        std::pair<std::size_t, std::size_t> best_ids{};
        for (std::size_t p = 0; p < n; ++p) {
            if (!active[p]) continue;
            for (std::size_t q = p + 1; q < n; ++q) {
                if (!active[q]) continue;
                const double avg = sum[p][q] / static_cast<double>(members[p].size() * members[q].size());
                const std::pair<std::size_t, std::size_t> ids{std::min(id[p], id[q]), std::max(id[p], id[q])};
                if (avg > best || (avg == best && ids < best_ids)) {
                    best = avg;
                    bp = p;
                    bq = q;
                    best_ids = ids;
                }
            }
        }
        if (bp == n || best < config.stop_threshold) break;

        members[bp].insert(members[bp].end(), members[bq].begin(), members[bq].end());
        members[bq].clear();
        active[bq] = false;
        id[bp] = next_id++;
        for (std::size_t r = 0; r < n; ++r) {
            if (!active[r] || r == bp) continue;
            sum[bp][r] += sum[bq][r];
            sum[r][bp] = sum[bp][r];
        }
    }

    // order clusters by their first member in the input universe
    std::vector<std::size_t> slots;
    for (std::size_t p = 0; p < n; ++p)
        if (active[p]) {
            std::sort(members[p].begin(), members[p].end());
            slots.push_back(p);
        }
    std::sort(slots.begin(), slots.end(),
              [&](auto x, auto y) { return members[x].front() < members[y].front(); });
    ClusterSet out;
    for (auto p : slots) {
        std::vector<std::string> ids;
        for (auto i : members[p]) ids.push_back(mentions[i]);
        std::sort(ids.begin(), ids.end());
        out.clusters.push_back(std::move(ids));
    }
    return out;
}

ClusterSet agglomerate_within_topic(const Corpus& corpus, const std::vector<std::string>& mentions,
                                    const std::vector<ScoredPair>& scores,
                                    const ClusterConfig& config) {
    std::map<std::string, std::vector<std::string>> by_topic;
    for (const auto& m : mentions) {
        const auto& doc = corpus.document(corpus.mention(m).doc_id);
        by_topic[doc.topic_id.value_or("")].push_back(m);
    }
    ClusterSet out;
    for (const auto& [topic, ms] : by_topic) {
        auto part = agglomerate(ms, scores, config);
        out.clusters.insert(out.clusters.end(), part.clusters.begin(), part.clusters.end());
    }
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < mentions.size(); ++i) pos[mentions[i]] = i;
    auto first = [&](const std::vector<std::string>& c) {
        std::size_t best = mentions.size();
        for (const auto& m : c) best = std::min(best, pos[m]);
        return best;
    };
    std::sort(out.clusters.begin(), out.clusters.end(),
              [&](const auto& x, const auto& y) { return first(x) < first(y); });
    return out;
}

void write_clusters(const ClusterSet& clusters, std::ostream& out) {
    for (std::size_t i = 0; i < clusters.clusters.size(); ++i) {
        auto ids = clusters.clusters[i];
        std::sort(ids.begin(), ids.end());
        out << json{{"cluster_id", i}, {"mention_ids", ids}}.dump() << '\n';
    }
}

ClusterSet parse_clusters(std::istream& in) {
    ClusterSet out;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto rec = json::parse(line);
            auto ids = rec.at("mention_ids").get<std::vector<std::string>>();
            if (ids.empty()) throw DataError("empty cluster");
            for (const auto& m : ids)
                if (!seen.insert(m).second) throw DataError("mention " + m + " in two clusters");
            std::sort(ids.begin(), ids.end());
            out.clusters.push_back(std::move(ids));
        } catch (const json::exception& e) {
            throw ParseError(e.what(), line_no);
        } catch (const DataError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return out;
}

ClusterSet load_clusters(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_clusters(in);
}

}  // namespace diec
