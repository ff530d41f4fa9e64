#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "diec/corpus.hpp"
#include "diec/pairscorer.hpp"

namespace diec {

/// Partition of mention ids. Each cluster's ids are sorted; clusters are
/// ordered by their smallest member's position in the input universe.
struct ClusterSet {
    std::vector<std::vector<std::string>> clusters;

    std::size_t size() const { return clusters.size(); }
    /// All mention ids, sorted.
    std::vector<std::string> universe() const;
    /// Canonical form for comparing partitions: clusters sorted, ids sorted.
    std::vector<std::vector<std::string>> canonical() const;
    bool same_partition(const ClusterSet& other) const { return canonical() == other.canonical(); }
};

/// Gold partition from the corpus' gold_cluster ids (singletons included).
ClusterSet gold_clusters(const Corpus& corpus);

/// Restriction of a partition to `mentions` (empty clusters dropped).
ClusterSet restrict_to(const ClusterSet& clusters, const std::vector<std::string>& mentions);

struct ClusterConfig {
    double filter_threshold = 0.5;
    double stop_threshold = 0.7;
};

/// Group-average agglomerative clustering.
///
/// Scores below the filter threshold and pairs missing from the table count
/// as similarity 0. The two clusters with the highest mean cross-cluster
/// similarity are merged until that mean falls below the stop threshold.
/// Ties go to the smallest (id, id) pair, where singletons take ids in input
/// order and merged clusters take the next free id.
ClusterSet agglomerate(const std::vector<std::string>& mentions,
                       const std::vector<ScoredPair>& scores, const ClusterConfig& config = {});

/// Clusters each topic separately; mentions without a topic form one group.
ClusterSet agglomerate_within_topic(const Corpus& corpus, const std::vector<std::string>& mentions,
                                    const std::vector<ScoredPair>& scores,
                                    const ClusterConfig& config = {});

/// JSON Lines {cluster_id, mention_ids}.
void write_clusters(const ClusterSet& clusters, std::ostream& out);
ClusterSet parse_clusters(std::istream& in);
ClusterSet load_clusters(const std::filesystem::path& path);

}  // namespace diec
