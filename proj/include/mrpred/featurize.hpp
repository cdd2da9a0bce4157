#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mrpred/cfg.hpp"
#include "mrpred/numerics.hpp"

namespace mrpred::featurize {

// Multiset of feature strings; identical strings from distinct nodes or
// paths aggregate their counts.
using FeatureBag = std::map<std::string, std::size_t>;

std::size_t total_count(const FeatureBag& bag);

// One `<label>-<in_degree>-<out_degree>` feature per node.
FeatureBag node_features(const cfg::ControlFlowGraph& g);

// Dash-joined label sequence of the shortest path entry->v for every node
// v != entry, and v->exit for every v outside {entry, exit}. Unweighted BFS
// distances; ties broken by declaration order of successor nodes. Nodes with
// no such path contribute nothing.
FeatureBag path_features(const cfg::ControlFlowGraph& g);

// Count-wise union of node_features and path_features.
FeatureBag extract(const cfg::ControlFlowGraph& g);

// Shortest path from -> to as node indices (inclusive); ties broken by
// declaration order of successor nodes. nullopt when unreachable.
std::optional<std::vector<std::size_t>> shortest_path(const cfg::ControlFlowGraph& g,
                                                      std::size_t from, std::size_t to);

struct FeatureVocabulary {
    std::vector<std::string> features;                 // lexicographically sorted
    std::unordered_map<std::string, std::size_t> index;

    std::size_t size() const { return features.size(); }
    std::optional<std::size_t> index_of(std::string_view f) const;
};

// Sorted union of all feature strings; errors when the union is empty.
FeatureVocabulary build_vocabulary(std::span<const FeatureBag> bags);

struct VectorizedRow {
    std::vector<double> values;
    std::size_t dropped = 0;  // features absent from the vocabulary
};

// Dense raw counts against the vocabulary; out-of-vocabulary features are
// dropped and counted in `dropped`. No scaling.
VectorizedRow vectorize(const FeatureBag& bag, const FeatureVocabulary& vocab);

struct FeatureMatrix {
    numerics::DenseMatrix values;   // methods x vocabulary
    std::vector<std::string> row_ids;
};

FeatureMatrix vectorize_all(std::span<const FeatureBag> bags,
                            std::span<const std::string> row_ids,
                            const FeatureVocabulary& vocab);

// Text format: header row of the vocabulary strings, then one
// `method_id,count,count,...` row per method.
void save_feature_matrix(std::ostream& out, const FeatureMatrix& m,
                         const FeatureVocabulary& vocab);

}  // namespace mrpred::featurize
