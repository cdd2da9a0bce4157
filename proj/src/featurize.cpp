#include "mrpred/featurize.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <ostream>
#include <set>

#include "mrpred/error.hpp"

namespace mrpred::featurize {

std::size_t total_count(const FeatureBag& bag) {
    std::size_t n = 0;
    for (const auto& [_, c] : bag) n += c;
    return n;
}

FeatureBag node_features(const cfg::ControlFlowGraph& g) {
    FeatureBag bag;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const std::string f = g.node(v).label + "-" + std::to_string(g.in_degree(v)) +
                              "-" + std::to_string(g.out_degree(v));
        ++bag[f];
    }
    return bag;
}

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

// BFS distance from every node to `target` over reversed edges.
std::vector<std::size_t> distances_to(const cfg::ControlFlowGraph& g, std::size_t target) {
    std::vector<std::size_t> dist(g.size(), kUnreached);
    dist[target] = 0;
    std::deque<std::size_t> queue{target};
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t p : g.predecessors(v)) {
            if (dist[p] == kUnreached) {
                dist[p] = dist[v] + 1;
                queue.push_back(p);
            }
        }
    }
    return dist;
}

std::string join_labels(const cfg::ControlFlowGraph& g, std::span<const std::size_t> path) {
    std::string out;
    for (std::size_t v : path) {
        if (!out.empty()) out += "-";
        out += g.node(v).label;
    }
    return out;
}

}  // namespace

std::optional<std::vector<std::size_t>> shortest_path(const cfg::ControlFlowGraph& g,
                                                      std::size_t from, std::size_t to) {
    const auto dist = distances_to(g, to);
    if (dist[from] == kUnreached) return std::nullopt;
    std::vector<std::size_t> path{from};
    std::size_t v = from;
    while (v != to) {
        // Greedy descent: first successor (declaration order) one step closer.
        for (std::size_t s : g.successors(v)) {
            if (dist[s] != kUnreached && dist[s] + 1 == dist[v]) {
                v = s;
                break;
            }
        }
        path.push_back(v);
    }
    return path;
}

FeatureBag path_features(const cfg::ControlFlowGraph& g) {
    if (!g.has_entry() || !g.has_exit()) {
        throw Error("path_features: graph has no entry/exit; validate it first");
    }
    FeatureBag bag;
    if (g.size() == 1) return bag;

    const std::size_t entry = g.entry();
    const std::size_t exit = g.exit();

    // entry -> v for every other node.
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (v == entry) continue;
        if (auto path = shortest_path(g, entry, v)) {
            ++bag[join_labels(g, *path)];
        }
    }
    // v -> exit for every interior node.
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (v == entry || v == exit) continue;
        if (auto path = shortest_path(g, v, exit)) {
            ++bag[join_labels(g, *path)];
        }
    }
    return bag;
}

FeatureBag extract(const cfg::ControlFlowGraph& g) {
    FeatureBag bag = node_features(g);
    for (const auto& [f, c] : path_features(g)) bag[f] += c;
    return bag;
}

std::optional<std::size_t> FeatureVocabulary::index_of(std::string_view f) const {
    const auto it = index.find(std::string(f));
    return it == index.end() ? std::nullopt : std::optional{it->second};
}

FeatureVocabulary build_vocabulary(std::span<const FeatureBag> bags) {
    if (bags.empty()) throw Error("build_vocabulary: no bags");
    std::set<std::string> all;
    for (const auto& bag : bags) {
        for (const auto& [f, _] : bag) all.insert(f);
    }
    if (all.empty()) throw Error("build_vocabulary: empty feature union");
    FeatureVocabulary vocab;
    vocab.features.assign(all.begin(), all.end());
    for (std::size_t i = 0; i < vocab.features.size(); ++i) {
        vocab.index.emplace(vocab.features[i], i);
    }
    return vocab;
}

VectorizedRow vectorize(const FeatureBag& bag, const FeatureVocabulary& vocab) {
    if (vocab.size() == 0) throw Error("vectorize: empty vocabulary");
    VectorizedRow row;
    row.values.assign(vocab.size(), 0.0);
    for (const auto& [f, c] : bag) {
        if (auto idx = vocab.index_of(f)) {
            row.values[*idx] = static_cast<double>(c);
        } else {
            ++row.dropped;
        }
    }
    return row;
}

FeatureMatrix vectorize_all(std::span<const FeatureBag> bags,
                            std::span<const std::string> row_ids,
                            const FeatureVocabulary& vocab) {
    if (bags.size() != row_ids.size()) {
        throw Error("vectorize_all: bag/id count mismatch");
    }
    FeatureMatrix m;
    m.values = numerics::DenseMatrix(bags.size(), vocab.size());
    m.row_ids.assign(row_ids.begin(), row_ids.end());
    for (std::size_t i = 0; i < bags.size(); ++i) {
        const VectorizedRow row = vectorize(bags[i], vocab);
        std::copy(row.values.begin(), row.values.end(), m.values.row(i).begin());
    }
    return m;
}

void save_feature_matrix(std::ostream& out, const FeatureMatrix& m,
                         const FeatureVocabulary& vocab) {
    for (std::size_t j = 0; j < vocab.features.size(); ++j) {
        if (j > 0) out << ',';
        out << vocab.features[j];
    }
    out << '\n';
    for (std::size_t i = 0; i < m.values.rows(); ++i) {
        out << m.row_ids[i];
        for (std::size_t j = 0; j < m.values.cols(); ++j) {
            out << ',' << static_cast<long long>(m.values.at(i, j));
        }
        out << '\n';
    }
}

}  // namespace mrpred::featurize
