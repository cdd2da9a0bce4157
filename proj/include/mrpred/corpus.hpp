#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mrpred/cfg.hpp"
#include "mrpred/featurize.hpp"

namespace mrpred::corpus {

// Canonical MR names and label-table column order.
inline constexpr std::array<std::string_view, 6> kMrNames = {
    "addition", "multiplication", "permutation",
    "inclusion", "exclusion",     "inversion",
};

bool is_mr_name(std::string_view name);

struct Dataset {
    std::vector<std::string> method_ids;
    featurize::FeatureVocabulary vocabulary;
    featurize::FeatureMatrix features;
    std::map<std::string, std::vector<int>> labels;  // exactly the six MR names
};

// Parses, validates and featurizes one graph per .dot file in dot_dir,
// keyed by method_id (file stem), scanned in sorted filename order.
// Validation warnings are collected; errors reject the corpus.
struct ExtractedCorpus {
    std::vector<std::string> method_ids;
    std::vector<featurize::FeatureBag> bags;
    std::vector<cfg::Diagnostic> diagnostics;
};

ExtractedCorpus extract_dir(const std::filesystem::path& dot_dir,
                            const cfg::LabelMap* label_map = nullptr);

// Binds the label CSV (header `method_id,addition,...,inversion`) to the
// graphs in dot_dir; rows determine dataset order. Labels must be 0/1,
// method ids unique, and every row's graph file must exist.
Dataset load_corpus(const std::filesystem::path& dot_dir,
                    const std::filesystem::path& labels_csv,
                    const cfg::LabelMap* label_map = nullptr);

// Follow-up test case construction for one MR. `c` is the constant the MR
// applies where it needs one. Preconditions: non-empty input; inversion
// needs all elements nonzero; exclusion needs length >= 2.
std::vector<double> apply_mr_transform(std::string_view mr, std::span<const double> input,
                                       double c);

// Arbitrary-permutation variant of the permutation MR (seeded shuffle).
std::vector<double> apply_permutation_random(std::span<const double> input,
                                             std::uint64_t seed);

struct SynthConfig {
    std::size_t n_methods = 62;
    std::uint64_t seed = 0;
    double signal_strength = 1.0;  // in [0, 1]
};

// Emits n_methods structured random CFGs (<out_dir>/<id>.dot) plus
// <out_dir>/labels.csv. Per MR, a method's label equals the presence of a
// designated structural motif with probability signal_strength and is a fair
// coin otherwise. Byte-identical output for equal configs; every generated
// graph validates without diagnostics.
void generate_synthetic(const SynthConfig& config, const std::filesystem::path& out_dir);

// Motif truth values for a generated (or any) graph, in kMrNames order:
// addition: has an "add" node; multiplication: "mult"; permutation: "loop";
// inclusion: "if"; exclusion: at least two "assi" nodes; inversion: "div".
std::array<bool, 6> structural_motifs(const cfg::ControlFlowGraph& g);

// FNV-1a content hash (hex) over the corpus files, stable across runs.
std::string fingerprint_corpus(const std::filesystem::path& dot_dir,
                               const std::filesystem::path& labels_csv);

}  // namespace mrpred::corpus
