#include "mrpred/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "mrpred/error.hpp"
#include "mrpred/rng.hpp"

namespace fs = std::filesystem;

namespace mrpred::corpus {

bool is_mr_name(std::string_view name) {
    return std::find(kMrNames.begin(), kMrNames.end(), name) != kMrNames.end();
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Write-temp-then-rename so partially written files never appear.
void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

ExtractedCorpus extract_dir(const fs::path& dot_dir, const cfg::LabelMap* label_map) {
    if (!fs::is_directory(dot_dir)) {
        throw Error("corpus directory not found: " + dot_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dot_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".dot") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no .dot files in " + dot_dir.string());

    ExtractedCorpus out;
    for (const fs::path& file : files) {
        const std::string method_id = file.stem().string();
        std::vector<cfg::Diagnostic> diags;
        cfg::ControlFlowGraph graph;
        try {
            graph = cfg::parse_dot(read_file(file), &diags, label_map);
        } catch (const cfg::ParseError& e) {
            throw Error(file.string() + ": " + e.what());
        }
        auto validation = cfg::validate(graph);
        diags.insert(diags.end(), validation.begin(), validation.end());
        for (cfg::Diagnostic& d : diags) {
            if (d.subject.empty()) d.subject = method_id;
            else d.subject = method_id + ":" + d.subject;
        }
        if (cfg::has_errors(diags)) {
            std::string detail;
            for (const auto& d : diags) {
                if (d.severity == cfg::Severity::kError) {
                    detail = d.message;
                    break;
                }
            }
            throw Error("invalid graph '" + method_id + "': " + detail);
        }
        out.diagnostics.insert(out.diagnostics.end(), diags.begin(), diags.end());
        out.method_ids.push_back(method_id);
        out.bags.push_back(featurize::extract(graph));
    }
    return out;
}

Dataset load_corpus(const fs::path& dot_dir, const fs::path& labels_csv,
                    const cfg::LabelMap* label_map) {
    std::ifstream in(labels_csv);
    if (!in) throw Error("cannot open labels file: " + labels_csv.string());

    std::string line;
    if (!std::getline(in, line)) throw Error("labels file is empty: " + labels_csv.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::string expected = "method_id";
        for (const auto mr : kMrNames) {
            expected += ',';
            expected += mr;
        }
        if (line != expected) {
            throw Error("labels header must be exactly '" + expected + "'");
        }
    }

    ExtractedCorpus extracted = extract_dir(dot_dir, label_map);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < extracted.method_ids.size(); ++i) {
        by_id.emplace(extracted.method_ids[i], i);
    }

    Dataset ds;
    for (const auto mr : kMrNames) ds.labels.emplace(std::string(mr), std::vector<int>{});
    std::vector<featurize::FeatureBag> bags;
    std::set<std::string> seen;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 1 + kMrNames.size()) {
            throw Error("labels row " + std::to_string(row) + ": expected " +
                        std::to_string(1 + kMrNames.size()) + " fields");
        }
        const std::string& method_id = fields[0];
        if (!seen.insert(method_id).second) {
            throw Error("labels row " + std::to_string(row) + ": duplicate method_id '" +
                        method_id + "'");
        }
        const auto it = by_id.find(method_id);
        if (it == by_id.end()) throw Error("missing graph: " + method_id);
        for (std::size_t k = 0; k < kMrNames.size(); ++k) {
            const std::string& v = fields[k + 1];
            if (v != "0" && v != "1") {
                throw Error("labels row " + std::to_string(row) + ": label for " +
                            std::string(kMrNames[k]) + " must be 0 or 1, got '" + v + "'");
            }
            ds.labels[std::string(kMrNames[k])].push_back(v == "1" ? 1 : 0);
        }
        ds.method_ids.push_back(method_id);
        bags.push_back(extracted.bags[it->second]);
    }
    if (ds.method_ids.empty()) throw Error("labels file has no data rows");

    ds.vocabulary = featurize::build_vocabulary(bags);
    ds.features = featurize::vectorize_all(bags, ds.method_ids, ds.vocabulary);
    return ds;
}

std::vector<double> apply_mr_transform(std::string_view mr, std::span<const double> input,
                                       double c) {
    if (input.empty()) throw Error("transform: input sequence is empty");
    std::vector<double> out(input.begin(), input.end());
    if (mr == "addition") {
        for (double& v : out) v += c;
    } else if (mr == "multiplication") {
        for (double& v : out) v *= c;
    } else if (mr == "permutation") {
        std::rotate(out.rbegin(), out.rbegin() + 1, out.rend());
    } else if (mr == "inclusion") {
        out.push_back(c);
    } else if (mr == "exclusion") {
        if (out.size() < 2) throw Error("transform: exclusion needs at least 2 elements");
        out.pop_back();
    } else if (mr == "inversion") {
        for (double& v : out) {
            if (v == 0.0) throw Error("transform: inversion requires nonzero elements");
            v = 1.0 / v;
        }
    } else {
        throw Error("unknown MR name: " + std::string(mr));
    }
    return out;
}

std::vector<double> apply_permutation_random(std::span<const double> input,
                                             std::uint64_t seed) {
    if (input.empty()) throw Error("transform: input sequence is empty");
    std::vector<double> out(input.begin(), input.end());
    Rng rng(derive_seed(seed, "permutation", 0));
    rng.shuffle(out);
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus generation
// ---------------------------------------------------------------------------

namespace {

// kMrNames order: addition, multiplication, permutation, inclusion,
// exclusion, inversion.
constexpr std::array<std::string_view, 6> kMotifTokens = {"add", "mult", "loop",
                                                          "if",  "assi", "div"};
constexpr std::array<std::string_view, 3> kFillerTokens = {"call", "cmp", "sub"};

struct Segment {
    enum class Kind { kStatement, kBranch, kLoop } kind = Kind::kStatement;
    std::string token;  // statement token; branches/loops use fixed head tokens
};

std::string filler(Rng& rng) {
    return std::string(kFillerTokens[rng.bounded(kFillerTokens.size())]);
}

// A single structured method: start, a shuffled mix of required motif
// segments and fillers, end. Every node lies on a start->end walk, so the
// graph always validates cleanly.
cfg::ControlFlowGraph generate_method_graph(Rng& rng, const std::array<bool, 6>& motifs) {
    std::vector<Segment> segments;
    const bool want_add = motifs[0];
    const bool want_mult = motifs[1];
    const bool want_loop = motifs[2];
    const bool want_if = motifs[3];
    const bool want_assi2 = motifs[4];
    const bool want_div = motifs[5];

    if (want_add) segments.push_back({Segment::Kind::kStatement, "add"});
    if (want_mult) segments.push_back({Segment::Kind::kStatement, "mult"});
    if (want_div) segments.push_back({Segment::Kind::kStatement, "div"});
    if (want_loop) segments.push_back({Segment::Kind::kLoop, ""});
    if (want_if) segments.push_back({Segment::Kind::kBranch, ""});
    if (want_assi2) {
        segments.push_back({Segment::Kind::kStatement, "assi"});
        segments.push_back({Segment::Kind::kStatement, "assi"});
    } else if (rng.coin(0.5)) {
        segments.push_back({Segment::Kind::kStatement, "assi"});
    }
    const std::size_t n_fillers = rng.bounded(4);
    for (std::size_t i = 0; i < n_fillers; ++i) {
        segments.push_back({Segment::Kind::kStatement, filler(rng)});
    }
    rng.shuffle(segments);

    cfg::ControlFlowGraph g;
    std::size_t next_id = 0;
    auto fresh = [&](std::string_view label) {
        return g.add_node("n" + std::to_string(next_id++), std::string(label));
    };

    std::vector<std::size_t> tails{fresh("start")};
    auto link_tails_to = [&](std::size_t head) {
        for (std::size_t t : tails) g.add_edge(t, head);
    };

    for (const Segment& seg : segments) {
        switch (seg.kind) {
            case Segment::Kind::kStatement: {
                const std::size_t v = fresh(seg.token);
                link_tails_to(v);
                tails = {v};
                break;
            }
            case Segment::Kind::kBranch: {
                const std::size_t head = fresh("if");
                link_tails_to(head);
                // First arm always has at least one node; the second may be
                // empty (the branch head then falls through directly).
                std::size_t arm1 = head;
                const std::size_t arm1_len = 1 + rng.bounded(2);
                for (std::size_t i = 0; i < arm1_len; ++i) {
                    const std::size_t v = fresh(filler(rng));
                    g.add_edge(arm1, v);
                    arm1 = v;
                }
                tails = {arm1};
                const std::size_t arm2_len = rng.bounded(3);
                if (arm2_len == 0) {
                    tails.push_back(head);
                } else {
                    std::size_t arm2 = head;
                    for (std::size_t i = 0; i < arm2_len; ++i) {
                        const std::size_t v = fresh(filler(rng));
                        g.add_edge(arm2, v);
                        arm2 = v;
                    }
                    tails.push_back(arm2);
                }
                break;
            }
            case Segment::Kind::kLoop: {
                const std::size_t head = fresh("loop");
                link_tails_to(head);
                std::size_t body = head;
                const std::size_t body_len = 1 + rng.bounded(2);
                for (std::size_t i = 0; i < body_len; ++i) {
                    const std::size_t v = fresh(filler(rng));
                    g.add_edge(body, v);
                    body = v;
                }
                g.add_edge(body, head);  // back edge
                tails = {head};
                break;
            }
        }
    }
    const std::size_t end = fresh("end");
    link_tails_to(end);
    return g;
}

}  // namespace

std::array<bool, 6> structural_motifs(const cfg::ControlFlowGraph& g) {
    std::size_t assi_count = 0;
    std::array<bool, 6> motifs{};
    for (const cfg::Node& n : g.nodes()) {
        for (std::size_t k = 0; k < kMotifTokens.size(); ++k) {
            if (n.label == kMotifTokens[k] && kMotifTokens[k] != "assi") motifs[k] = true;
        }
        if (n.label == "assi") ++assi_count;
    }
    motifs[4] = assi_count >= 2;
    return motifs;
}

void generate_synthetic(const SynthConfig& config, const fs::path& out_dir) {
    if (config.n_methods < 10) throw Error("synth: need at least 10 methods");
    if (config.signal_strength < 0.0 || config.signal_strength > 1.0) {
        throw Error("synth: signal strength must be in [0, 1]");
    }
    fs::create_directories(out_dir);

    int width = 1;
    for (std::size_t v = config.n_methods - 1; v >= 10; v /= 10) ++width;

    std::ostringstream csv;
    csv << "method_id";
    for (const auto mr : kMrNames) csv << ',' << mr;
    csv << '\n';

    for (std::size_t m = 0; m < config.n_methods; ++m) {
        Rng rng(derive_seed(config.seed, "synth-method", m));
        std::array<bool, 6> motifs{};
        for (bool& bit : motifs) bit = rng.coin(0.5);

        const cfg::ControlFlowGraph graph = generate_method_graph(rng, motifs);

        std::string id = std::to_string(m);
        id.insert(0, static_cast<std::size_t>(width) - id.size(), '0');
        id.insert(0, "m");

        write_file_atomic(out_dir / (id + ".dot"), cfg::print_dot(graph, id));

        csv << id;
        for (std::size_t k = 0; k < kMrNames.size(); ++k) {
            const bool label = rng.coin(config.signal_strength) ? motifs[k] : rng.coin(0.5);
            csv << ',' << (label ? 1 : 0);
        }
        csv << '\n';
    }
    write_file_atomic(out_dir / "labels.csv", csv.str());
}

std::string fingerprint_corpus(const fs::path& dot_dir, const fs::path& labels_csv) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&h](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001B3ULL;
        }
        h ^= 0xFF;
        h *= 0x100000001B3ULL;
    };
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dot_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".dot") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
        mix(file.filename().string());
        mix(read_file(file));
    }
    if (!labels_csv.empty()) {
        mix(labels_csv.filename().string());
        mix(read_file(labels_csv));
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

}  // namespace mrpred::corpus
