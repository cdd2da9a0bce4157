#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mrpred/error.hpp"

namespace mrpred::cfg {

enum class Severity { kError, kWarning };

struct Diagnostic {
    Severity severity = Severity::kWarning;
    std::string message;
    std::string subject;  // node id or file path; empty when not applicable
};

bool has_errors(const std::vector<Diagnostic>& diags);

struct Node {
    std::string id;     // opaque identifier from the DOT source
    std::string label;  // normalized category token
    bool operator==(const Node&) const = default;
};

// Directed graph of labeled statement nodes. Nodes keep declaration order,
// edges are unique and keep first-seen order. Entry/exit are assigned by
// validate().
class ControlFlowGraph {
  public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::size_t size() const { return nodes_.size(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(std::size_t v) const { return nodes_[v]; }

    std::optional<std::size_t> find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id).has_value(); }

    // id must not already exist; returns the new node index.
    std::size_t add_node(std::string id, std::string label);
    void set_label(std::size_t v, std::string label) { nodes_[v].label = std::move(label); }

    // Returns false (and changes nothing) for a duplicate edge.
    bool add_edge(std::size_t from, std::size_t to);
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

    // Neighbor lists in ascending node-declaration order.
    const std::vector<std::size_t>& successors(std::size_t v) const { return succ_[v]; }
    const std::vector<std::size_t>& predecessors(std::size_t v) const { return pred_[v]; }
    std::size_t in_degree(std::size_t v) const { return pred_[v].size(); }
    std::size_t out_degree(std::size_t v) const { return succ_[v].size(); }

    bool has_entry() const { return entry_ != npos; }
    bool has_exit() const { return exit_ != npos; }
    std::size_t entry() const { return entry_; }
    std::size_t exit() const { return exit_; }
    const std::string& entry_id() const { return nodes_[entry_].id; }
    const std::string& exit_id() const { return nodes_[exit_].id; }
    void set_entry(std::size_t v) { entry_ = v; }
    void set_exit(std::size_t v) { exit_ = v; }

    bool operator==(const ControlFlowGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_ &&
               entry_ == other.entry_ && exit_ == other.exit_;
    }

  private:
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::unordered_set<std::uint64_t> edge_keys_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::vector<std::size_t>> pred_;
    std::size_t entry_ = npos;
    std::size_t exit_ = npos;
};

// Lowercased first whitespace-delimited word with trailing non-alphanumeric
// characters stripped; an empty result falls back to "stmt". Idempotent.
std::string normalize_label(std::string_view raw);

// User-supplied raw_prefix -> token rewrite rules (one `raw_prefix=token`
// per line, `#` comments allowed). The longest matching prefix wins; labels
// matching no rule fall back to normalize_label.
class LabelMap {
  public:
    void add(std::string prefix, std::string token);
    std::optional<std::string> match(std::string_view raw) const;
    bool empty() const { return rules_.empty(); }

    static LabelMap parse(std::istream& in);
    static LabelMap load_file(const std::string& path);

  private:
    std::vector<std::pair<std::string, std::string>> rules_;
};

std::string normalize_label(std::string_view raw, const LabelMap* map);

class ParseError : public Error {
  public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Parses the supported DOT subset: a single `digraph`, node statements with
// an optional [label="..."] attribute, and `a -> b;` edge statements (chains
// allowed). Subgraphs, ports and undirected edges are rejected. Nodes first
// seen in an edge are auto-declared with a label from their id (warning);
// parallel edges collapse to one (warning).
ControlFlowGraph parse_dot(std::string_view text,
                           std::vector<Diagnostic>* diagnostics = nullptr,
                           const LabelMap* label_map = nullptr);

// Canonical printer for the supported subset; parse_dot(print_dot(g))
// reproduces g.
std::string print_dot(const ControlFlowGraph& g, std::string_view name = "g");

// Entry/exit discovery and repair. Errors for zero or multiple sources and
// for graphs with no sink (other than the single-node graph); multiple sinks
// are repaired by appending a synthetic exit labeled "end" (warning).
// Unreachable nodes and nodes that cannot reach the exit get warnings.
std::vector<Diagnostic> validate(ControlFlowGraph& g);

}  // namespace mrpred::cfg
