#include "mrpred/cfg.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace mrpred::cfg {

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
        return d.severity == Severity::kError;
    });
}

std::optional<std::size_t> ControlFlowGraph::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? std::nullopt : std::optional{it->second};
}

std::size_t ControlFlowGraph::add_node(std::string id, std::string label) {
    if (index_.contains(id)) throw Error("add_node: duplicate node id '" + id + "'");
    const std::size_t v = nodes_.size();
    index_.emplace(id, v);
    nodes_.push_back({std::move(id), std::move(label)});
    succ_.emplace_back();
    pred_.emplace_back();
    return v;
}

bool ControlFlowGraph::add_edge(std::size_t from, std::size_t to) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(from) << 32) | static_cast<std::uint64_t>(to);
    if (!edge_keys_.insert(key).second) return false;
    edges_.emplace_back(from, to);
    succ_[from].insert(std::upper_bound(succ_[from].begin(), succ_[from].end(), to), to);
    pred_[to].insert(std::upper_bound(pred_[to].begin(), pred_[to].end(), from), from);
    return true;
}

std::string normalize_label(std::string_view raw) {
    constexpr std::string_view kWs = " \t\r\n\f\v";
    const auto b = raw.find_first_not_of(kWs);
    if (b == std::string_view::npos) return "stmt";
    const auto e = raw.find_first_of(kWs, b);
    auto word = raw.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
    while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.back()))) {
        word.remove_suffix(1);
    }
    if (word.empty()) return "stmt";
    std::string out(word);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

void LabelMap::add(std::string prefix, std::string token) {
    rules_.emplace_back(std::move(prefix), std::move(token));
}

std::optional<std::string> LabelMap::match(std::string_view raw) const {
    const std::pair<std::string, std::string>* best = nullptr;
    for (const auto& rule : rules_) {
        if (raw.substr(0, rule.first.size()) != rule.first) continue;
        if (best == nullptr || rule.first.size() > best->first.size()) best = &rule;
    }
    if (best == nullptr) return std::nullopt;
    return best->second;
}

LabelMap LabelMap::parse(std::istream& in) {
    LabelMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("label map line " + std::to_string(lineno) +
                        ": expected raw_prefix=token");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string prefix = trim(line.substr(0, eq));
        std::string token = trim(line.substr(eq + 1));
        if (prefix.empty() || token.empty()) {
            throw Error("label map line " + std::to_string(lineno) +
                        ": empty prefix or token");
        }
        map.add(std::move(prefix), std::move(token));
    }
    return map;
}

LabelMap LabelMap::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open label map file: " + path);
    return parse(in);
}

std::string normalize_label(std::string_view raw, const LabelMap* map) {
    if (map != nullptr) {
        if (auto token = map->match(raw)) return *token;
    }
    return normalize_label(raw);
}

// ---------------------------------------------------------------------------
// DOT subset parser
// ---------------------------------------------------------------------------

namespace {

enum class TokKind { kId, kPunct, kArrow, kEof };

struct Token {
    TokKind kind = TokKind::kEof;
    std::string text;
    int line = 0;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) return t;
        const char c = text_[pos_];
        if (c == '"') {
            t.kind = TokKind::kId;
            t.text = lex_quoted();
            return t;
        }
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            pos_ += 2;
            t.kind = TokKind::kArrow;
            t.text = "->";
            return t;
        }
        if (std::strchr("{}[];,=", c) != nullptr) {
            ++pos_;
            t.kind = TokKind::kPunct;
            t.text = std::string(1, c);
            return t;
        }
        if (c == ':') throw ParseError(line_, "ports are not supported");
        if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '-') {
            throw ParseError(line_, "undirected edges are not supported");
        }
        if (is_id_char(c) || c == '-') {
            t.kind = TokKind::kId;
            const std::size_t start = pos_;
            ++pos_;
            while (pos_ < text_.size() && is_id_char(text_[pos_])) ++pos_;
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        throw ParseError(line_, std::string("unexpected character '") + c + "'");
    }

  private:
    static bool is_id_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    }

    void skip_trivia() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                const int open_line = line_;
                pos_ += 2;
                while (pos_ + 1 < text_.size() &&
                       !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) {
                    if (text_[pos_] == '\n') ++line_;
                    ++pos_;
                }
                if (pos_ + 1 >= text_.size()) {
                    throw ParseError(open_line, "unterminated block comment");
                }
                pos_ += 2;
            } else {
                return;
            }
        }
    }

    std::string lex_quoted() {
        const int open_line = line_;
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '"') {
                ++pos_;
                return out;
            }
            if (c == '\\' && pos_ + 1 < text_.size()) {
                const char n = text_[pos_ + 1];
                if (n == '"' || n == '\\') {
                    out.push_back(n);
                    pos_ += 2;
                    continue;
                }
            }
            if (c == '\n') ++line_;
            out.push_back(c);
            ++pos_;
        }
        throw ParseError(open_line, "unterminated quoted string");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

class Parser {
  public:
    Parser(std::string_view text, std::vector<Diagnostic>* diags, const LabelMap* map)
        : lexer_(text), diags_(diags), map_(map) {
        advance();
    }

    ControlFlowGraph parse() {
        if (accept_id("strict")) {
            // tolerated; edge uniqueness is enforced regardless
        }
        if (cur_.kind != TokKind::kId || (cur_.text != "digraph")) {
            if (cur_.kind == TokKind::kId && (cur_.text == "graph" || cur_.text == "subgraph")) {
                throw ParseError(cur_.line, "only digraph is supported");
            }
            throw ParseError(cur_.line, "expected 'digraph'");
        }
        advance();
        if (cur_.kind == TokKind::kId) advance();  // optional graph name
        expect_punct("{");
        while (!(cur_.kind == TokKind::kPunct && cur_.text == "}")) {
            if (cur_.kind == TokKind::kEof) {
                throw ParseError(cur_.line, "unexpected end of input, expected '}'");
            }
            statement();
        }
        const int close_line = cur_.line;
        advance();
        if (cur_.kind != TokKind::kEof) {
            throw ParseError(cur_.line, "trailing content after '}'");
        }
        if (graph_.size() == 0) throw ParseError(close_line, "empty graph");
        return std::move(graph_);
    }

  private:
    void advance() { cur_ = lexer_.next(); }

    bool accept_id(std::string_view text) {
        if (cur_.kind == TokKind::kId && cur_.text == text) {
            advance();
            return true;
        }
        return false;
    }

    void expect_punct(std::string_view p) {
        if (cur_.kind != TokKind::kPunct || cur_.text != p) {
            throw ParseError(cur_.line, "expected '" + std::string(p) + "'");
        }
        advance();
    }

    void warn(std::string message, std::string subject) {
        if (diags_ != nullptr) {
            diags_->push_back({Severity::kWarning, std::move(message), std::move(subject)});
        }
    }

    // Attribute list: [ key = value (, | ;)? ... ]. Only `label` is honored.
    std::optional<std::string> attr_list() {
        std::optional<std::string> label;
        expect_punct("[");
        while (!(cur_.kind == TokKind::kPunct && cur_.text == "]")) {
            if (cur_.kind != TokKind::kId) {
                throw ParseError(cur_.line, "expected attribute name");
            }
            const std::string key = cur_.text;
            advance();
            expect_punct("=");
            if (cur_.kind != TokKind::kId) {
                throw ParseError(cur_.line, "expected attribute value");
            }
            if (key == "label") label = cur_.text;
            advance();
            if (cur_.kind == TokKind::kPunct && (cur_.text == "," || cur_.text == ";")) {
                advance();
            }
        }
        advance();  // ']'
        return label;
    }

    std::size_t declare(const std::string& id, const std::optional<std::string>& raw_label) {
        if (auto v = graph_.find(id)) {
            if (raw_label) graph_.set_label(*v, normalize_label(*raw_label, map_));
            return *v;
        }
        return graph_.add_node(id, normalize_label(raw_label ? *raw_label : id, map_));
    }

    std::size_t auto_declare(const std::string& id) {
        if (auto v = graph_.find(id)) return *v;
        warn("edge references undeclared node; declared with label from its id", id);
        return graph_.add_node(id, normalize_label(id, map_));
    }

    void statement() {
        if (cur_.kind == TokKind::kPunct && cur_.text == ";") {
            advance();
            return;
        }
        if (cur_.kind != TokKind::kId) {
            throw ParseError(cur_.line, "expected a node or edge statement");
        }
        if (cur_.text == "subgraph") {
            throw ParseError(cur_.line, "subgraphs are not supported");
        }
        if (cur_.text == "node" || cur_.text == "edge" || cur_.text == "graph") {
            // Default-attribute statement; carries no structure.
            const std::string kw = cur_.text;
            advance();
            if (cur_.kind == TokKind::kPunct && cur_.text == "[") {
                attr_list();
                warn("default attribute statement ignored", kw);
                if (cur_.kind == TokKind::kPunct && cur_.text == ";") advance();
                return;
            }
            throw ParseError(cur_.line, "expected '[' after '" + kw + "'");
        }

        const std::string first = cur_.text;
        const int first_line = cur_.line;
        advance();

        if (cur_.kind == TokKind::kArrow) {
            // Edge chain a -> b -> c ...
            std::size_t from = auto_declare(first);
            while (cur_.kind == TokKind::kArrow) {
                advance();
                if (cur_.kind != TokKind::kId) {
                    throw ParseError(cur_.line, "expected node id after '->'");
                }
                const std::size_t to = auto_declare(cur_.text);
                advance();
                if (!graph_.add_edge(from, to)) {
                    warn("parallel edge collapsed",
                         graph_.node(from).id + " -> " + graph_.node(to).id);
                }
                from = to;
            }
            if (cur_.kind == TokKind::kPunct && cur_.text == "[") attr_list();
            if (cur_.kind == TokKind::kPunct && cur_.text == ";") advance();
            return;
        }

        // Node statement.
        std::optional<std::string> label;
        if (cur_.kind == TokKind::kPunct && cur_.text == "[") {
            label = attr_list();
        } else if (cur_.kind == TokKind::kPunct && cur_.text == "=") {
            throw ParseError(first_line, "graph-level attributes are not supported");
        }
        declare(first, label);
        if (cur_.kind == TokKind::kPunct && cur_.text == ";") advance();
    }

    Lexer lexer_;
    Token cur_;
    ControlFlowGraph graph_;
    std::vector<Diagnostic>* diags_;
    const LabelMap* map_;
};

bool needs_quotes(std::string_view id) {
    if (id.empty()) return true;
    if (std::isdigit(static_cast<unsigned char>(id.front()))) return true;
    return !std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_';
    });
}

void write_id(std::ostream& out, std::string_view id) {
    if (!needs_quotes(id)) {
        out << id;
        return;
    }
    out << '"';
    for (char c : id) {
        if (c == '"' || c == '\\') out << '\\';
        out << c;
    }
    out << '"';
}

}  // namespace

ControlFlowGraph parse_dot(std::string_view text, std::vector<Diagnostic>* diagnostics,
                           const LabelMap* label_map) {
    Parser parser(text, diagnostics, label_map);
    return parser.parse();
}

std::string print_dot(const ControlFlowGraph& g, std::string_view name) {
    std::ostringstream out;
    out << "digraph ";
    write_id(out, name);
    out << " {\n";
    for (const Node& n : g.nodes()) {
        out << "  ";
        write_id(out, n.id);
        out << " [label=";
        write_id(out, n.label.empty() ? std::string_view{"stmt"} : std::string_view{n.label});
        out << "];\n";
    }
    for (const auto& [from, to] : g.edges()) {
        out << "  ";
        write_id(out, g.node(from).id);
        out << " -> ";
        write_id(out, g.node(to).id);
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::vector<Diagnostic> validate(ControlFlowGraph& g) {
    std::vector<Diagnostic> diags;
    if (g.size() == 0) {
        diags.push_back({Severity::kError, "empty graph", ""});
        return diags;
    }
    if (g.size() == 1 && g.edges().empty()) {
        g.set_entry(0);
        g.set_exit(0);
        return diags;
    }

    std::vector<std::size_t> sources;
    std::vector<std::size_t> sinks;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (g.in_degree(v) == 0) sources.push_back(v);
        if (g.out_degree(v) == 0) sinks.push_back(v);
    }

    if (sources.size() == 1) {
        g.set_entry(sources.front());
    } else if (sources.empty()) {
        diags.push_back({Severity::kError, "no entry node (every node has incoming edges)", ""});
    } else {
        std::string ids;
        for (std::size_t v : sources) {
            if (!ids.empty()) ids += ", ";
            ids += g.node(v).id;
        }
        diags.push_back({Severity::kError, "multiple entry candidates: " + ids, ""});
    }

    if (sinks.size() == 1) {
        g.set_exit(sinks.front());
    } else if (sinks.empty()) {
        diags.push_back({Severity::kError, "no exit node (every node has outgoing edges)", ""});
    } else {
        // Repair: synthetic exit fed by every sink.
        std::string exit_id = "__end";
        for (int i = 1; g.contains(exit_id); ++i) exit_id = "__end" + std::to_string(i);
        const std::size_t exit_v = g.add_node(exit_id, "end");
        std::string ids;
        for (std::size_t v : sinks) {
            g.add_edge(v, exit_v);
            if (!ids.empty()) ids += ", ";
            ids += g.node(v).id;
        }
        g.set_exit(exit_v);
        diags.push_back({Severity::kWarning,
                         "multiple exit nodes (" + ids + "); synthetic exit appended", exit_id});
    }

    if (g.has_entry()) {
        std::vector<bool> seen(g.size(), false);
        std::deque<std::size_t> queue{g.entry()};
        seen[g.entry()] = true;
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t s : g.successors(v)) {
                if (!seen[s]) {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
        }
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (!seen[v]) {
                diags.push_back({Severity::kWarning, "unreachable from entry", g.node(v).id});
            }
        }
    }
    if (g.has_exit()) {
        std::vector<bool> seen(g.size(), false);
        std::deque<std::size_t> queue{g.exit()};
        seen[g.exit()] = true;
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t p : g.predecessors(v)) {
                if (!seen[p]) {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (!seen[v]) {
                diags.push_back({Severity::kWarning, "cannot reach exit", g.node(v).id});
            }
        }
    }
    return diags;
}

}  // namespace mrpred::cfg
