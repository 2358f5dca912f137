#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sop {

using Node = std::int32_t;
using Cost = std::int64_t;

/// Matrix entry marking a forbidden arc: -1 at (i, j) means j must precede i.
inline constexpr Cost kForbidden = -1;

/// Raised for malformed instance files. Carries the 1-based line number
/// (0 when the problem is not tied to a line).
class InstanceError : public std::runtime_error {
public:
    InstanceError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Fixed-size set of nodes stored as 64-bit words.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

    void insert(Node v) { words_[idx(v)] |= bit(v); }
    bool contains(Node v) const { return (words_[idx(v)] & bit(v)) != 0; }
    std::size_t universe() const noexcept { return size_; }

    NodeSet& operator|=(const NodeSet& other) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
        return *this;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::vector<Node> to_vector() const {
        std::vector<Node> out;
        for (std::size_t k = 0; k < words_.size(); ++k) {
            for (auto w = words_[k]; w != 0; w &= w - 1) {
                out.push_back(static_cast<Node>(k * 64 + static_cast<std::size_t>(std::countr_zero(w))));
            }
        }
        return out;
    }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
    static std::size_t idx(Node v) { return static_cast<std::size_t>(v) / 64; }
    static std::uint64_t bit(Node v) { return std::uint64_t{1} << (static_cast<std::size_t>(v) % 64); }

    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

namespace detail {

// Reachability sets over an adjacency list. Uses a reverse topological
// sweep when the graph is acyclic and falls back to one BFS per node.
inline std::vector<NodeSet> reachability(const std::vector<std::vector<Node>>& adj) {
    const auto n = adj.size();
    std::vector<NodeSet> reach(n, NodeSet(n));

    std::vector<int> indeg(n, 0);
    for (const auto& out : adj)
        for (auto v : out) ++indeg[static_cast<std::size_t>(v)];
    std::vector<Node> topo;
    topo.reserve(n);
    for (std::size_t u = 0; u < n; ++u)
        if (indeg[u] == 0) topo.push_back(static_cast<Node>(u));
    for (std::size_t k = 0; k < topo.size(); ++k) {
        for (auto v : adj[static_cast<std::size_t>(topo[k])])
            if (--indeg[static_cast<std::size_t>(v)] == 0) topo.push_back(v);
    }

    if (topo.size() == n) {
        for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
            auto& r = reach[static_cast<std::size_t>(*it)];
            for (auto v : adj[static_cast<std::size_t>(*it)]) {
                r.insert(v);
                r |= reach[static_cast<std::size_t>(v)];
            }
        }
        return reach;
    }

    std::vector<Node> queue;
    for (std::size_t s = 0; s < n; ++s) {
        auto& r = reach[s];
        queue.assign(adj[s].begin(), adj[s].end());
        for (auto v : queue) r.insert(v);
        for (std::size_t k = 0; k < queue.size(); ++k) {
            for (auto w : adj[static_cast<std::size_t>(queue[k])]) {
                if (!r.contains(w)) {
                    r.insert(w);
                    queue.push_back(w);
                }
            }
        }
    }
    return reach;
}

}  // namespace detail

/// A Sequential Ordering Problem instance: asymmetric cost matrix, the
/// precedence relation encoded by its forbidden entries, start node 0 and
/// final node n-1. Immutable after construction.
class Instance {
public:
    Instance(std::string name, std::size_t n, std::vector<Cost> matrix)
        : name_(std::move(name)), n_(n), cost_(std::move(matrix)) {
        if (n_ == 0) throw InstanceError(0, "instance must contain at least one node");
        if (cost_.size() != n_ * n_) throw InstanceError(0, "cost matrix is not n x n");
        for (auto c : cost_)
            if (c < 0 && c != kForbidden)
                throw InstanceError(0, "negative cost other than -1 in matrix");
        build_relations();
    }

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return n_; }
    Node start() const noexcept { return 0; }
    Node final_node() const noexcept { return static_cast<Node>(n_ - 1); }

    /// Raw matrix entry (kForbidden for forbidden arcs).
    Cost cost(Node i, Node j) const noexcept {
        return cost_[static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j)];
    }
    bool forbidden(Node i, Node j) const noexcept { return cost(i, j) == kForbidden; }
    const std::vector<Cost>& matrix() const noexcept { return cost_; }

    /// Precedence pairs (u, v), u before v, read from the matrix sentinels.
    const std::vector<std::pair<Node, Node>>& precedences() const noexcept { return pairs_; }

    /// Effective relation used by the solvers: file pairs plus the start and
    /// final conventions. Direct successors only.
    const std::vector<Node>& direct_successors(Node u) const { return succ_direct_[static_cast<std::size_t>(u)]; }
    int direct_predecessor_count(Node v) const { return pred_count_[static_cast<std::size_t>(v)]; }

    /// Transitive closure of the effective relation.
    const std::vector<Node>& successors_closure(Node u) const { return succ_list_[static_cast<std::size_t>(u)]; }
    const std::vector<Node>& predecessors_closure(Node v) const { return pred_list_[static_cast<std::size_t>(v)]; }
    bool must_precede(Node u, Node v) const { return succ_closure_[static_cast<std::size_t>(u)].contains(v); }

    /// Closure of the file relation alone (no conventions); used by validation.
    const NodeSet& raw_successors(Node u) const { return raw_closure_[static_cast<std::size_t>(u)]; }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.name_ == b.name_ && a.n_ == b.n_ && a.cost_ == b.cost_;
    }

private:
    void build_relations() {
        const auto n = n_;
        std::vector<std::vector<Node>> raw(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j && cost_[i * n + j] == kForbidden) {
                    pairs_.emplace_back(static_cast<Node>(j), static_cast<Node>(i));
                    raw[j].push_back(static_cast<Node>(i));
                }
            }
        }
        std::sort(pairs_.begin(), pairs_.end());
        raw_closure_ = detail::reachability(raw);

        auto eff = raw;
        const auto s = static_cast<std::size_t>(start());
        const auto f = static_cast<std::size_t>(final_node());
        if (n > 1) {
            for (std::size_t v = 0; v < n; ++v) {
                if (v != s) eff[s].push_back(static_cast<Node>(v));
                if (v != f) eff[v].push_back(static_cast<Node>(f));
            }
        }
        for (auto& out : eff) {
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
        }
        succ_closure_ = detail::reachability(eff);

        pred_count_.assign(n, 0);
        for (const auto& out : eff)
            for (auto v : out) ++pred_count_[static_cast<std::size_t>(v)];
        succ_direct_ = std::move(eff);

        succ_list_.resize(n);
        pred_list_.assign(n, {});
        for (std::size_t u = 0; u < n; ++u) {
            succ_list_[u] = succ_closure_[u].to_vector();
            for (auto v : succ_list_[u]) pred_list_[static_cast<std::size_t>(v)].push_back(static_cast<Node>(u));
        }
    }

    std::string name_;
    std::size_t n_;
    std::vector<Cost> cost_;
    std::vector<std::pair<Node, Node>> pairs_;
    std::vector<NodeSet> raw_closure_;
    std::vector<NodeSet> succ_closure_;
    std::vector<std::vector<Node>> succ_direct_;
    std::vector<int> pred_count_;
    std::vector<std::vector<Node>> succ_list_;
    std::vector<std::vector<Node>> pred_list_;
};

enum class InstanceFormat { tsplib_sop, soplib };

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k < s.size()) {
        while (k < s.size() && (s[k] == ' ' || s[k] == '\t' || s[k] == '\r')) ++k;
        const auto b = k;
        while (k < s.size() && s[k] != ' ' && s[k] != '\t' && s[k] != '\r') ++k;
        if (k > b) out.push_back(s.substr(b, k - b));
    }
    return out;
}

inline long long parse_integer(std::string_view tok, std::size_t line) {
    long long v = 0;
    const auto* end = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || p != end)
        throw InstanceError(line, "expected an integer, found '" + std::string(tok) + "'");
    return v;
}

struct Lines {
    std::vector<std::string_view> text;
    std::size_t next = 0;

    explicit Lines(std::string_view all) {
        std::size_t b = 0;
        while (b <= all.size()) {
            auto e = all.find('\n', b);
            if (e == std::string_view::npos) e = all.size();
            text.push_back(all.substr(b, e - b));
            b = e + 1;
        }
    }

    // Advances to the next non-blank line; returns false at end of input.
    bool skip_blank() {
        while (next < text.size() && trim(text[next]).empty()) ++next;
        return next < text.size();
    }
    std::size_t line_no() const { return next + 1; }
};

inline std::vector<Cost> read_matrix(Lines& lines, std::size_t n) {
    std::vector<Cost> m;
    m.reserve(n * n);
    for (std::size_t row = 0; row < n; ++row) {
        if (!lines.skip_blank())
            throw InstanceError(lines.line_no(), "matrix ends after " + std::to_string(row) + " of " +
                                                      std::to_string(n) + " rows");
        const auto ln = lines.line_no();
        const auto toks = split_ws(lines.text[lines.next++]);
        if (toks.size() != n)
            throw InstanceError(ln, "dimension mismatch: expected " + std::to_string(n) + " entries, found " +
                                        std::to_string(toks.size()));
        for (auto t : toks) {
            const auto v = parse_integer(t, ln);
            if (v < 0 && v != kForbidden)
                throw InstanceError(ln, "negative value " + std::to_string(v) + " (only -1 is allowed)");
            m.push_back(v);
        }
    }
    return m;
}

inline void expect_end(Lines& lines) {
    while (lines.skip_blank()) {
        const auto t = trim(lines.text[lines.next]);
        if (t != "EOF") throw InstanceError(lines.line_no(), "unexpected trailing content");
        ++lines.next;
    }
}

inline std::size_t parse_dimension(std::string_view tok, std::size_t line) {
    const auto v = parse_integer(tok, line);
    if (v <= 0) throw InstanceError(line, "dimension must be positive");
    return static_cast<std::size_t>(v);
}

inline Instance parse_tsplib(std::string_view text, std::string fallback_name) {
    Lines lines(text);
    std::string name = std::move(fallback_name);
    std::size_t n = 0;
    bool in_section = false;
    while (lines.skip_blank()) {
        const auto ln = lines.line_no();
        const auto line = trim(lines.text[lines.next++]);
        if (line == "EDGE_WEIGHT_SECTION" || line.starts_with("EDGE_WEIGHT_SECTION")) {
            in_section = true;
            break;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw InstanceError(ln, "malformed header line '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, colon));
        const auto value = trim(line.substr(colon + 1));
        if (key == "NAME") {
            name = std::string(value);
        } else if (key == "DIMENSION") {
            n = parse_dimension(value, ln);
        } else if (key == "TYPE") {
            if (value != "SOP" && value != "ATSP" && value != "TSP")
                throw InstanceError(ln, "unsupported TYPE '" + std::string(value) + "'");
        } else if (key == "EDGE_WEIGHT_TYPE") {
            if (value != "EXPLICIT") throw InstanceError(ln, "only EXPLICIT edge weights are supported");
        } else if (key == "EDGE_WEIGHT_FORMAT") {
            if (value != "FULL_MATRIX") throw InstanceError(ln, "only FULL_MATRIX edge weights are supported");
        }
    }
    if (!in_section) throw InstanceError(0, "missing EDGE_WEIGHT_SECTION");
    if (n == 0) throw InstanceError(0, "missing DIMENSION");

    // The section may open with the dimension repeated on its own line.
    if (lines.skip_blank()) {
        const auto toks = split_ws(lines.text[lines.next]);
        if (toks.size() == 1 && n > 1) {
            const auto ln = lines.line_no();
            if (parse_dimension(toks[0], ln) != n)
                throw InstanceError(ln, "section dimension disagrees with DIMENSION header");
            ++lines.next;
        }
    }
    auto m = read_matrix(lines, n);
    expect_end(lines);
    return Instance(std::move(name), n, std::move(m));
}

inline Instance parse_soplib(std::string_view text, std::string name) {
    Lines lines(text);
    if (!lines.skip_blank()) throw InstanceError(0, "empty file");
    const auto ln = lines.line_no();
    const auto toks = split_ws(lines.text[lines.next++]);
    if (toks.size() != 1) throw InstanceError(ln, "malformed header: expected the dimension alone");
    const auto n = parse_dimension(toks[0], ln);
    auto m = read_matrix(lines, n);
    expect_end(lines);
    return Instance(std::move(name), n, std::move(m));
}

}  // namespace detail

/// Parses an instance in the declared format. `name` is used when the
/// format carries none (SOPLIB) or the header omits NAME.
inline Instance parse_instance(std::string_view text, InstanceFormat format, std::string name = {}) {
    return format == InstanceFormat::tsplib_sop ? detail::parse_tsplib(text, std::move(name))
                                                : detail::parse_soplib(text, std::move(name));
}

/// TSPLIB files open with a `KEY: value` header; SOPLIB files with a bare number.
inline InstanceFormat detect_format(std::string_view text) {
    detail::Lines lines(text);
    if (!lines.skip_blank()) return InstanceFormat::soplib;
    const auto first = detail::trim(lines.text[lines.next]);
    const auto c = first.front();
    return (c >= '0' && c <= '9') ? InstanceFormat::soplib : InstanceFormat::tsplib_sop;
}

inline Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InstanceError(0, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    auto stem = path.filename().string();
    if (stem.ends_with(".sop")) stem.resize(stem.size() - 4);
    return parse_instance(text, detect_format(text), stem);
}

/// Writes an instance back in the given format; parse_instance on the
/// result reproduces the instance.
inline std::string serialize_instance(const Instance& inst, InstanceFormat format) {
    std::ostringstream out;
    const auto n = inst.size();
    if (format == InstanceFormat::tsplib_sop) {
        out << "NAME: " << inst.name() << "\n"
            << "TYPE: SOP\n"
            << "DIMENSION: " << n << "\n"
            << "EDGE_WEIGHT_TYPE: EXPLICIT\n"
            << "EDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
            << "EDGE_WEIGHT_SECTION\n";
    }
    out << n << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ' ';
            out << inst.matrix()[i * n + j];
        }
        out << "\n";
    }
    if (format == InstanceFormat::tsplib_sop) out << "EOF\n";
    return out.str();
}

struct Violation {
    enum class Kind { cycle, convention, diagonal };
    Kind kind;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    /// True when no hard violation (cycle, diagonal) is present;
    /// convention entries are warnings.
    bool feasible() const noexcept {
        return std::none_of(violations.begin(), violations.end(),
                            [](const Violation& v) { return v.kind != Violation::Kind::convention; });
    }
};

/// Checks acyclicity of the file relation, the start/final conventions
/// (as warnings) and zero diagonal. Never throws.
inline ValidationReport validate(const Instance& inst) {
    ValidationReport report;
    const auto n = inst.size();
    for (std::size_t u = 0; u < n; ++u) {
        const auto node = static_cast<Node>(u);
        if (inst.raw_successors(node).contains(node)) {
            report.violations.push_back({Violation::Kind::cycle, "node " + std::to_string(u) + " lies on a precedence cycle"});
        }
    }
    const auto s = inst.start();
    const auto f = inst.final_node();
    for (std::size_t v = 0; v < n; ++v) {
        const auto node = static_cast<Node>(v);
        if (node != s && !inst.raw_successors(s).contains(node))
            report.violations.push_back({Violation::Kind::convention,
                                         "start is not required to precede node " + std::to_string(v)});
        if (node != f && !inst.raw_successors(node).contains(f))
            report.violations.push_back({Violation::Kind::convention,
                                         "node " + std::to_string(v) + " is not required to precede final"});
        if (inst.cost(node, node) != 0)
            report.violations.push_back({Violation::Kind::diagonal,
                                         "diagonal entry " + std::to_string(v) + " is not zero"});
    }
    return report;
}

/// All nodes that `u` must precede, in increasing order.
inline std::vector<Node> transitive_successors(const Instance& inst, Node u) {
    if (u < 0 || static_cast<std::size_t>(u) >= inst.size())
        throw std::out_of_range("node " + std::to_string(u) + " out of range");
    return inst.successors_closure(u);
}

}  // namespace sop
