#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <charconv>
#include <complex>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ontics::coloring {

inline constexpr double kOrthoTolDefault = 1e-9;
inline constexpr double kDuplicateOverlap = 1.0 - 1e-10;
inline constexpr double kRayNormTol = 1e-10;

// A finite list of unit rays, all of one dimension.
struct RaySet {
    std::vector<Eigen::VectorXcd> rays;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(rays.size()); }
    int dim() const { return rays.empty() ? 0 : static_cast<int>(rays.front().size()); }
};

namespace detail {

inline double parse_real(std::string_view sv, int line_no) {
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
    if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty())
        throw std::invalid_argument("ray set line " + std::to_string(line_no) + ": bad number '" +
                                    std::string(sv) + "'");
    return out;
}

// "x", "x+yi", "x-yi", or "yi".
inline std::complex<double> parse_component(std::string_view tok, int line_no) {
    if (tok.empty())
        throw std::invalid_argument("ray set line " + std::to_string(line_no) +
                                    ": empty component");
    if (tok.back() != 'i') return {parse_real(tok, line_no), 0.0};
    std::string_view body = tok.substr(0, tok.size() - 1);
    if (body.empty())
        throw std::invalid_argument("ray set line " + std::to_string(line_no) +
                                    ": bad complex component '" + std::string(tok) + "'");
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        char c = body[i];
        if ((c == '+' || c == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string_view::npos) return {0.0, parse_real(body, line_no)};
    double re = parse_real(body.substr(0, split), line_no);
    std::string_view im = body.substr(split);
    if (im == "+") return {re, 1.0};
    if (im == "-") return {re, -1.0};
    return {re, parse_real(im, line_no)};
}

}  // namespace detail

// One ray per line, components separated by whitespace, '#' starts a
// comment. Components may be complex, written as re+imi.
inline RaySet parse_ray_set(std::istream& in) {
    RaySet rs;
    std::string line;
    int line_no = 0;
    int dim = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (dim < 0) {
            dim = static_cast<int>(toks.size());
            if (dim < 2)
                throw std::invalid_argument("ray set line " + std::to_string(line_no) +
                                            ": rays need at least two components");
        }
        if (static_cast<int>(toks.size()) != dim)
            throw std::invalid_argument("ray set line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(dim) + " components, got " +
                                        std::to_string(toks.size()));
        Eigen::VectorXcd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = detail::parse_component(toks[i], line_no);
        if (std::abs(v.norm() - 1.0) > kRayNormTol)
            throw std::invalid_argument("ray set line " + std::to_string(line_no) +
                                        ": ray is not unit length");
        rs.rays.push_back(std::move(v));
        rs.labels.push_back("r" + std::to_string(rs.rays.size() - 1));
    }
    return rs;
}

inline RaySet parse_ray_set_text(const std::string& text) {
    std::istringstream s(text);
    return parse_ray_set(s);
}

inline RaySet load_ray_set(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open ray set file: " + path);
    return parse_ray_set(f);
}

// Vertices are ray indices; an edge joins orthogonal rays.
struct OrthogonalityGraph {
    int n = 0;
    double tolerance = kOrthoTolDefault;
    std::vector<std::pair<int, int>> edges;      // i < j, lexicographic
    std::vector<std::vector<int>> adjacency;     // sorted neighbor lists

    bool adjacent(int i, int j) const {
        const auto& a = adjacency.at(i);
        return std::binary_search(a.begin(), a.end(), j);
    }
};

inline OrthogonalityGraph build_graph(const RaySet& rays, double tol = kOrthoTolDefault) {
    if (!(tol > 0.0) || tol > 0.1)
        throw std::invalid_argument("build_graph: tolerance must be in (0, 0.1]");
    OrthogonalityGraph g;
    g.n = rays.size();
    g.tolerance = tol;
    g.adjacency.assign(g.n, {});
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            double ov = std::abs(rays.rays[i].dot(rays.rays[j]));
            if (ov > kDuplicateOverlap)
                throw std::invalid_argument("build_graph: rays " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are the same ray");
            if (ov <= tol) {
                g.edges.emplace_back(i, j);
                g.adjacency[i].push_back(j);
                g.adjacency[j].push_back(i);
            }
        }
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

// Three mutually adjacent vertices: a full orthogonal triple.
struct Triad {
    std::array<int, 3> v{};
    bool operator==(const Triad&) const = default;
};

inline std::vector<Triad> enumerate_triads(const OrthogonalityGraph& g) {
    std::vector<Triad> out;
    for (auto [i, j] : g.edges)
        for (int k : g.adjacency[j])
            if (k > j && g.adjacent(i, k)) out.push_back({{i, j, k}});
    std::sort(out.begin(), out.end(),
              [](const Triad& a, const Triad& b) { return a.v < b.v; });
    return out;
}

enum class Color : unsigned char { Red = 0, Green = 1 };

// Total assignment: one color per vertex.
struct Coloring {
    std::vector<Color> colors;

    int size() const { return static_cast<int>(colors.size()); }
    bool operator==(const Coloring&) const = default;
};

struct Violation {
    std::string constraint;  // "totality" | "triad-one-green" | "edge-both-green"
    std::vector<int> vertices;
};

// Checks the three coloring rules; an empty result means the coloring is
// valid.
inline std::vector<Violation> validate_coloring(const OrthogonalityGraph& g,
                                                const std::vector<Triad>& triads,
                                                const Coloring& c) {
    std::vector<Violation> out;
    if (c.size() != g.n) {
        out.push_back({"totality", {}});
        return out;
    }
    for (const auto& t : triads) {
        int greens = 0;
        for (int w : t.v) greens += c.colors[w] == Color::Green ? 1 : 0;
        if (greens != 1) out.push_back({"triad-one-green", {t.v[0], t.v[1], t.v[2]}});
    }
    for (auto [i, j] : g.edges)
        if (c.colors[i] == Color::Green && c.colors[j] == Color::Green)
            out.push_back({"edge-both-green", {i, j}});
    return out;
}

struct SearchResult {
    bool satisfiable = false;
    std::optional<Coloring> coloring;   // first solution found
    std::vector<Coloring> solutions;    // all solutions, when enumerating
    long long explored_nodes = 0;       // branch decisions taken
};

namespace detail {

enum class Mark : unsigned char { Unset, Red, Green };

class Searcher {
public:
    Searcher(const OrthogonalityGraph& g, const std::vector<Triad>& triads, bool enumerate_all)
        : g_(g), triads_(triads), enumerate_(enumerate_all), mark_(g.n, Mark::Unset),
          triads_of_(g.n) {
        for (std::size_t t = 0; t < triads.size(); ++t)
            for (int w : triads[t].v) triads_of_[w].push_back(static_cast<int>(t));
    }

    SearchResult run() {
        dfs(0);
        return std::move(result_);
    }

private:
    // Assign and propagate consequences: a green vertex reddens its
    // neighbors, and a triad reduced to two reds forces the third green
    // (all three red is a conflict). Returns false on contradiction.
    bool propagate(int v0, Mark m0) {
        queue_.clear();
        queue_.push_back({v0, m0});
        while (!queue_.empty()) {
            auto [v, m] = queue_.back();
            queue_.pop_back();
            if (mark_[v] == m) continue;
            if (mark_[v] != Mark::Unset) return false;
            mark_[v] = m;
            trail_.push_back(v);
            if (m == Mark::Green)
                for (int u : g_.adjacency[v]) queue_.push_back({u, Mark::Red});
            for (int t : triads_of_[v]) {
                int reds = 0, greens = 0, unset = -1;
                for (int w : triads_[t].v) {
                    if (mark_[w] == Mark::Red) ++reds;
                    else if (mark_[w] == Mark::Green) ++greens;
                    else unset = w;
                }
                if (greens == 0 && reds == 3) return false;
                if (greens == 0 && reds == 2 && unset >= 0)
                    queue_.push_back({unset, Mark::Green});
            }
        }
        return true;
    }

    void undo(std::size_t trail_mark) {
        while (trail_.size() > trail_mark) {
            mark_[trail_.back()] = Mark::Unset;
            trail_.pop_back();
        }
    }

    // Returns true when the search should stop early.
    bool dfs(int from) {
        int v = from;
        while (v < g_.n && mark_[v] != Mark::Unset) ++v;
        if (v == g_.n) {
            record_solution();
            return !enumerate_;
        }
        for (Mark m : {Mark::Green, Mark::Red}) {
            ++result_.explored_nodes;
            std::size_t t0 = trail_.size();
            if (propagate(v, m) && dfs(v + 1)) return true;
            undo(t0);
        }
        return false;
    }

    void record_solution() {
        Coloring c;
        c.colors.resize(g_.n);
        for (int i = 0; i < g_.n; ++i)
            c.colors[i] = mark_[i] == Mark::Green ? Color::Green : Color::Red;
        result_.satisfiable = true;
        if (!result_.coloring) result_.coloring = c;
        if (enumerate_) result_.solutions.push_back(std::move(c));
    }

    const OrthogonalityGraph& g_;
    const std::vector<Triad>& triads_;
    bool enumerate_;
    std::vector<Mark> mark_;
    std::vector<std::vector<int>> triads_of_;
    std::vector<int> trail_;
    std::vector<std::pair<int, Mark>> queue_;
    SearchResult result_;
};

}  // namespace detail

// Complete backtracking search. Branches green-then-red on the lowest
// undecided vertex; exploration order is deterministic. With enumerate_all
// the full solution set is returned.
inline SearchResult search_coloring(const OrthogonalityGraph& g, const std::vector<Triad>& triads,
                                    bool enumerate_all = false) {
    return detail::Searcher(g, triads, enumerate_all).run();
}

// Reference enumeration over all 2^n assignments, for small graphs.
inline std::vector<Coloring> brute_force_colorings(const OrthogonalityGraph& g,
                                                   const std::vector<Triad>& triads) {
    if (g.n > 25) throw std::invalid_argument("brute_force_colorings: graph too large");
    std::vector<Coloring> out;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << g.n); ++bits) {
        Coloring c;
        c.colors.resize(g.n);
        for (int i = 0; i < g.n; ++i)
            c.colors[i] = (bits >> i) & 1 ? Color::Green : Color::Red;
        if (validate_coloring(g, triads, c).empty()) out.push_back(std::move(c));
    }
    return out;
}

// Vertices shared by two or more triads: the places where a value
// assignment could depend on which triad is being measured.
inline std::vector<int> contextual_witness(const OrthogonalityGraph& g,
                                           const std::vector<Triad>& triads) {
    std::vector<int> count(g.n, 0);
    for (const auto& t : triads)
        for (int w : t.v) ++count[w];
    std::vector<int> out;
    for (int i = 0; i < g.n; ++i)
        if (count[i] >= 2) out.push_back(i);
    return out;
}

}  // namespace ontics::coloring
