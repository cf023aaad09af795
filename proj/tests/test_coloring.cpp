#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "ontics/coloring.hpp"
#include "ontics/quantum.hpp"

using namespace ontics;
using namespace ontics::coloring;

namespace {

const std::string kDataDir = ONTICS_DATA_DIR;

RaySet basis_rays() {
    return parse_ray_set_text("1 0 0\n0 1 0\n0 0 1\n");
}

std::vector<Coloring> sorted(std::vector<Coloring> cs) {
    std::sort(cs.begin(), cs.end(),
              [](const Coloring& a, const Coloring& b) { return a.colors < b.colors; });
    return cs;
}

// Random graph over n vertices with the given edge probability, shaped like
// build_graph output so the searcher can run on it directly.
OrthogonalityGraph random_graph(int n, double p, Rng& rng) {
    OrthogonalityGraph g;
    g.n = n;
    g.adjacency.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < p) {
                g.edges.emplace_back(i, j);
                g.adjacency[i].push_back(j);
                g.adjacency[j].push_back(i);
            }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

}  // namespace

TEST_CASE("ray set parsing handles comments, labels and complex components") {
    RaySet rs = parse_ray_set_text(
        "# header comment\n"
        "\n"
        "1 0 0   # axis\n"
        "0 0.70710678118654752+0.0i 0.70710678118654757i\n");
    REQUIRE(rs.size() == 2);
    REQUIRE(rs.dim() == 3);
    REQUIRE(rs.labels[0] == "r0");
    REQUIRE(rs.labels[1] == "r1");
    REQUIRE(std::abs(rs.rays[1](1) - std::complex<double>(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    REQUIRE(std::abs(rs.rays[1](2) - std::complex<double>(0.0, 1.0 / std::sqrt(2.0))) < 1e-15);

    RaySet neg = parse_ray_set_text("0.6-0.8i 0\n0.5+0.5i 0.5-0.5i\n0+i 0\n0-i 0\n");
    REQUIRE(std::abs(neg.rays[0](0) - std::complex<double>(0.6, -0.8)) < 1e-15);
    REQUIRE(std::abs(neg.rays[1](0) - std::complex<double>(0.5, 0.5)) < 1e-15);
    REQUIRE(std::abs(neg.rays[1](1) - std::complex<double>(0.5, -0.5)) < 1e-15);
    REQUIRE(std::abs(neg.rays[2](0) - std::complex<double>(0.0, 1.0)) < 1e-15);
    REQUIRE(std::abs(neg.rays[3](0) - std::complex<double>(0.0, -1.0)) < 1e-15);

    REQUIRE(parse_ray_set_text("# only comments\n").size() == 0);
}

TEST_CASE("ray set parsing reports the offending line") {
    try {
        parse_ray_set_text("1 0 0\n0 1 0\n0 0\n");
        FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
        REQUIRE(std::string(e.what()).find("line 3") != std::string::npos);
    }

    REQUIRE_THROWS_AS(parse_ray_set_text("0.5 0 0\n"), std::invalid_argument);   // not unit
    REQUIRE_THROWS_AS(parse_ray_set_text("1 0 zebra\n"), std::invalid_argument); // bad number
    REQUIRE_THROWS_AS(parse_ray_set_text("1\n"), std::invalid_argument);         // dim < 2
    REQUIRE_THROWS_AS(parse_ray_set_text("1 0 i+\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(load_ray_set(kDataDir + "/does_not_exist.rays"), std::runtime_error);
}

TEST_CASE("orthogonality graphs follow the inner products") {
    OrthogonalityGraph tri = build_graph(basis_rays());
    REQUIRE(tri.n == 3);
    REQUIRE(tri.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
    REQUIRE(tri.adjacent(0, 2));
    REQUIRE(!tri.adjacent(0, 0));

    // e1, e2 and their diagonal: only the basis pair is orthogonal.
    RaySet mixed = parse_ray_set_text(
        "1 0\n0 1\n0.70710678118654752 0.70710678118654752\n");
    REQUIRE(std::abs(mixed.rays[0].dot(mixed.rays[1])) < 1e-15);
    REQUIRE(std::abs(mixed.rays[0].dot(mixed.rays[2])) > 0.5);
    OrthogonalityGraph g = build_graph(mixed, 1e-9);
    REQUIRE(g.edges == std::vector<std::pair<int, int>>{{0, 1}});

    REQUIRE_THROWS_AS(build_graph(basis_rays(), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_graph(basis_rays(), 0.2), std::invalid_argument);

    RaySet dup = parse_ray_set_text("1 0 0\n1 0 0\n");
    REQUIRE_THROWS_AS(build_graph(dup), std::invalid_argument);
    RaySet phase_dup = parse_ray_set_text("1 0\n0+i 0\n");
    REQUIRE_THROWS_AS(build_graph(phase_dup), std::invalid_argument);
}

TEST_CASE("the graph is invariant under phases, sign flips and unitaries") {
    RaySet rs = load_ray_set(kDataDir + "/two_bases_shared.rays");
    OrthogonalityGraph base = build_graph(rs);

    RaySet flipped = rs;
    Rng rng(211);
    for (auto& v : flipped.rays) v *= std::polar(1.0, 2.0 * M_PI * rng.uniform());
    REQUIRE(build_graph(flipped).edges == base.edges);

    RaySet rotated = rs;
    CMatrix u = random_unitary(rng, rs.dim());
    for (auto& v : rotated.rays) v = u * v;
    REQUIRE(build_graph(rotated).edges == base.edges);
}

TEST_CASE("triad enumeration finds complete orthogonal triples") {
    OrthogonalityGraph tri = build_graph(basis_rays());
    std::vector<Triad> ts = enumerate_triads(tri);
    REQUIRE(ts.size() == 1);
    REQUIRE(ts[0] == Triad{{0, 1, 2}});

    RaySet shared = load_ray_set(kDataDir + "/two_bases_shared.rays");
    OrthogonalityGraph g = build_graph(shared);
    std::vector<Triad> ts2 = enumerate_triads(g);
    REQUIRE(ts2.size() == 2);
    REQUIRE(ts2[0] == Triad{{0, 1, 2}});
    REQUIRE(ts2[1] == Triad{{0, 3, 4}});
    REQUIRE(contextual_witness(g, ts2) == std::vector<int>{0});
    REQUIRE(contextual_witness(tri, ts).empty());

    RaySet sparse = parse_ray_set_text("1 0 0\n0 1 0\n");
    OrthogonalityGraph pair = build_graph(sparse);
    REQUIRE(enumerate_triads(pair).empty());
}

TEST_CASE("coloring validation names each violated constraint") {
    OrthogonalityGraph tri = build_graph(basis_rays());
    std::vector<Triad> ts = enumerate_triads(tri);

    REQUIRE(validate_coloring(tri, ts, {{Color::Green, Color::Red, Color::Red}}).empty());

    auto wrong_size = validate_coloring(tri, ts, {{Color::Green}});
    REQUIRE(wrong_size.size() == 1);
    REQUIRE(wrong_size[0].constraint == "totality");

    auto all_red = validate_coloring(tri, ts, {{Color::Red, Color::Red, Color::Red}});
    REQUIRE(all_red.size() == 1);
    REQUIRE(all_red[0].constraint == "triad-one-green");
    REQUIRE(all_red[0].vertices == std::vector<int>{0, 1, 2});

    auto two_green = validate_coloring(tri, ts, {{Color::Green, Color::Green, Color::Red}});
    bool saw_triad = false, saw_edge = false;
    for (const auto& v : two_green) {
        saw_triad = saw_triad || v.constraint == "triad-one-green";
        saw_edge = saw_edge || v.constraint == "edge-both-green";
    }
    REQUIRE(saw_triad);
    REQUIRE(saw_edge);
}

TEST_CASE("the basis triangle has exactly the three one-green colorings") {
    RaySet rs = load_ray_set(kDataDir + "/basis3.rays");
    REQUIRE(rs.size() == 3);
    OrthogonalityGraph g = build_graph(rs);
    std::vector<Triad> ts = enumerate_triads(g);
    REQUIRE(g.edges.size() == 3);
    REQUIRE(ts.size() == 1);

    std::vector<Coloring> expected{{{Color::Green, Color::Red, Color::Red}},
                                   {{Color::Red, Color::Green, Color::Red}},
                                   {{Color::Red, Color::Red, Color::Green}}};

    SearchResult res = search_coloring(g, ts, true);
    REQUIRE(res.satisfiable);
    REQUIRE(res.explored_nodes > 0);
    REQUIRE(sorted(res.solutions) == sorted(expected));
    REQUIRE(sorted(brute_force_colorings(g, ts)) == sorted(expected));

    SearchResult first = search_coloring(g, ts, false);
    REQUIRE(first.satisfiable);
    REQUIRE(first.coloring.has_value());
    REQUIRE(validate_coloring(g, ts, *first.coloring).empty());
    REQUIRE(first.solutions.empty());
}

TEST_CASE("the 33-ray set admits no coloring at all") {
    RaySet rs = load_ray_set(kDataDir + "/peres33.rays");
    REQUIRE(rs.size() == 33);
    REQUIRE(rs.dim() == 3);
    OrthogonalityGraph g = build_graph(rs);
    std::vector<Triad> ts = enumerate_triads(g);
    REQUIRE(g.edges.size() == 72);
    REQUIRE(ts.size() == 16);
    REQUIRE(!contextual_witness(g, ts).empty());

    SearchResult res = search_coloring(g, ts, false);
    REQUIRE(!res.satisfiable);
    REQUIRE(!res.coloring.has_value());
    REQUIRE(res.explored_nodes > 0);
}

TEST_CASE("search agrees with brute force on random graphs") {
    for (int t = 0; t < 50; ++t) {
        Rng rng(mix_seed(223, t));
        int n = 4 + static_cast<int>(rng.below(12));
        OrthogonalityGraph g = random_graph(n, 0.3, rng);
        std::vector<Triad> ts = enumerate_triads(g);

        std::vector<Coloring> brute = brute_force_colorings(g, ts);
        SearchResult res = search_coloring(g, ts, true);

        REQUIRE(res.satisfiable == !brute.empty());
        REQUIRE(sorted(res.solutions) == sorted(brute));
        for (const auto& c : res.solutions) REQUIRE(validate_coloring(g, ts, c).empty());
    }

    OrthogonalityGraph big;
    big.n = 26;
    big.adjacency.assign(26, {});
    REQUIRE_THROWS_AS(brute_force_colorings(big, {}), std::invalid_argument);

    // An empty instance is trivially satisfiable by the all-red coloring.
    OrthogonalityGraph empty;
    SearchResult res = search_coloring(empty, {}, true);
    REQUIRE(res.satisfiable);
    REQUIRE(res.solutions.size() == 1);
}
