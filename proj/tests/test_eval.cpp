#include <doctest.h>

#include "polytree/error.hpp"
#include "polytree/eval.hpp"
#include "support.hpp"

using namespace polytree;

namespace {

LearnedGraph learned_from(std::size_t p, const std::vector<DirectedEdge>& edges,
                          Provenance provenance = Provenance::RankTest) {
    LearnedGraph g;
    g.p = p;
    for (const auto& e : edges) g.edges.push_back({e, provenance});
    return g;
}

std::vector<DirectedEdge> chain(std::size_t p) {
    std::vector<DirectedEdge> edges;
    for (Vertex v = 0; v + 1 < p; ++v) edges.push_back({v, v + 1});
    return edges;
}

} // namespace

TEST_CASE("identical graphs score zero") {
    const auto truth = chain(6);
    const auto r = structural_hamming(6, truth, learned_from(6, truth));
    CHECK(r.normalized == 0.0);
    CHECK(r.shared == 5);
    CHECK(r.orientation_accuracy() == 1.0);
}

TEST_CASE("one reversed edge in a chain of five") {
    auto learned = chain(5);
    learned[2] = learned[2].reversed();
    const auto r = structural_hamming(5, chain(5), learned_from(5, learned, Provenance::Propagation));
    CHECK(r.misoriented == 1);
    CHECK(r.included == 0);
    CHECK(r.omitted == 0);
    CHECK(r.normalized == doctest::Approx(0.125));
    CHECK(r.errors_by_provenance[static_cast<std::size_t>(Provenance::Propagation)] == 1);
    CHECK(r.orientation_accuracy() == doctest::Approx(0.75));
}

TEST_CASE("disjoint skeletons score one") {
    // Path 0-1-2-3 against star centred at 0 with edges {0,2}... share 0-1, so
    // use the path 1-3-0-2, which shares no edge with 0-1-2-3.
    const std::vector<DirectedEdge> truth{{0, 1}, {1, 2}, {2, 3}};
    const std::vector<DirectedEdge> other{{1, 3}, {3, 0}, {0, 2}};
    const auto r = structural_hamming(4, truth, learned_from(4, other));
    CHECK(r.included == 3);
    CHECK(r.omitted == 3);
    CHECK(r.misoriented == 0);
    CHECK(r.normalized == doctest::Approx(1.0));
    CHECK(r.skeleton_errors() == 6);
}

TEST_CASE("fully reversed tree scores one half") {
    std::vector<DirectedEdge> reversed;
    for (const auto& e : chain(9)) reversed.push_back(e.reversed());
    CHECK(structural_hamming(9, chain(9), learned_from(9, reversed)).normalized == doctest::Approx(0.5));
}

TEST_CASE("symmetric in truth and learned") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t p = 3 + seed % 12;
        const auto a = random_polytree(random_tree(p, seed), seed).directed_edges();
        const auto b = random_polytree(random_tree(p, seed + 500), seed + 500).directed_edges();
        const auto ab = structural_hamming(p, a, learned_from(p, b));
        const auto ba = structural_hamming(p, b, learned_from(p, a));
        CHECK(ab.included + ab.omitted == ba.included + ba.omitted);
        CHECK(ab.misoriented == ba.misoriented);
        CHECK(ab.normalized == ba.normalized);
        CHECK(ab.normalized >= 0.0);
        CHECK(ab.normalized <= 1.0);
        CHECK(structural_hamming(p, a, learned_from(p, a)).normalized == 0.0);
        std::vector<DirectedEdge> flipped = a;
        flipped[seed % flipped.size()] = flipped[seed % flipped.size()].reversed();
        CHECK(structural_hamming(p, a, learned_from(p, flipped)).normalized > 0.0);
    }
}

TEST_CASE("unresolved edges") {
    LearnedGraph g = learned_from(4, {{0, 1}, {1, 2}});
    g.unresolved = {{2, 3}};
    auto r = structural_hamming(4, chain(4), g);
    CHECK(r.misoriented == 1);
    CHECK(r.omitted == 0);
    CHECK(r.normalized == doctest::Approx(1.0 / 6.0));
    g.unresolved = {{0, 3}};
    r = structural_hamming(4, chain(4), g);
    CHECK(r.included == 1);
    CHECK(r.omitted == 1);
}

TEST_CASE("vertex mismatch") {
    CHECK_THROWS_AS(structural_hamming(5, chain(5), learned_from(4, chain(4))), InvalidArgument);
    CHECK_THROWS_AS(structural_hamming(3, chain(5), learned_from(3, chain(3))), InvalidArgument);
}
