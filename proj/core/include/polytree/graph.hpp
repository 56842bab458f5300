#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace polytree {

using Vertex = std::uint32_t;

struct UndirectedEdge {
    Vertex u = 0;
    Vertex v = 0;

    // Canonical form with u < v.
    [[nodiscard]] UndirectedEdge normalized() const noexcept {
        return u < v ? *this : UndirectedEdge{v, u};
    }
    friend bool operator==(const UndirectedEdge& a, const UndirectedEdge& b) noexcept {
        const auto x = a.normalized();
        const auto y = b.normalized();
        return x.u == y.u && x.v == y.v;
    }
};

struct DirectedEdge {
    Vertex from = 0;
    Vertex to = 0;

    [[nodiscard]] DirectedEdge reversed() const noexcept { return {to, from}; }
    [[nodiscard]] UndirectedEdge undirected() const noexcept { return {from, to}; }
    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

// Key for hashing/sorting an unordered pair.
[[nodiscard]] inline std::uint64_t pair_key(Vertex a, Vertex b) noexcept {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// True iff `edges` forms a spanning tree on vertices [0, p).
[[nodiscard]] bool is_spanning_tree(std::size_t p, const std::vector<UndirectedEdge>& edges);

// Adjacency lists for an edge set on [0, p).
[[nodiscard]] std::vector<std::vector<Vertex>> adjacency(std::size_t p,
                                                         const std::vector<UndirectedEdge>& edges);

} // namespace polytree
