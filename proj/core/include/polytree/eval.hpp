#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "polytree/graph.hpp"
#include "polytree/orient.hpp"

namespace polytree {

struct ShdReport {
    std::size_t p = 0;
    std::size_t included = 0;    // in the learned skeleton only
    std::size_t omitted = 0;     // in the true skeleton only
    std::size_t misoriented = 0; // shared skeleton edge, opposite direction
    std::size_t shared = 0;      // shared skeleton edges
    double normalized = 0.0;     // (included + omitted + misoriented) / (2 (p - 1))
    // Errors (included or misoriented) attributed to the learned edge's
    // provenance, indexed by Provenance.
    std::array<std::size_t, 3> errors_by_provenance{};

    [[nodiscard]] std::size_t skeleton_errors() const noexcept { return included + omitted; }
    // Fraction of shared skeleton edges oriented correctly; 1 when none shared.
    [[nodiscard]] double orientation_accuracy() const noexcept;
};

// Throws InvalidArgument when the vertex counts differ.
[[nodiscard]] ShdReport structural_hamming(std::size_t p, const std::vector<DirectedEdge>& truth,
                                           const LearnedGraph& learned);

} // namespace polytree
