#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "polytree/cumulants.hpp"
#include "polytree/model.hpp"
#include "polytree/rng.hpp"
#include "polytree/skeleton.hpp"

namespace polytree {

enum class ErrorFamily { Gamma, Uniform, Gaussian };

[[nodiscard]] std::string_view to_string(ErrorFamily family) noexcept;
[[nodiscard]] ErrorFamily parse_error_family(std::string_view token);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

// How per-node error distributions are drawn. Parameter ranges default to the
// published experimental protocol.
struct ErrorSpec {
    ErrorFamily family = ErrorFamily::Gamma;
    double gaussian_fraction = 0.0;
    Range gamma_shape{0.5, 5.0};
    Range gamma_scale{0.5, 5.0};
    Range uniform_lower{-10.0, -1.0};
    Range uniform_upper{1.0, 10.0};
    Range gaussian_variance{0.5, 5.0};

    // Throws InvalidArgument on empty/invalid ranges or a fraction outside [0, 1].
    void validate() const;
};

// One node's error distribution. Parameters: gamma (shape, scale), uniform
// (lower, upper), gaussian (mean, variance).
struct NodeError {
    ErrorFamily family = ErrorFamily::Gaussian;
    double first = 0.0;
    double second = 1.0;

    [[nodiscard]] double mean() const noexcept;
    [[nodiscard]] double variance() const noexcept { return cumulant(2); }
    // Exact cumulant of order k in 2..4.
    [[nodiscard]] double cumulant(int k) const;
    [[nodiscard]] double draw(Rng& rng) const;
};

// Draws node parameters once per model. round(fraction * p) nodes, chosen
// uniformly, become Gaussian with the mean and variance their family draw
// would have had.
[[nodiscard]] std::vector<NodeError> draw_node_errors(std::size_t p, const ErrorSpec& spec, std::uint64_t seed);

// Standard Pruefer decoding of a length p - 2 sequence over [0, p).
[[nodiscard]] std::vector<UndirectedEdge> decode_prufer(std::span<const Vertex> sequence, std::size_t p);

// Uniform labelled tree on p >= 2 vertices.
[[nodiscard]] UndirectedTree random_tree(std::size_t p, std::uint64_t seed);

// Orients each edge by a fair coin and draws lambda uniformly from
// (-1, -0.3) U (0.3, 1).
[[nodiscard]] DirectedTree random_polytree(const UndirectedTree& tree, std::uint64_t seed);

[[nodiscard]] PolytreeModel model_with_errors(const DirectedTree& structure, std::span<const NodeError> errors,
                                              int max_order = 4);

// X_j = sum_{parents} lambda X_parent + eps_j in topological order. Each
// node's errors come from their own substream, so output does not depend on
// the evaluation order.
[[nodiscard]] Dataset sample_dataset(const DirectedTree& structure, std::span<const NodeError> errors,
                                     std::size_t n, std::uint64_t seed, bool center_errors = false);

} // namespace polytree
