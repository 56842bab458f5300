#include "polytree/simulate.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <string>

#include "polytree/error.hpp"

namespace polytree {

std::string_view to_string(ErrorFamily family) noexcept {
    switch (family) {
    case ErrorFamily::Gamma: return "gamma";
    case ErrorFamily::Uniform: return "uniform";
    case ErrorFamily::Gaussian: return "gaussian";
    }
    return "unknown";
}

ErrorFamily parse_error_family(std::string_view token) {
    if (token == "gamma") return ErrorFamily::Gamma;
    if (token == "uniform") return ErrorFamily::Uniform;
    if (token == "gaussian") return ErrorFamily::Gaussian;
    throw InvalidArgument("unknown error family '" + std::string(token) + "' (expected gamma, uniform or gaussian)");
}

void ErrorSpec::validate() const {
    auto check = [](Range r, bool positive, const char* what) {
        if (!(r.lo < r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi) || (positive && !(r.lo > 0.0)))
            throw InvalidArgument(std::string("invalid ") + what + " range");
    };
    check(gamma_shape, true, "gamma shape");
    check(gamma_scale, true, "gamma scale");
    check(uniform_lower, false, "uniform lower endpoint");
    check(uniform_upper, false, "uniform upper endpoint");
    check(gaussian_variance, true, "gaussian variance");
    if (!(uniform_lower.hi <= uniform_upper.lo)) throw InvalidArgument("uniform endpoint ranges overlap");
    if (!(gaussian_fraction >= 0.0 && gaussian_fraction <= 1.0))
        throw InvalidArgument("gaussian fraction must lie in [0, 1]");
}

double NodeError::mean() const noexcept {
    switch (family) {
    case ErrorFamily::Gamma: return first * second;
    case ErrorFamily::Uniform: return 0.5 * (first + second);
    case ErrorFamily::Gaussian: return first;
    }
    return 0.0;
}

double NodeError::cumulant(int k) const {
    if (k < 2 || k > 4) throw InvalidArgument("error cumulants are available for orders 2..4");
    switch (family) {
    case ErrorFamily::Gamma: {
        double factorial = 1.0;
        for (int f = 2; f < k; ++f) factorial *= f;
        return first * std::pow(second, k) * factorial;
    }
    case ErrorFamily::Uniform: {
        const double width = second - first;
        if (k == 2) return width * width / 12.0;
        if (k == 3) return 0.0;
        return -std::pow(width, 4) / 120.0;
    }
    case ErrorFamily::Gaussian:
        return k == 2 ? second : 0.0;
    }
    return 0.0;
}

double NodeError::draw(Rng& rng) const {
    switch (family) {
    case ErrorFamily::Gamma: return gamma_variate(rng, first, second);
    case ErrorFamily::Uniform: return uniform(rng, first, second);
    case ErrorFamily::Gaussian: return first + std::sqrt(second) * standard_normal(rng);
    }
    return 0.0;
}

std::vector<NodeError> draw_node_errors(std::size_t p, const ErrorSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng params(derive_seed(seed, {stream::kErrorParameters}));
    std::vector<NodeError> errors(p);
    for (auto& e : errors) {
        e.family = spec.family;
        switch (spec.family) {
        case ErrorFamily::Gamma:
            e.first = uniform(params, spec.gamma_shape.lo, spec.gamma_shape.hi);
            e.second = uniform(params, spec.gamma_scale.lo, spec.gamma_scale.hi);
            break;
        case ErrorFamily::Uniform:
            e.first = uniform(params, spec.uniform_lower.lo, spec.uniform_lower.hi);
            e.second = uniform(params, spec.uniform_upper.lo, spec.uniform_upper.hi);
            break;
        case ErrorFamily::Gaussian:
            e.first = 0.0;
            e.second = uniform(params, spec.gaussian_variance.lo, spec.gaussian_variance.hi);
            break;
        }
    }

    // A fixed random permutation per seed: the Gaussian node sets for
    // increasing fractions are nested.
    std::vector<Vertex> order(p);
    std::iota(order.begin(), order.end(), Vertex{0});
    Rng shuffle(derive_seed(seed, {stream::kGaussianNodes}));
    for (std::size_t i = p; i > 1; --i) std::swap(order[i - 1], order[uniform_index(shuffle, i)]);
    const auto gaussian = static_cast<std::size_t>(std::llround(spec.gaussian_fraction * static_cast<double>(p)));
    for (std::size_t r = 0; r < gaussian && r < p; ++r) {
        auto& e = errors[order[r]];
        e = NodeError{ErrorFamily::Gaussian, e.mean(), e.variance()};
    }
    return errors;
}

std::vector<UndirectedEdge> decode_prufer(std::span<const Vertex> sequence, std::size_t p) {
    if (p < 2) throw InvalidArgument("Pruefer decoding needs p >= 2");
    if (sequence.size() != p - 2)
        throw InvalidArgument("Pruefer sequence for p = " + std::to_string(p) + " must have length " +
                              std::to_string(p - 2));
    std::vector<std::size_t> degree(p, 1);
    for (const Vertex x : sequence) {
        if (x >= p) throw InvalidArgument("Pruefer label out of range");
        ++degree[x];
    }
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> leaves;
    for (Vertex v = 0; v < p; ++v)
        if (degree[v] == 1) leaves.push(v);

    std::vector<UndirectedEdge> edges;
    edges.reserve(p - 1);
    for (const Vertex x : sequence) {
        const Vertex leaf = leaves.top();
        leaves.pop();
        edges.push_back({leaf, x});
        if (--degree[x] == 1) leaves.push(x);
    }
    const Vertex a = leaves.top();
    leaves.pop();
    const Vertex b = leaves.top();
    edges.push_back({a, b});
    return edges;
}

UndirectedTree random_tree(std::size_t p, std::uint64_t seed) {
    if (p < 2) throw InvalidArgument("random tree needs p >= 2");
    Rng rng(derive_seed(seed, {stream::kTree}));
    std::vector<Vertex> sequence(p - 2);
    for (auto& x : sequence) x = static_cast<Vertex>(uniform_index(rng, p));
    UndirectedTree tree;
    tree.p = p;
    for (const auto& e : decode_prufer(sequence, p)) tree.edges.push_back({e.u, e.v, 0.0});
    return tree;
}

DirectedTree random_polytree(const UndirectedTree& tree, std::uint64_t seed) {
    Rng direction(derive_seed(seed, {stream::kOrientation}));
    Rng coefficient(derive_seed(seed, {stream::kCoefficients}));
    std::vector<WeightedDirectedEdge> edges;
    edges.reserve(tree.edges.size());
    for (const auto& e : tree.edges) {
        const bool forward = coin(direction);
        double magnitude = 0.0;
        do {
            magnitude = uniform(coefficient, 0.3, 1.0);
        } while (magnitude <= 0.3);
        const double lambda = coin(coefficient) ? magnitude : -magnitude;
        edges.push_back(forward ? WeightedDirectedEdge{e.u, e.v, lambda} : WeightedDirectedEdge{e.v, e.u, lambda});
    }
    return DirectedTree(tree.p, std::move(edges));
}

PolytreeModel model_with_errors(const DirectedTree& structure, std::span<const NodeError> errors, int max_order) {
    if (errors.size() != structure.size()) throw InvalidArgument("one error distribution per vertex required");
    if (max_order < 2 || max_order > 4) throw InvalidArgument("error cumulants are available for orders 2..4");
    ErrorCumulants cumulants(structure.size(), max_order);
    for (Vertex v = 0; v < structure.size(); ++v)
        for (int k = 2; k <= max_order; ++k) cumulants.at(v, k) = errors[v].cumulant(k);
    return PolytreeModel(structure, std::move(cumulants));
}

Dataset sample_dataset(const DirectedTree& structure, std::span<const NodeError> errors, std::size_t n,
                       std::uint64_t seed, bool center_errors) {
    if (n == 0) throw InvalidArgument("sample size must be positive");
    if (errors.size() != structure.size()) throw InvalidArgument("one error distribution per vertex required");
    const std::size_t p = structure.size();
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (const Vertex v : structure.topological_order()) {
        Rng rng(derive_seed(seed, {stream::kErrors, v}));
        const double shift = center_errors ? errors[v].mean() : 0.0;
        auto column = x.col(static_cast<Eigen::Index>(v));
        for (Eigen::Index s = 0; s < column.size(); ++s) column(s) = errors[v].draw(rng) - shift;
        for (const auto& [parent, lambda] : structure.parents(v))
            column += lambda * x.col(static_cast<Eigen::Index>(parent));
    }
    std::vector<std::string> names(p);
    for (std::size_t v = 0; v < p; ++v) names[v] = "X" + std::to_string(v);
    return Dataset(std::move(x), std::move(names));
}

} // namespace polytree
