#include "polytree/orient.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "polytree/error.hpp"
#include "polytree/parallel.hpp"

namespace polytree {

std::string_view to_string(Provenance provenance) noexcept {
    switch (provenance) {
    case Provenance::RankTest: return "rank-test";
    case Provenance::ColliderTest: return "collider-test";
    case Provenance::Propagation: return "propagation";
    }
    return "unknown";
}

Provenance parse_provenance(std::string_view token) {
    if (token == "rank-test") return Provenance::RankTest;
    if (token == "collider-test") return Provenance::ColliderTest;
    if (token == "propagation") return Provenance::Propagation;
    throw InvalidArgument("unknown provenance '" + std::string(token) + "'");
}

std::string_view to_string(Algorithm algorithm) noexcept {
    switch (algorithm) {
    case Algorithm::Pairwise: return "pairwise";
    case Algorithm::Pto: return "pto";
    case Algorithm::Tpo: return "tpo";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view token) {
    if (token == "pairwise") return Algorithm::Pairwise;
    if (token == "pto") return Algorithm::Pto;
    if (token == "tpo") return Algorithm::Tpo;
    throw InvalidArgument("unknown algorithm '" + std::string(token) + "' (expected pairwise, pto or tpo)");
}

double MinorVector::norm() const noexcept {
    double sum = 0.0;
    for (const double v : values) sum += v * v;
    return std::sqrt(sum);
}

EdgeMomentMatrix build_moment_matrix(const PairCumulantTable& table, DirectedEdge direction, int max_order) {
    const bool along = direction.from == table.first() && direction.to == table.second();
    const bool against = direction.from == table.second() && direction.to == table.first();
    if (!along && !against)
        throw InvalidArgument("cumulant table for (" + std::to_string(table.first()) + ", " +
                              std::to_string(table.second()) + ") does not cover edge " +
                              std::to_string(direction.from) + "->" + std::to_string(direction.to));
    if (max_order < 2 || max_order > table.max_order())
        throw InvalidArgument("cumulant table stops at order " + std::to_string(table.max_order()) +
                              ", order " + std::to_string(max_order) + " requested");

    // c^{(from,to),k}_m read through the swap symmetry when needed.
    auto c = [&](int m, int k) { return along ? table.at(m, k) : table.at(k - m, k); };

    EdgeMomentMatrix out;
    out.direction = direction;
    out.max_order = max_order;
    out.values.resize(2, moment_columns(max_order));
    Eigen::Index col = 0;
    for (int k = 2; k <= max_order; ++k) {
        for (int m = 2; m <= k; ++m, ++col) {
            out.values(0, col) = c(m, k);
            out.values(1, col) = c(m - 1, k);
        }
    }
    return out;
}

MinorVector minor_vector(const EdgeMomentMatrix& matrix) {
    const auto& a = matrix.values;
    MinorVector out;
    out.direction = matrix.direction;
    out.values.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(a.cols() - 1, 0)));
    for (Eigen::Index c = 1; c < a.cols(); ++c) out.values.push_back(a(0, 0) * a(1, c) - a(1, 0) * a(0, c));
    return out;
}

PairCumulantTable PopulationProvider::pair_table(Vertex i, Vertex j, int max_order) const {
    return population_pair_cumulants(*model_, i, j, max_order);
}

double PopulationProvider::correlation(Vertex i, Vertex j) const { return model_->correlation(i, j); }

PairCumulantTable SampleProvider::pair_table(Vertex i, Vertex j, int max_order) const {
    return pair_cumulant_table(*data_, i, j, max_order);
}

double SampleProvider::correlation(Vertex i, Vertex j) const {
    if (corr_ != nullptr) return corr_->at(i, j);
    const double sij = k_statistic(*data_, i, j, 1, 2);
    const double sii = k_statistic(*data_, i, i, 2, 2);
    const double sjj = k_statistic(*data_, j, j, 2, 2);
    return std::clamp(sij / std::sqrt(sii * sjj), -1.0, 1.0);
}

namespace {

double largest_entry_squared(const EdgeMomentMatrix& m) {
    const double largest = m.values.cwiseAbs().maxCoeff();
    return largest * largest;
}

void validate(const OrientOptions& options, bool needs_threshold) {
    if (options.max_order < 3 || options.max_order > 4)
        throw InvalidArgument("unsupported cumulant order K = " + std::to_string(options.max_order) +
                              " (supported: 3, 4)");
    if (needs_threshold && options.mode == Mode::Sample && !(options.threshold > 0.0 && options.threshold < 1.0))
        throw InvalidArgument("independence threshold must lie in (0, 1)");
}

// Marginal independence of i and k as the algorithms use it.
bool declares_independent(const CumulantProvider& provider, Vertex i, Vertex k, const OrientOptions& options) {
    const double r = std::abs(provider.correlation(i, k));
    return options.mode == Mode::Population ? r <= options.tolerance : r < options.threshold;
}

std::string edge_name(UndirectedEdge e) { return std::to_string(e.u) + "-" + std::to_string(e.v); }

// Orientation state shared by PTO and TPO.
class OrientationState {
public:
    OrientationState(const UndirectedTree& skeleton) : skeleton_(skeleton), decided_(skeleton.edges.size()) {
        if (!is_spanning_tree(skeleton.p, skeleton.edge_list()))
            throw InvalidArgument("skeleton is not a spanning tree");
        incident_.resize(skeleton.p);
        for (std::size_t e = 0; e < skeleton.edges.size(); ++e) {
            incident_[skeleton.edges[e].u].push_back(e);
            incident_[skeleton.edges[e].v].push_back(e);
        }
    }

    [[nodiscard]] const std::vector<std::size_t>& incident(Vertex v) const { return incident_[v]; }
    [[nodiscard]] Vertex other(std::size_t e, Vertex v) const {
        const auto& edge = skeleton_.edges[e];
        return edge.u == v ? edge.v : edge.u;
    }
    [[nodiscard]] bool oriented(std::size_t e) const { return decided_[e].has_value(); }
    [[nodiscard]] const LearnedEdge& at(std::size_t e) const { return *decided_[e]; }
    [[nodiscard]] std::size_t edge_count() const { return decided_.size(); }

    // Orients edge e as from -> to unless already decided. A disagreeing
    // second decision marks the edge as conflicting and is dropped.
    bool orient(std::size_t e, DirectedEdge direction, Provenance provenance, LearnedGraph& graph) {
        if (decided_[e]) {
            if (!(decided_[e]->edge == direction)) {
                decided_[e]->conflict = true;
                graph.warnings.push_back("conflicting orientation for edge " + edge_name(direction.undirected()) +
                                         ": kept " + std::to_string(decided_[e]->edge.from) + "->" +
                                         std::to_string(decided_[e]->edge.to) + ", rejected " +
                                         std::string(to_string(provenance)));
            }
            return false;
        }
        LearnedEdge learned;
        learned.edge = direction;
        learned.provenance = provenance;
        decided_[e] = learned;
        return true;
    }

    void attach(std::size_t e, const RankDecision& decision) {
        decided_[e]->tie = decision.tie;
        decided_[e]->norm_along = decision.norm_along;
        decided_[e]->norm_against = decision.norm_against;
    }

    void finish(LearnedGraph& graph) const {
        graph.p = skeleton_.p;
        for (std::size_t e = 0; e < decided_.size(); ++e) {
            if (decided_[e])
                graph.edges.push_back(*decided_[e]);
            else
                graph.unresolved.push_back(skeleton_.edges[e].edge());
        }
    }

private:
    const UndirectedTree& skeleton_;
    std::vector<std::optional<LearnedEdge>> decided_;
    std::vector<std::vector<std::size_t>> incident_;
};

// Orient rank-tested edge e and record its statistics.
void orient_by_rank(OrientationState& state, std::size_t e, const UndirectedTree& skeleton,
                    const CumulantProvider& provider, const OrientOptions& options, LearnedGraph& graph) {
    const auto decision = orient_edge_by_rank(provider, skeleton.edges[e].edge(), options);
    ++graph.rank_tests;
    state.orient(e, decision.edge, Provenance::RankTest, graph);
    state.attach(e, decision);
}

} // namespace

RankDecision orient_edge_by_rank(const CumulantProvider& provider, UndirectedEdge edge, const OrientOptions& options) {
    validate(options, false);
    if (edge.u == edge.v) throw InvalidArgument("edge endpoints must differ");
    auto table = provider.pair_table(edge.u, edge.v, options.max_order);
    if (options.mode == Mode::Sample && options.standardize) table = table.standardized();
    const DirectedEdge forward{edge.u, edge.v};
    const auto a_forward = build_moment_matrix(table, forward, options.max_order);
    const auto a_reverse = build_moment_matrix(table, forward.reversed(), options.max_order);
    const double n_forward = minor_vector(a_forward).norm();
    const double n_reverse = minor_vector(a_reverse).norm();

    RankDecision d;
    if (options.mode == Mode::Population) {
        const bool rank_one_forward = n_forward <= options.tolerance * largest_entry_squared(a_forward);
        const bool rank_one_reverse = n_reverse <= options.tolerance * largest_entry_squared(a_reverse);
        if (rank_one_forward == rank_one_reverse)
            throw DegeneracyError("edge " + edge_name(edge) +
                                  (rank_one_forward ? ": both directions give rank-one moment matrices (Gaussian-like "
                                                      "cumulants up to order " + std::to_string(options.max_order) + ")"
                                                    : ": neither direction gives a rank-one moment matrix"));
        d.edge = rank_one_forward ? forward : forward.reversed();
    } else if (n_forward == n_reverse) {
        d.edge = forward.from < forward.to ? forward : forward.reversed();
        d.tie = true;
    } else {
        d.edge = n_forward < n_reverse ? forward : forward.reversed();
    }
    const bool kept_forward = d.edge == forward;
    d.norm_along = kept_forward ? n_forward : n_reverse;
    d.norm_against = kept_forward ? n_reverse : n_forward;
    return d;
}

std::vector<DirectedEdge> LearnedGraph::directed_edges() const {
    std::vector<DirectedEdge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.push_back(e.edge);
    return out;
}

LearnedGraph pairwise_orientation(const UndirectedTree& skeleton, const CumulantProvider& provider,
                                  const OrientOptions& options) {
    validate(options, false);
    if (!is_spanning_tree(skeleton.p, skeleton.edge_list())) throw InvalidArgument("skeleton is not a spanning tree");
    std::vector<RankDecision> decisions(skeleton.edges.size());
    parallel_for(decisions.size(), options.workers, [&](std::size_t e) {
        decisions[e] = orient_edge_by_rank(provider, skeleton.edges[e].edge(), options);
    });

    LearnedGraph graph;
    graph.p = skeleton.p;
    graph.rank_tests = decisions.size();
    for (const auto& d : decisions) {
        LearnedEdge learned;
        learned.edge = d.edge;
        learned.provenance = Provenance::RankTest;
        learned.tie = d.tie;
        learned.norm_along = d.norm_along;
        learned.norm_against = d.norm_against;
        graph.edges.push_back(learned);
    }
    return graph;
}

LearnedGraph pto(const UndirectedTree& skeleton, const CumulantProvider& provider, const OrientOptions& options) {
    validate(options, true);
    OrientationState state(skeleton);
    LearnedGraph graph;
    std::deque<std::size_t> worklist;

    // Unshielded colliders: i - j - k with i, k marginally independent.
    for (Vertex j = 0; j < skeleton.p; ++j) {
        const auto& around = state.incident(j);
        for (std::size_t a = 0; a < around.size(); ++a) {
            for (std::size_t b = a + 1; b < around.size(); ++b) {
                const Vertex i = state.other(around[a], j);
                const Vertex k = state.other(around[b], j);
                ++graph.correlation_tests;
                if (!declares_independent(provider, i, k, options)) continue;
                if (state.orient(around[a], {i, j}, Provenance::ColliderTest, graph)) worklist.push_back(around[a]);
                if (state.orient(around[b], {k, j}, Provenance::ColliderTest, graph)) worklist.push_back(around[b]);
            }
        }
    }

    // Every edge leaving the head of an oriented edge points away from it.
    auto propagate = [&] {
        while (!worklist.empty()) {
            const std::size_t e = worklist.front();
            worklist.pop_front();
            const Vertex head = state.at(e).edge.to;
            for (const std::size_t f : state.incident(head)) {
                if (state.oriented(f)) continue;
                state.orient(f, {head, state.other(f, head)}, Provenance::Propagation, graph);
                worklist.push_back(f);
            }
        }
    };
    propagate();

    for (std::size_t e = 0; e < state.edge_count(); ++e) {
        if (state.oriented(e)) continue;
        orient_by_rank(state, e, skeleton, provider, options, graph);
        worklist.push_back(e);
        propagate();
    }
    state.finish(graph);
    return graph;
}

LearnedGraph tpo(const UndirectedTree& skeleton, const CumulantProvider& provider, const OrientOptions& options) {
    validate(options, true);
    OrientationState state(skeleton);
    LearnedGraph graph;

    // Depth-first frontier of oriented edges whose head still has undecided
    // neighbours; replaces the recursive formulation.
    std::vector<std::size_t> frontier;
    std::size_t seed = 0;
    std::vector<std::size_t> pushed;
    for (;;) {
        if (frontier.empty()) {
            while (seed < state.edge_count() && state.oriented(seed)) ++seed;
            if (seed == state.edge_count()) break;
            orient_by_rank(state, seed, skeleton, provider, options, graph);
            frontier.push_back(seed);
        }
        const std::size_t o = frontier.back();
        frontier.pop_back();
        const Vertex source = state.at(o).edge.from;
        const Vertex sink = state.at(o).edge.to;

        pushed.clear();
        for (const std::size_t f : state.incident(sink)) {
            if (state.oriented(f)) continue;
            const Vertex k = state.other(f, sink);
            ++graph.correlation_tests;
            if (declares_independent(provider, source, k, options)) {
                state.orient(f, {k, sink}, Provenance::ColliderTest, graph);
            } else {
                state.orient(f, {sink, k}, Provenance::Propagation, graph);
                pushed.push_back(f);
            }
        }
        // Reverse so the first neighbour is explored first.
        frontier.insert(frontier.end(), pushed.rbegin(), pushed.rend());
    }
    state.finish(graph);
    return graph;
}

LearnedGraph orient(Algorithm algorithm, const UndirectedTree& skeleton, const CumulantProvider& provider,
                    const OrientOptions& options) {
    switch (algorithm) {
    case Algorithm::Pairwise: return pairwise_orientation(skeleton, provider, options);
    case Algorithm::Pto: return pto(skeleton, provider, options);
    case Algorithm::Tpo: return tpo(skeleton, provider, options);
    }
    throw InvalidArgument("unknown algorithm");
}

double default_threshold(const UndirectedTree& skeleton) {
    if (skeleton.edges.empty()) return 0.05;
    double weakest = 1.0;
    for (const auto& e : skeleton.edges) weakest = std::min(weakest, std::abs(e.weight));
    return std::clamp(std::max(0.05, 0.5 * weakest * weakest), 1e-12, 1.0 - 1e-12);
}

} // namespace polytree
