#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "polytree/cumulants.hpp"
#include "polytree/graph.hpp"
#include "polytree/model.hpp"
#include "polytree/pair_table.hpp"
#include "polytree/skeleton.hpp"

namespace polytree {

enum class Mode { Population, Sample };

enum class Provenance { RankTest, ColliderTest, Propagation };

[[nodiscard]] std::string_view to_string(Provenance provenance) noexcept;
// Throws InvalidArgument on an unknown token.
[[nodiscard]] Provenance parse_provenance(std::string_view token);

// Number of columns of A^{e,K}: K(K-1)/2.
[[nodiscard]] constexpr int moment_columns(int max_order) noexcept { return max_order * (max_order - 1) / 2; }
// Number of first-column minors: K(K-1)/2 - 1.
[[nodiscard]] constexpr int minor_count(int max_order) noexcept { return moment_columns(max_order) - 1; }

// The 2 x K(K-1)/2 matrix of pair cumulants for a directed edge from -> to.
// Column (m, k), 2 <= m <= k <= K, ordered by k then m, holds
// [c^{(from,to),k}_m ; c^{(from,to),k}_{m-1}].
struct EdgeMomentMatrix {
    DirectedEdge direction;
    int max_order = 3;
    Eigen::Matrix<double, 2, Eigen::Dynamic> values;
};

struct MinorVector {
    DirectedEdge direction;
    std::vector<double> values;

    [[nodiscard]] double norm() const noexcept;
};

// Throws InvalidArgument if the table does not cover order K or does not
// belong to the edge.
[[nodiscard]] EdgeMomentMatrix build_moment_matrix(const PairCumulantTable& table, DirectedEdge direction,
                                                   int max_order);
[[nodiscard]] MinorVector minor_vector(const EdgeMomentMatrix& matrix);

// Source of pair cumulants and correlations, either exact (population) or
// estimated (sample). Implementations must be safe for concurrent const use.
class CumulantProvider {
public:
    virtual ~CumulantProvider() = default;
    [[nodiscard]] virtual std::size_t size() const = 0;
    [[nodiscard]] virtual PairCumulantTable pair_table(Vertex i, Vertex j, int max_order) const = 0;
    [[nodiscard]] virtual double correlation(Vertex i, Vertex j) const = 0;
};

class PopulationProvider final : public CumulantProvider {
public:
    explicit PopulationProvider(const PolytreeModel& model) : model_(&model) {}
    explicit PopulationProvider(PolytreeModel&&) = delete;
    [[nodiscard]] std::size_t size() const override { return model_->size(); }
    [[nodiscard]] PairCumulantTable pair_table(Vertex i, Vertex j, int max_order) const override;
    [[nodiscard]] double correlation(Vertex i, Vertex j) const override;

private:
    const PolytreeModel* model_;
};

// k-statistics from data. Correlations are read from `corr` when given,
// otherwise computed per pair.
class SampleProvider final : public CumulantProvider {
public:
    explicit SampleProvider(const Dataset& data, const CorrelationMatrix* corr = nullptr)
        : data_(&data), corr_(corr) {}
    explicit SampleProvider(Dataset&&, const CorrelationMatrix* = nullptr) = delete;
    [[nodiscard]] std::size_t size() const override { return data_->variables(); }
    [[nodiscard]] PairCumulantTable pair_table(Vertex i, Vertex j, int max_order) const override;
    [[nodiscard]] double correlation(Vertex i, Vertex j) const override;

private:
    const Dataset* data_;
    const CorrelationMatrix* corr_;
};

struct OrientOptions {
    int max_order = 3;
    Mode mode = Mode::Sample;
    // Independence threshold for |rho| in sample mode; must lie in (0, 1)
    // for pto/tpo.
    double threshold = 0.0;
    double tolerance = kPopulationZeroTolerance;
    unsigned workers = 1;
    // Sample mode: compare minor norms of the standardized pair cumulants, so
    // that marginal variances carry no directional signal. Population
    // decisions are invariant to it.
    bool standardize = true;
};

struct RankDecision {
    DirectedEdge edge;          // chosen orientation
    double norm_along = 0.0;    // ||v|| for edge.from -> edge.to
    double norm_against = 0.0;  // ||v|| for the reverse
    bool tie = false;
};

// Population mode throws DegeneracyError when both or neither direction is
// rank one.
[[nodiscard]] RankDecision orient_edge_by_rank(const CumulantProvider& provider, UndirectedEdge edge,
                                               const OrientOptions& options);

struct LearnedEdge {
    DirectedEdge edge;
    Provenance provenance = Provenance::RankTest;
    bool tie = false;
    bool conflict = false;
    std::optional<double> norm_along;
    std::optional<double> norm_against;
};

struct LearnedGraph {
    std::size_t p = 0;
    std::vector<LearnedEdge> edges;
    std::vector<UndirectedEdge> unresolved;
    std::vector<std::string> warnings;
    std::size_t rank_tests = 0;
    std::size_t correlation_tests = 0;

    [[nodiscard]] std::vector<DirectedEdge> directed_edges() const;
};

[[nodiscard]] LearnedGraph pairwise_orientation(const UndirectedTree& skeleton, const CumulantProvider& provider,
                                                const OrientOptions& options);
[[nodiscard]] LearnedGraph pto(const UndirectedTree& skeleton, const CumulantProvider& provider,
                               const OrientOptions& options);
[[nodiscard]] LearnedGraph tpo(const UndirectedTree& skeleton, const CumulantProvider& provider,
                               const OrientOptions& options);

enum class Algorithm { Pairwise, Pto, Tpo };

[[nodiscard]] std::string_view to_string(Algorithm algorithm) noexcept;
[[nodiscard]] Algorithm parse_algorithm(std::string_view token);

[[nodiscard]] LearnedGraph orient(Algorithm algorithm, const UndirectedTree& skeleton,
                                  const CumulantProvider& provider, const OrientOptions& options);

// max(0.05, 0.5 * min_e |rho_e|^2) over the skeleton weights, clamped into (0, 1).
[[nodiscard]] double default_threshold(const UndirectedTree& skeleton);

// Text: one "i j provenance" line per edge. JSON adds flags and minor norms.
void write_learned_graph(std::ostream& out, const LearnedGraph& graph);
void write_learned_graph_json(std::ostream& out, const LearnedGraph& graph);
[[nodiscard]] LearnedGraph read_learned_graph(std::istream& in);

} // namespace polytree
