#include "polytree/eval.hpp"

#include <string>
#include <unordered_map>

#include "polytree/error.hpp"

namespace polytree {

double ShdReport::orientation_accuracy() const noexcept {
    if (shared == 0) return 1.0;
    return static_cast<double>(shared - misoriented) / static_cast<double>(shared);
}

ShdReport structural_hamming(std::size_t p, const std::vector<DirectedEdge>& truth, const LearnedGraph& learned) {
    if (learned.p != p)
        throw InvalidArgument("learned graph has " + std::to_string(learned.p) + " vertices, truth has " +
                              std::to_string(p));
    std::unordered_map<std::uint64_t, DirectedEdge> true_edges;
    for (const auto& e : truth) {
        if (e.from >= p || e.to >= p) throw InvalidArgument("true edge references a vertex outside the graph");
        true_edges.emplace(pair_key(e.from, e.to), e);
    }

    ShdReport report;
    report.p = p;
    for (const auto& e : learned.edges) {
        const auto found = true_edges.find(pair_key(e.edge.from, e.edge.to));
        if (found == true_edges.end()) {
            ++report.included;
            ++report.errors_by_provenance[static_cast<std::size_t>(e.provenance)];
            continue;
        }
        ++report.shared;
        if (!(found->second == e.edge)) {
            ++report.misoriented;
            ++report.errors_by_provenance[static_cast<std::size_t>(e.provenance)];
        }
    }
    // An edge left without an orientation counts as wrongly oriented when the
    // skeleton has it and as wrongly included otherwise.
    for (const auto& u : learned.unresolved) {
        if (true_edges.contains(pair_key(u.u, u.v))) {
            ++report.shared;
            ++report.misoriented;
        } else {
            ++report.included;
        }
    }
    report.omitted = true_edges.size() - report.shared;
    const std::size_t errors = report.included + report.omitted + report.misoriented;
    report.normalized = p < 2 ? 0.0 : static_cast<double>(errors) / (2.0 * static_cast<double>(p - 1));
    return report;
}

} // namespace polytree
