#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "polytree/error.hpp"
#include "polytree/format.hpp"
#include "polytree/orient.hpp"

namespace polytree {

void write_learned_graph(std::ostream& out, const LearnedGraph& graph) {
    out << "# p " << graph.p << '\n';
    for (const auto& w : graph.warnings) out << "# warning: " << w << '\n';
    for (const auto& u : graph.unresolved) out << "# unresolved " << u.u << ' ' << u.v << '\n';
    for (const auto& e : graph.edges) out << e.edge.from << ' ' << e.edge.to << ' ' << to_string(e.provenance) << '\n';
}

void write_learned_graph_json(std::ostream& out, const LearnedGraph& graph) {
    nlohmann::json doc;
    doc["p"] = graph.p;
    doc["rank_tests"] = graph.rank_tests;
    doc["correlation_tests"] = graph.correlation_tests;
    doc["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges) {
        nlohmann::json item{{"from", e.edge.from},
                            {"to", e.edge.to},
                            {"provenance", std::string(to_string(e.provenance))},
                            {"tie", e.tie},
                            {"conflict", e.conflict}};
        item["norm_along"] = e.norm_along ? nlohmann::json(*e.norm_along) : nlohmann::json(nullptr);
        item["norm_against"] = e.norm_against ? nlohmann::json(*e.norm_against) : nlohmann::json(nullptr);
        doc["edges"].push_back(std::move(item));
    }
    doc["unresolved"] = nlohmann::json::array();
    for (const auto& u : graph.unresolved) doc["unresolved"].push_back({u.u, u.v});
    doc["warnings"] = graph.warnings;
    out << doc.dump(2) << '\n';
}

LearnedGraph read_learned_graph(std::istream& in) {
    LearnedGraph graph;
    bool have_p = false;
    Vertex largest = 0;
    std::size_t line_number = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_number;
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;
        if (first == "#") {
            std::string key;
            if (fields >> key && key == "p") {
                std::size_t p = 0;
                if (!(fields >> p)) throw DataError("graph line " + std::to_string(line_number) + ": bad '# p' header");
                graph.p = p;
                have_p = true;
            } else if (key == "unresolved") {
                Vertex u = 0;
                Vertex v = 0;
                if (!(fields >> u >> v))
                    throw DataError("graph line " + std::to_string(line_number) + ": bad '# unresolved' line");
                largest = std::max({largest, u, v});
                graph.unresolved.push_back({u, v});
            } else if (key == "warning:") {
                std::string rest;
                std::getline(fields >> std::ws, rest);
                graph.warnings.push_back(rest);
            }
            continue;
        }
        if (first.front() == '#') continue;
        std::string second;
        std::string provenance;
        if (!(fields >> second >> provenance))
            throw DataError("graph line " + std::to_string(line_number) + ": expected 'i j provenance'");
        LearnedEdge e;
        try {
            e.edge = {static_cast<Vertex>(std::stoul(first)), static_cast<Vertex>(std::stoul(second))};
            e.provenance = parse_provenance(provenance);
        } catch (const std::exception& ex) {
            throw DataError("graph line " + std::to_string(line_number) + ": " + ex.what());
        }
        largest = std::max({largest, e.edge.from, e.edge.to});
        graph.edges.push_back(e);
    }
    if (!have_p) graph.p = graph.edges.empty() ? 0 : static_cast<std::size_t>(largest) + 1;
    return graph;
}

} // namespace polytree
