#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "polytree/error.hpp"
#include "polytree/format.hpp"
#include "polytree/model.hpp"

namespace polytree {

namespace {

struct LineReader {
    std::istream& in;
    std::size_t line_number = 0;

    // Next non-blank, non-comment line split on whitespace.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_number;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            tokens.clear();
            std::istringstream fields(line);
            for (std::string t; fields >> t;) tokens.push_back(t);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("model file line " + std::to_string(line_number) + ": " + what);
    }

    unsigned long integer(const std::string& token) const {
        std::size_t used = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(token, &used);
        } catch (const std::exception&) {
            fail("expected a non-negative integer, got '" + token + "'");
        }
        if (used != token.size() || token.front() == '-') fail("expected a non-negative integer, got '" + token + "'");
        return value;
    }

    double real(const std::string& token) const {
        double value = 0.0;
        if (!parse_double(token, value)) fail("expected a decimal number, got '" + token + "'");
        return value;
    }
};

} // namespace

PolytreeModel read_model(std::istream& in) {
    LineReader reader{in};
    std::vector<std::string> tokens;
    if (!reader.next(tokens)) throw DataError("model file is empty");
    if (tokens.size() != 2) reader.fail("header must be 'p K_max'");
    const auto p = reader.integer(tokens[0]);
    const auto kmax = reader.integer(tokens[1]);
    if (p == 0) reader.fail("p must be positive");
    if (kmax < 2 || kmax > 64) reader.fail("K_max must be in [2, 64]");

    std::vector<WeightedDirectedEdge> edges;
    for (std::size_t e = 0; e + 1 < p; ++e) {
        if (!reader.next(tokens)) throw DataError("model file ends after " + std::to_string(e) + " of " +
                                                  std::to_string(p - 1) + " edges");
        if (tokens.size() != 3) reader.fail("edge line must be 'parent child lambda'");
        const auto parent = reader.integer(tokens[0]);
        const auto child = reader.integer(tokens[1]);
        if (parent >= p || child >= p) reader.fail("edge vertex out of range");
        edges.push_back({static_cast<Vertex>(parent), static_cast<Vertex>(child), reader.real(tokens[2])});
    }

    ErrorCumulants cumulants(p, static_cast<int>(kmax));
    std::vector<bool> seen(p * (kmax - 1), false);
    while (reader.next(tokens)) {
        if (tokens.size() != 3) reader.fail("cumulant line must be 'vertex k value'");
        const auto v = reader.integer(tokens[0]);
        const auto k = reader.integer(tokens[1]);
        if (v >= p) reader.fail("vertex out of range");
        if (k < 2 || k > kmax) reader.fail("cumulant order out of range");
        const auto slot = v * (kmax - 1) + (k - 2);
        if (seen[slot]) reader.fail("duplicate cumulant for vertex " + tokens[0] + " order " + tokens[1]);
        seen[slot] = true;
        cumulants.at(static_cast<Vertex>(v), static_cast<int>(k)) = reader.real(tokens[2]);
    }

    try {
        return PolytreeModel(DirectedTree(p, std::move(edges)), std::move(cumulants));
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("invalid model: ") + e.what());
    }
}

void write_model(std::ostream& out, const PolytreeModel& model) {
    out << model.size() << ' ' << model.max_order() << '\n';
    for (const auto& e : model.structure().edges())
        out << e.parent << ' ' << e.child << ' ' << format_double(e.lambda) << '\n';
    for (Vertex v = 0; v < model.size(); ++v)
        for (int k = 2; k <= model.max_order(); ++k)
            out << v << ' ' << k << ' ' << format_double(model.errors().at(v, k)) << '\n';
}

} // namespace polytree
