#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "polytree/cumulants.hpp"
#include "polytree/error.hpp"
#include "polytree/format.hpp"

namespace polytree {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string trimmed(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

Dataset read_csv(std::istream& in) {
    std::vector<std::string> names;
    std::vector<double> values;
    std::size_t columns = 0;
    std::size_t rows = 0;
    std::size_t line_number = 0;
    bool first_row = true;

    for (std::string line; std::getline(in, line);) {
        ++line_number;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const auto fields = split_fields(line);

        if (first_row) {
            first_row = false;
            columns = fields.size();
            bool numeric = true;
            double scratch = 0.0;
            for (const auto f : fields) numeric = numeric && parse_double(f, scratch);
            if (!numeric) {
                for (const auto f : fields) names.push_back(trimmed(f));
                continue;
            }
        }
        if (fields.size() != columns)
            throw DataError("CSV line " + std::to_string(line_number) + ": expected " + std::to_string(columns) +
                            " fields, found " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < columns; ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v))
                throw DataError("CSV line " + std::to_string(line_number) + ", column " + std::to_string(c + 1) +
                                ": '" + std::string(fields[c]) + "' is not a number");
            if (!std::isfinite(v))
                throw DataError("CSV line " + std::to_string(line_number) + ": non-finite value");
            values.push_back(v);
        }
        ++rows;
    }
    if (columns == 0) throw DataError("CSV input is empty");

    Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns; ++c)
            matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * columns + c];
    return Dataset(std::move(matrix), std::move(names));
}

void write_csv(std::ostream& out, const Dataset& data) {
    const auto& names = data.names();
    if (!names.empty()) {
        for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
        out << '\n';
    }
    const auto& m = data.values();
    std::string line;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        line.clear();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) line += ',';
            line += format_double(m(r, c));
        }
        line += '\n';
        out << line;
    }
}

} // namespace polytree
