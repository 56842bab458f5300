#include "polytree/pair_table.hpp"

#include <cmath>
#include <string>

#include "polytree/error.hpp"

namespace polytree {

namespace {

// Entries of orders 2..k-1 precede order k; order k' holds k' + 1 entries.
std::size_t order_offset(int k) {
    const auto kk = static_cast<std::size_t>(k);
    return (kk * (kk + 1)) / 2 - 3;
}

} // namespace

PairCumulantTable::PairCumulantTable(Vertex i, Vertex j, int max_order)
    : i_(i), j_(j), max_order_(max_order) {
    if (max_order < 2) throw InvalidArgument("pair cumulant table needs max order >= 2");
    values_.assign(order_offset(max_order + 1), 0.0);
}

std::size_t PairCumulantTable::index(int m, int k) const {
    if (k < 2 || k > max_order_ || m < 0 || m > k)
        throw InvalidArgument("pair cumulant entry (m=" + std::to_string(m) + ", k=" + std::to_string(k) +
                              ") outside table of order " + std::to_string(max_order_));
    return order_offset(k) + static_cast<std::size_t>(m);
}

PairCumulantTable PairCumulantTable::swapped() const {
    PairCumulantTable out(j_, i_, max_order_);
    for (int k = 2; k <= max_order_; ++k)
        for (int m = 0; m <= k; ++m) out.at(m, k) = at(k - m, k);
    return out;
}

void PairCumulantTable::scale(double factor) noexcept {
    for (auto& v : values_) v *= factor;
}

PairCumulantTable PairCumulantTable::standardized() const {
    const double var_i = at(2, 2);
    const double var_j = at(0, 2);
    if (!(var_i > 0.0 && var_j > 0.0))
        throw DataError("cannot standardize pair (" + std::to_string(i_) + ", " + std::to_string(j_) +
                        "): non-positive variance");
    const double inv_i = 1.0 / std::sqrt(var_i);
    const double inv_j = 1.0 / std::sqrt(var_j);
    PairCumulantTable out(i_, j_, max_order_);
    for (int k = 2; k <= max_order_; ++k)
        for (int m = 0; m <= k; ++m) out.at(m, k) = at(m, k) * std::pow(inv_i, m) * std::pow(inv_j, k - m);
    return out;
}

} // namespace polytree
