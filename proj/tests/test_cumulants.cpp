#include <doctest.h>

#include <cmath>
#include <sstream>

#include "polytree/cumulants.hpp"
#include "polytree/error.hpp"
#include "polytree/simulate.hpp"
#include "support.hpp"

using namespace polytree;
using namespace polytree::testing;

namespace {

Dataset skewed_data(std::size_t n, std::size_t p, std::uint64_t seed, double shift = 0.0) {
    Rng rng(seed);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            m(r, c) = gamma_variate(rng, 1.0 + static_cast<double>(c), 1.0) + 0.3 * (c > 0 ? m(r, c - 1) : 0.0) + shift;
    return Dataset(std::move(m));
}

} // namespace

TEST_CASE("sample correlation small cases") {
    CHECK(sample_correlation_matrix(dataset_from_columns({{1, 2, 3}, {3, 2, 1}})).at(0, 1) == doctest::Approx(-1.0));
    CHECK(sample_correlation_matrix(dataset_from_columns({{1, 5, 2, 7}, {1, 5, 2, 7}})).at(0, 1) == doctest::Approx(1.0));
    CHECK(sample_correlation_matrix(dataset_from_columns({{0, 0, 3}, {0, 3, 0}})).at(0, 1) == doctest::Approx(-0.5));
    CHECK(k_statistic(dataset_from_columns({{0, 0, 3}, {0, 3, 0}}), 0, 1, 1, 2) == doctest::Approx(-1.5));
}

TEST_CASE("sample correlation errors") {
    CHECK_THROWS_AS(sample_correlation_matrix(dataset_from_columns({{1, 2, 3}, {4, 4, 4}})), DataError);
    CHECK_THROWS_AS(sample_correlation_matrix(dataset_from_columns({{0.1, 0.1, 0.1}, {1, 2, 3}})), DataError);
    CHECK_THROWS_AS(sample_correlation_matrix(dataset_from_columns({{1}, {2}})), InvalidArgument);
}

TEST_CASE("correlation matrix matches the k-statistic ratio exactly") {
    const auto data = skewed_data(257, 70, 5);
    const auto corr = sample_correlation_matrix(data);
    for (Vertex i = 0; i < 70; i += 3) {
        for (Vertex j = 0; j < 70; j += 7) {
            if (i == j) continue;
            const double expected = k_statistic(data, i, j, 1, 2) /
                                    std::sqrt(k_statistic(data, i, i, 2, 2) * k_statistic(data, j, j, 2, 2));
            CHECK(corr.at(i, j) == expected);
            CHECK(corr.at(j, i) == expected);
            CHECK(std::abs(corr.at(i, j)) <= 1.0);
        }
    }
}

TEST_CASE("correlation matrix is independent of worker count") {
    const auto data = skewed_data(100, 150, 8);
    const auto one = sample_correlation_matrix(data, {.workers = 1});
    const auto three = sample_correlation_matrix(data, {.workers = 3});
    for (Vertex i = 0; i < 150; ++i)
        for (Vertex j = i + 1; j < 150; ++j) REQUIRE(one.at(i, j) == three.at(i, j));
}

TEST_CASE("reduced precision storage") {
    const auto data = skewed_data(50, 20, 9);
    const auto full = sample_correlation_matrix(data);
    const auto reduced = sample_correlation_matrix(data, {.workers = 1, .reduced_precision_above = 10});
    CHECK(full.precision() == StoragePrecision::Double);
    CHECK(reduced.precision() == StoragePrecision::Single);
    for (Vertex i = 0; i < 20; ++i)
        for (Vertex j = i + 1; j < 20; ++j) CHECK(reduced.at(i, j) == doctest::Approx(full.at(i, j)).epsilon(1e-6));
}

TEST_CASE("univariate k-statistics by hand") {
    const auto a = dataset_from_columns({{1, 2, 3}});
    CHECK(k_statistic(a, 0, 0, 2, 2) == doctest::Approx(1.0));
    CHECK(k_statistic(a, 0, 0, 3, 3) == doctest::Approx(0.0));
    const auto b = dataset_from_columns({{0, 0, 3}});
    CHECK(k_statistic(b, 0, 0, 2, 2) == doctest::Approx(3.0));
    CHECK(k_statistic(b, 0, 0, 3, 3) == doctest::Approx(9.0));
}

TEST_CASE("k-statistics match Fisher's power-sum formulas by polarisation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = skewed_data(6 + seed, 2, seed + 40);
        const auto x = data.column(0);
        const auto y = data.column(1);
        for (int k = 2; k <= 4; ++k)
            for (int m = 0; m <= k; ++m)
                CHECK(k_statistic(data, 0, 1, m, k) == doctest::Approx(polarized_k(x, y, m, k)).epsilon(1e-8));
    }
}

TEST_CASE("k-statistics are translation invariant") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto data = skewed_data(40, 2, seed);
        const auto shifted = skewed_data(40, 2, seed, 1234.5);
        for (int k = 2; k <= 4; ++k)
            for (int m = 0; m <= k; ++m) {
                const double a = k_statistic(data, 0, 1, m, k);
                const double b = k_statistic(shifted, 0, 1, m, k);
                CHECK(b == doctest::Approx(a).epsilon(1e-9).scale(std::abs(a) + 1e-6));
            }
    }
}

TEST_CASE("k-statistic preconditions") {
    const auto data = dataset_from_columns({{1, 2, 4}, {0, 1, 5}});
    CHECK_THROWS_AS(k_statistic(data, 0, 1, 1, 5), InvalidArgument);
    CHECK_THROWS_AS(k_statistic(data, 0, 1, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(k_statistic(data, 0, 1, 4, 3), InvalidArgument);
    CHECK_THROWS_AS(k_statistic(data, 0, 1, 2, 4), InvalidArgument); // n = 3 < 4
    CHECK_THROWS_AS(k_statistic(data, 0, 2, 1, 2), InvalidArgument);
    CHECK_NOTHROW(k_statistic(data, 0, 1, 2, 3));
}

TEST_CASE("pair table equals entrywise k-statistics") {
    const auto data = skewed_data(33, 3, 77);
    const auto table = pair_cumulant_table(data, 2, 0, 4);
    for (int k = 2; k <= 4; ++k)
        for (int m = 0; m <= k; ++m) CHECK(table.at(m, k) == k_statistic(data, 2, 0, m, k));

    const auto swapped = pair_cumulant_table(data, 0, 2, 4);
    for (int k = 2; k <= 4; ++k)
        for (int m = 0; m <= k; ++m) CHECK(swapped.at(m, k) == doctest::Approx(table.at(k - m, k)).epsilon(1e-12));
    for (int k = 2; k <= 4; ++k)
        for (int m = 0; m <= k; ++m) CHECK(table.swapped().at(m, k) == table.at(k - m, k));

    CHECK_THROWS_AS(pair_cumulant_table(data, 1, 1, 3), InvalidArgument);
    CHECK_THROWS_AS(pair_cumulant_table(data, 0, 1, 5), InvalidArgument);
    CHECK_THROWS_AS(pair_cumulant_table(data, 0, 1, 2), InvalidArgument);
    CHECK_THROWS_AS(pair_cumulant_table(dataset_from_columns({{1, 2, 4}, {0, 1, 5}}), 0, 1, 4), InvalidArgument);
}

TEST_CASE("standardized pair table equals the table of unit-variance data") {
    const auto data = skewed_data(41, 3, 91);
    const auto table = pair_cumulant_table(data, 1, 2, 4).standardized();
    Eigen::MatrixXd values = data.values();
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
        const double mean = values.col(c).mean();
        const double var = (values.col(c).array() - mean).square().sum() / static_cast<double>(values.rows() - 1);
        values.col(c) /= std::sqrt(var);
    }
    const auto oracle = pair_cumulant_table(Dataset(values), 1, 2, 4);
    for (int k = 2; k <= 4; ++k)
        for (int m = 0; m <= k; ++m) CHECK(table.at(m, k) == doctest::Approx(oracle.at(m, k)).epsilon(1e-11));
    CHECK(table.at(2, 2) == doctest::Approx(1.0));
    CHECK(table.at(0, 2) == doctest::Approx(1.0));

    PairCumulantTable flat(0, 1, 3);
    flat.at(2, 2) = 0.0;
    flat.at(0, 2) = 1.0;
    CHECK_THROWS_AS(flat.standardized(), DataError);
}

TEST_CASE("pair table converges to population cumulants") {
    // Chain 0 -> 1 with gamma errors; 10^6 draws, 100 batches for the error bars.
    const DirectedTree chain(2, {{0, 1, 0.5}});
    const std::vector<NodeError> errors{{ErrorFamily::Gamma, 2.0, 1.0}, {ErrorFamily::Gamma, 3.0, 0.5}};
    const auto model = model_with_errors(chain, errors, 3);
    const auto truth = population_pair_cumulants(model, 0, 1, 3);
    const auto data = sample_dataset(chain, errors, 1'000'000, 2024);

    constexpr int batches = 100;
    const auto rows = static_cast<Eigen::Index>(data.samples() / batches);
    std::vector<PairCumulantTable> parts;
    for (int b = 0; b < batches; ++b)
        parts.push_back(pair_cumulant_table(Dataset(data.values().middleRows(b * rows, rows)), 0, 1, 3));
    const auto whole = pair_cumulant_table(data, 0, 1, 3);
    for (int k = 2; k <= 3; ++k) {
        for (int m = 0; m <= k; ++m) {
            double mean = 0.0;
            for (const auto& t : parts) mean += t.at(m, k) / batches;
            double var = 0.0;
            for (const auto& t : parts) var += (t.at(m, k) - mean) * (t.at(m, k) - mean) / (batches - 1);
            const double se = std::sqrt(var / batches);
            INFO("m=" << m << " k=" << k << " estimate=" << whole.at(m, k) << " truth=" << truth.at(m, k));
            CHECK(std::abs(whole.at(m, k) - truth.at(m, k)) < 3.0 * se);
        }
    }
}

TEST_CASE("partition formula") {
    SUBCASE("order 2 is the covariance") {
        const MomentProvider mean_zero = [](std::span<const Vertex> idx) {
            if (idx.size() == 1) return 0.0;
            if (idx.size() == 2) return idx[0] == idx[1] ? 2.0 : 0.7;
            return 0.0;
        };
        const Vertex ij[] = {0, 1};
        CHECK(cumulant_from_moments(mean_zero, ij) == doctest::Approx(0.7));
    }
    SUBCASE("order 4 subtracts the three pairings") {
        // E[X_a X_b] = 0.1 (a + b + 1), E[X1 X2 X3 X4] = 5.
        const MomentProvider provider = [](std::span<const Vertex> idx) {
            if (idx.size() == 1) return 0.0;
            if (idx.size() == 2) return 0.1 * (idx[0] + idx[1] + 1);
            if (idx.size() == 4) return 5.0;
            return 0.0;
        };
        const Vertex idx[] = {1, 2, 3, 4};
        const auto e2 = [](Vertex a, Vertex b) { return 0.1 * (a + b + 1); };
        const double expected = 5.0 - e2(1, 2) * e2(3, 4) - e2(1, 3) * e2(2, 4) - e2(1, 4) * e2(2, 3);
        CHECK(cumulant_from_moments(provider, idx) == doctest::Approx(expected));
    }
    SUBCASE("independent coordinates have no mixed cumulants") {
        // X_0 ~ Exp(1), X_1 ~ Exp(1/2) independent: moments factorise.
        const MomentProvider independent = [](std::span<const Vertex> idx) {
            double m = 1.0;
            int counts[2] = {0, 0};
            for (const Vertex v : idx) ++counts[v];
            const double scale[2] = {1.0, 2.0};
            for (int v = 0; v < 2; ++v)
                for (int r = 1; r <= counts[v]; ++r) m *= r * scale[v];
            return m;
        };
        const Vertex mixed[] = {0, 1, 1, 0, 1};
        CHECK(cumulant_from_moments(independent, mixed) == doctest::Approx(0.0).epsilon(1e-12));
        const Vertex pure[] = {1, 1, 1};
        CHECK(cumulant_from_moments(independent, pure) == doctest::Approx(2.0 * 8.0)); // (k-1)! scale^k
    }
    SUBCASE("constants have zero cumulants of order >= 2") {
        const MomentProvider one = [](std::span<const Vertex>) { return 1.0; };
        for (std::size_t k = 2; k <= 6; ++k) {
            const std::vector<Vertex> idx(k, 0);
            CHECK(cumulant_from_moments(one, idx) == doctest::Approx(0.0));
        }
    }
    const Vertex seven[] = {0, 0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(cumulant_from_moments([](std::span<const Vertex>) { return 0.0; }, seven), InvalidArgument);
}

TEST_CASE("plug-in cumulants approach k-statistics as n grows") {
    const DirectedTree chain(2, {{0, 1, 0.8}});
    const std::vector<NodeError> errors{{ErrorFamily::Gamma, 1.0, 1.0}, {ErrorFamily::Gamma, 2.0, 1.0}};
    double previous = std::numeric_limits<double>::infinity();
    for (const std::size_t n : {100u, 1000u, 10000u}) {
        const auto data = sample_dataset(chain, errors, n, 99);
        const auto x = data.column(0);
        const auto y = data.column(1);
        double mx = 0, my = 0;
        for (std::size_t s = 0; s < n; ++s) {
            mx += x[s] / n;
            my += y[s] / n;
        }
        const MomentProvider central = [&](std::span<const Vertex> idx) {
            double total = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                double term = 1.0;
                for (const Vertex v : idx) term *= v == 0 ? x[s] - mx : y[s] - my;
                total += term;
            }
            return total / static_cast<double>(n);
        };
        double gap = 0.0;
        for (int k = 2; k <= 4; ++k) {
            for (int m = 0; m <= k; ++m) {
                std::vector<Vertex> idx(static_cast<std::size_t>(m), 0);
                idx.insert(idx.end(), static_cast<std::size_t>(k - m), 1);
                const double kstat = k_statistic(data, 0, 1, m, k);
                gap = std::max(gap, std::abs(cumulant_from_moments(central, idx) - kstat) / (std::abs(kstat) + 1.0));
            }
        }
        CHECK(gap < previous);
        previous = gap;
    }
}

TEST_CASE("CSV reading") {
    SUBCASE("header detected") {
        std::istringstream in("a,b\n1,2\n3,4.5\n");
        const auto d = read_csv(in);
        CHECK(d.names() == std::vector<std::string>{"a", "b"});
        CHECK(d.samples() == 2);
        CHECK(d.values()(1, 1) == 4.5);
    }
    SUBCASE("no header") {
        std::istringstream in("# generated\n1,2\n3,-4e-1\n");
        const auto d = read_csv(in);
        CHECK(d.names().empty());
        CHECK(d.values()(1, 1) == -0.4);
    }
    SUBCASE("errors") {
        std::istringstream ragged("1,2\n3\n");
        CHECK_THROWS_AS(read_csv(ragged), DataError);
        std::istringstream junk("1,2\n3,x\n");
        CHECK_THROWS_AS(read_csv(junk), DataError);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_csv(empty), DataError);
        std::istringstream inf("1,2\n3,inf\n");
        CHECK_THROWS_AS(read_csv(inf), DataError);
    }
    SUBCASE("write then read is lossless") {
        const auto data = skewed_data(7, 3, 1);
        const Dataset named(data.values(), {"x", "y", "z"});
        std::stringstream buffer;
        write_csv(buffer, named);
        const auto back = read_csv(buffer);
        CHECK(back.names() == named.names());
        CHECK(back.values() == named.values());
    }
}
