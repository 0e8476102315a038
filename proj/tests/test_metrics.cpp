#include "gkmeans/datagen.hpp"
#include "gkmeans/metrics.hpp"
#include "gkmeans/solvers.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace gkmeans;

namespace {

/// Independent pair-counting oracle for the adjusted Rand index
/// (chance-corrected agreement over all point pairs).
double ari_pair_counting(const std::vector<std::int32_t>& x, const std::vector<std::int32_t>& y) {
    double same_same = 0, same_diff = 0, diff_same = 0, diff_diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const bool sx = x[i] == x[j];
            const bool sy = y[i] == y[j];
            if (sx && sy) same_same += 1;
            else if (sx) same_diff += 1;
            else if (sy) diff_same += 1;
            else diff_diff += 1;
        }
    }
    const double num = 2.0 * (same_same * diff_diff - same_diff * diff_same);
    const double den = (same_same + same_diff) * (same_diff + diff_diff) +
                       (same_same + diff_same) * (diff_same + diff_diff);
    if (den == 0.0) return 1.0;
    return num / den;
}

} // namespace

TEST_CASE("sse matches the tiny fixture and rejects bad labels") {
    DataMatrix data(4, 1);
    data.row(0)[0] = 0;
    data.row(1)[0] = 1;
    data.row(2)[0] = 9;
    data.row(3)[0] = 10;
    CentroidSet c;
    c.k = 2;
    c.dim = 1;
    c.centers = {0.5, 9.5};
    c.drift = {0, 0};

    const LabelVector assign{0, 0, 1, 1};
    CHECK(sse(data, c, assign) == 1.0);

    const LabelVector self{0, 0, 1, 1};
    CentroidSet exact = c;
    exact.centers = {0.0, 9.0};
    DataMatrix zero(2, 1);
    zero.row(0)[0] = 0;
    zero.row(1)[0] = 9;
    CHECK(sse(zero, exact, LabelVector{0, 1}) == 0.0);

    CHECK_THROWS_AS(sse(data, c, LabelVector{0, 0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(sse(data, c, LabelVector{0, 0, 1}), std::invalid_argument);
}

TEST_CASE("ari: identity, permutation invariance, crosscut value") {
    const LabelVector a{0, 0, 1, 1};
    CHECK(ari(a, a) == 1.0);
    CHECK(ari(a, LabelVector{1, 1, 0, 0}) == 1.0);

    // all-ones contingency; frozen from the pair-counting oracle
    const LabelVector b{0, 1, 0, 1};
    CHECK(ari_pair_counting(a, b) == -0.5);
    CHECK(ari(a, b) == doctest::Approx(-0.5).epsilon(1e-12));

    CHECK_THROWS_AS(ari(a, LabelVector{0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(ari(LabelVector{0}, LabelVector{0}), std::invalid_argument);
}

TEST_CASE("ari agrees with the pair-counting oracle on random partitions") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::int32_t> label(0, 4);
    double sum = 0.0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        LabelVector x(60), y(60);
        for (auto& v : x) v = label(rng);
        for (auto& v : y) v = label(rng);
        const double got = ari(x, y);
        CHECK(got == doctest::Approx(ari_pair_counting(x, y)).epsilon(1e-9));
        CHECK(ari(x, y) == ari(y, x)); // symmetry
        sum += got;

        // invariance under relabeling one side
        LabelVector permuted = y;
        for (auto& v : permuted) v = 4 - v;
        CHECK(ari(x, permuted) == doctest::Approx(got).epsilon(1e-12));
    }
    CHECK(std::abs(sum / trials) < 0.02); // expectation ~0 under random labelings
}

TEST_CASE("ari survives large partitions without overflowing pair counts") {
    // big enough that sum-of-pairs products exceed 64 bits
    const std::size_t m = 300000;
    LabelVector a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = static_cast<std::int32_t>(i % 3);
        b[i] = static_cast<std::int32_t>((i % 3 + 1) % 3); // same partition, relabeled
    }
    CHECK(ari(a, b) == 1.0);

    b[0] = a[0]; // one defector breaks perfect agreement
    const double perturbed = ari(a, b);
    CHECK(perturbed < 1.0);
    CHECK(perturbed > 0.99);
}

TEST_CASE("pearson: exact on linear series, errors on degenerate input") {
    const std::vector<double> xs{1, 2, 3};
    CHECK(pearson(xs, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(xs, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pearson(xs, std::vector<double>{5, 5, 5}), std::invalid_argument);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}),
                    std::invalid_argument);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss;
    std::vector<double> base(50), pos(50), neg(50);
    for (std::size_t i = 0; i < base.size(); ++i) {
        base[i] = gauss(rng);
        pos[i] = 2.5 * base[i] + 1.0;
        neg[i] = -0.7 * base[i] + 4.0;
    }
    CHECK(pearson(base, pos) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pearson(base, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("savings_report is consistent with live solver telemetry") {
    const MixtureSpec spec = separated_preset(4, 40, 2, 31);
    const DataMatrix data = generate_gaussian_mixture(spec).data;
    const CentroidSet init = init_random(data, 4, 8);
    const Solution sol = run_gkmeans(data, init, SolverParams{});

    const auto rows = savings_report(sol.telemetry, data.rows(), 4);
    REQUIRE(rows.size() == sol.telemetry.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const IterationTelemetry& src = sol.telemetry[t];
        CHECK(rows[t].iter == src.iter);
        CHECK(rows[t].le_fraction ==
              static_cast<double>(src.le_count) / static_cast<double>(data.rows()));
        CHECK(rows[t].neighborhood_fraction ==
              static_cast<double>(src.neighbor_pairs) / 16.0);
        if (src.pdc1 > 0) {
            REQUIRE(rows[t].le_savings_pct.has_value());
            CHECK(*rows[t].le_savings_pct ==
                  (static_cast<double>(src.pdc1) - static_cast<double>(src.lhe_count)) /
                      static_cast<double>(src.pdc1) * 100.0);
        }
    }
}

TEST_CASE("savings_report applies the table formulas and guards zero denominators") {
    std::vector<IterationTelemetry> rows(3);
    rows[0].iter = 1;
    rows[0].le_count = 100; // everyone LE: pdc1 = 0
    rows[0].pdc1 = 0;
    rows[0].pdc2 = 0;

    rows[1].iter = 2;
    rows[1].neighbor_pairs = 6;
    rows[1].le_count = 60;
    rows[1].lhe_count = 30;
    rows[1].he_count = 3;
    rows[1].pdc1 = (100 - 60) * 5;
    rows[1].pdc2 = 30 * 5;

    rows[2].iter = 3;
    rows[2].le_count = 70;
    rows[2].lhe_count = 0; // pdc2 = 0: HE savings not applicable
    rows[2].pdc1 = (100 - 70) * 5;
    rows[2].pdc2 = 0;

    const auto report = savings_report(rows, 100, 5);
    REQUIRE(report.size() == 3);

    CHECK_FALSE(report[0].le_savings_pct.has_value());
    CHECK_FALSE(report[0].he_savings_pct.has_value());
    CHECK(report[0].le_fraction == 1.0);

    CHECK(report[1].neighborhood_fraction == 6.0 / 25.0);
    CHECK(*report[1].le_savings_pct == doctest::Approx((200.0 - 30.0) / 200.0 * 100.0));
    CHECK(*report[1].he_savings_pct == doctest::Approx((150.0 - 3.0) / 150.0 * 100.0));

    CHECK(report[2].le_savings_pct.has_value());
    CHECK_FALSE(report[2].he_savings_pct.has_value());
}
