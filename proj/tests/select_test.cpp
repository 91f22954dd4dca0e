#include "boxproj/select.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <span>
#include <vector>

using boxproj::select_kth;

TEST(SelectKth, MedianOfThree) {
    std::vector<double> a{3, 1, 2};
    EXPECT_EQ(select_kth(std::span<double>(a), 1), 2);
}

TEST(SelectKth, Duplicates) {
    std::vector<double> a{5, 5, 5, 5};
    EXPECT_EQ(select_kth(std::span<double>(a), 2), 5);
}

TEST(SelectKth, EmptySliceThrows) {
    std::vector<double> a;
    EXPECT_THROW(select_kth(std::span<double>(a), 0), boxproj::RankError);
}

TEST(SelectKth, RankOutOfRangeThrows) {
    std::vector<double> a{1, 2};
    EXPECT_THROW(select_kth(std::span<double>(a), 2), boxproj::RankError);
}

TEST(SelectKth, MatchesSortOracleOnRandomData) {
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> values(1000);
    for (double& x : values) x = unit(rng);

    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());

    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = pick(rng);
        std::vector<double> work(values);
        EXPECT_EQ(select_kth(std::span<double>(work), k), sorted[k]) << "k=" << k;
    }
}

TEST(SelectKth, PartitionsSliceAroundResult) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> small(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(257);
        for (double& x : a) x = small(rng);
        const std::size_t k = static_cast<std::size_t>(trial) % a.size();
        const double kth = select_kth(std::span<double>(a), k, std::identity{});
        for (std::size_t i = 0; i < k; ++i) EXPECT_LE(a[i], kth);
        for (std::size_t i = k; i < a.size(); ++i) EXPECT_GE(a[i], kth);
    }
}

TEST(SelectKth, AdversarialPatterns) {
    const std::size_t n = 1001;
    std::vector<std::vector<double>> patterns;
    std::vector<double> asc(n), desc(n), organ(n), constant(n, 3.0);
    for (std::size_t i = 0; i < n; ++i) {
        asc[i] = static_cast<double>(i);
        desc[i] = static_cast<double>(n - i);
        organ[i] = static_cast<double>(std::min(i, n - 1 - i));
    }
    patterns = {asc, desc, organ, constant};
    for (const auto& p : patterns) {
        std::vector<double> sorted(p);
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k : {std::size_t(0), n / 4, n / 2, n - 1}) {
            std::vector<double> work(p);
            EXPECT_EQ(select_kth(std::span<double>(work), k), sorted[k]);
        }
    }
}

TEST(SelectKth, WorksWithProjectionKeyAndCustomType) {
    struct Tagged {
        double value;
        int tag;
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Tagged> items(500);
    for (int i = 0; i < 500; ++i) items[i] = {unit(rng), i};

    std::vector<double> keys;
    for (const auto& t : items) keys.push_back(t.value);
    std::sort(keys.begin(), keys.end());

    const auto key = [](const Tagged& t) { return t.value; };
    const Tagged got = select_kth(std::span<Tagged>(items), 250, key);
    EXPECT_EQ(got.value, keys[250]);
}

TEST(SelectKth, FloatInstantiation) {
    std::vector<float> a{0.5f, 0.25f, 0.75f, 0.125f};
    EXPECT_EQ(select_kth(std::span<float>(a), 0), 0.125f);
    EXPECT_EQ(select_kth(std::span<float>(a), 3), 0.75f);
}
