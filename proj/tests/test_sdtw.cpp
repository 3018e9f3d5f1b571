#include "matsa/sdtw.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace matsa;

namespace {

// Independent line-by-line transcription of the reference pseudocode, kept
// deliberately naive. The library implementation is checked against this,
// never the other way around.
long long naive_sdtw(const std::vector<int>& q, const std::vector<int>& r, Metric metric,
                     InitPolicy policy) {
    auto d = [&](int a, int b) -> long long {
        long long x = static_cast<long long>(a) - b;
        return metric == Metric::abs_diff ? (x < 0 ? -x : x) : x * x;
    };
    const std::size_t n = q.size(), m = r.size();
    std::vector<std::vector<long long>> s(n, std::vector<long long>(m, 0));
    s[0][0] = d(q[0], r[0]);
    if (policy == InitPolicy::open_start)
        for (std::size_t j = 1; j < m; ++j) s[0][j] = d(q[0], r[j]);
    for (std::size_t i = 1; i < n; ++i) s[i][0] = s[i - 1][0] + d(q[i], r[0]);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < m; ++j)
            s[i][j] = d(q[i], r[j]) + std::min({s[i - 1][j - 1], s[i][j - 1], s[i - 1][j]});
    long long best = s[n - 1][0];
    for (std::size_t j = 1; j < m; ++j) best = std::min(best, s[n - 1][j]);
    return best;
}

// Same 64-bit LCG used to freeze the expected values below.
struct Lcg {
    std::uint64_t s;
    int next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<int>((s >> 33) % 41) - 20;
    }
};

std::vector<int> lcg_series(Lcg& g, std::size_t n) {
    std::vector<int> v(n);
    for (auto& x : v) x = g.next();
    return v;
}

template <class T>
std::vector<T> to(const std::vector<int>& v) {
    return std::vector<T>(v.begin(), v.end());
}

long long full32(const std::vector<int>& q, const std::vector<int>& r, Metric m,
                 InitPolicy p = InitPolicy::verbatim) {
    auto qq = to<std::int32_t>(q);
    auto rr = to<std::int32_t>(r);
    return sdtw_full<std::int32_t>(qq, rr, m, p);
}

}  // namespace

TEST(Dist, Definitions) {
    EXPECT_EQ(dist<std::int32_t>(5, 3, Metric::abs_diff), 2);
    EXPECT_EQ(dist<std::int32_t>(-4, 3, Metric::square_diff), 49);
    for (int x : {-7, 0, 3, 100}) EXPECT_EQ(dist<std::int32_t>(x, x, Metric::square_diff), 0);
    EXPECT_EQ(dist<std::int8_t>(std::int8_t{-5}, std::int8_t{9}, Metric::abs_diff), 14);
}

TEST(Dist, SquareOverflowIsSaturationError) {
    // (127 - (-128))^2 = 65025 does not fit the int16 accumulator.
    EXPECT_THROW(dist<std::int8_t>(std::int8_t{127}, std::int8_t{-128}, Metric::square_diff),
                 SaturationError);
}

TEST(Dist, PointwiseMetricRelation) {
    for (int a = -20; a <= 20; ++a)
        for (int b = -20; b <= 20; ++b) {
            auto ad = dist<std::int32_t>(a, b, Metric::abs_diff);
            auto sq = dist<std::int32_t>(a, b, Metric::square_diff);
            if (ad >= 1) EXPECT_GE(sq, ad);
            if (ad <= 1) EXPECT_LE(sq, ad);
        }
}

TEST(SdtwFull, FrozenCases) {
    EXPECT_EQ(full32({1, 2, 3}, {5, 1, 2, 3, 9}, Metric::abs_diff), 0);
    EXPECT_EQ(full32({1}, {4}, Metric::abs_diff), 3);
    // Row 0 stays zero beyond column 0, so a length-1 query over a longer
    // reference bottoms out at zero.
    EXPECT_EQ(full32({1}, {4, 9}, Metric::abs_diff), 0);
    EXPECT_EQ(full32({1}, {4, 9}, Metric::abs_diff, InitPolicy::open_start), 3);
    EXPECT_EQ(full32({7, 7}, {7, 7, 7}, Metric::abs_diff), 0);
    EXPECT_EQ(full32({3, -2, 4}, {1, 3, -2, 4, 4, 0}, Metric::abs_diff), 0);
    EXPECT_EQ(full32({3, -2, 4}, {1, 3, -2, 4, 4, 0}, Metric::square_diff), 0);
    EXPECT_EQ(full32({5, 3, 3, 1}, {2, 5, 4, 3, 1, 1, 6}, Metric::abs_diff), 0);
    EXPECT_EQ(full32({5, 3, 3, 1}, {2, 5, 4, 3, 1, 1, 6}, Metric::abs_diff, InitPolicy::open_start),
              1);
    EXPECT_EQ(full32({-4, 3}, {-4, 3}, Metric::square_diff), 0);
    EXPECT_EQ(full32({2, 9, 4}, {7}, Metric::abs_diff), 10);
    EXPECT_EQ(full32({2, 9, 4}, {7}, Metric::square_diff), 38);
}

TEST(SdtwFull, FrozenMediumCase) {
    Lcg g{12345};
    auto q = lcg_series(g, 17);
    auto r = lcg_series(g, 53);
    EXPECT_EQ(full32(q, r, Metric::abs_diff), 83);
    EXPECT_EQ(full32(q, r, Metric::square_diff), 624);
    EXPECT_EQ(full32(q, r, Metric::abs_diff, InitPolicy::open_start), 88);
    EXPECT_EQ(full32(q, r, Metric::square_diff, InitPolicy::open_start), 688);
}

TEST(SdtwFull, IdenticalSeriesIsZero) {
    std::mt19937_64 rng(7);
    for (int c = 0; c < 50; ++c) {
        std::size_t n = 1 + rng() % 40;
        std::vector<std::int32_t> q(n);
        for (auto& x : q) x = static_cast<std::int32_t>(rng() % 201) - 100;
        for (Metric m : {Metric::abs_diff, Metric::square_diff}) {
            EXPECT_EQ(sdtw_full<std::int32_t>(q, q, m), 0);
        }
    }
}

TEST(SdtwFull, MatchesNaiveTranscription) {
    std::mt19937_64 rng(99);
    for (int c = 0; c < 400; ++c) {
        std::size_t n = 1 + rng() % 24, m = 1 + rng() % 24;
        std::vector<int> q(n), r(m);
        for (auto& x : q) x = static_cast<int>(rng() % 41) - 20;
        for (auto& x : r) x = static_cast<int>(rng() % 41) - 20;
        for (Metric met : {Metric::abs_diff, Metric::square_diff})
            for (InitPolicy p : {InitPolicy::verbatim, InitPolicy::open_start})
                EXPECT_EQ(full32(q, r, met, p), naive_sdtw(q, r, met, p));
    }
}

TEST(SdtwFull, FirstColumnMonotone) {
    std::mt19937_64 rng(3);
    for (int c = 0; c < 40; ++c) {
        std::size_t n = 2 + rng() % 30, m = 1 + rng() % 30;
        std::vector<std::int32_t> q(n), r(m);
        for (auto& x : q) x = static_cast<std::int32_t>(rng() % 61) - 30;
        for (auto& x : r) x = static_cast<std::int32_t>(rng() % 61) - 30;
        auto s = sdtw_matrix<std::int32_t>(q, r, Metric::abs_diff);
        for (std::size_t i = 1; i < n; ++i) EXPECT_GE(s[i * m], s[(i - 1) * m]);
    }
}

TEST(SdtwFull, PrefixStabilityUnderReferenceExtension) {
    std::mt19937_64 rng(4);
    for (int c = 0; c < 30; ++c) {
        std::size_t n = 1 + rng() % 16, m = 2 + rng() % 16, ext = 1 + rng() % 8;
        std::vector<std::int32_t> q(n), r(m + ext);
        for (auto& x : q) x = static_cast<std::int32_t>(rng() % 41) - 20;
        for (auto& x : r) x = static_cast<std::int32_t>(rng() % 41) - 20;
        std::span<const std::int32_t> rshort(r.data(), m);
        auto s1 = sdtw_matrix<std::int32_t>(q, rshort, Metric::abs_diff);
        auto s2 = sdtw_matrix<std::int32_t>(q, r, Metric::abs_diff);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) EXPECT_EQ(s1[i * m + j], s2[i * (m + ext) + j]);
    }
}

TEST(SdtwStream, EqualsFullEverywhere) {
    std::mt19937_64 rng(2024);
    for (int c = 0; c < 10000; ++c) {
        std::size_t n = 1 + rng() % 64, m = 1 + rng() % 64;
        std::vector<std::int16_t> q(n), r(m);
        for (auto& x : q) x = static_cast<std::int16_t>(static_cast<int>(rng() % 41) - 20);
        for (auto& x : r) x = static_cast<std::int16_t>(static_cast<int>(rng() % 41) - 20);
        Metric met = (c & 1) ? Metric::square_diff : Metric::abs_diff;
        InitPolicy p = (c & 2) ? InitPolicy::open_start : InitPolicy::verbatim;
        ASSERT_EQ(sdtw_stream<std::int16_t>(q, r, met, p), sdtw_full<std::int16_t>(q, r, met, p));
    }
}

TEST(SdtwStream, WorkingSetIsFourVectors) {
    StreamWorkspace<std::int64_t> ws(512);
    EXPECT_EQ(StreamWorkspace<std::int64_t>::kVectorCount, 4u);
    EXPECT_EQ(ws.s_cur.size(), 512u);
    EXPECT_EQ(ws.s_diag.size(), 512u);
    EXPECT_EQ(ws.s_up.size(), 512u);
    EXPECT_EQ(ws.s_left.size(), 512u);
    EXPECT_EQ(ws.vector_length(), 512u);
}

TEST(SdtwStream, TrivialIdenticalValues) {
    std::vector<std::int32_t> q{7, 7}, r{7, 7, 7};
    EXPECT_EQ(sdtw_stream<std::int32_t>(q, r, Metric::abs_diff), 0);
}

TEST(SdtwOverflow, AccumulationBeyondTwiceWidthThrows) {
    // int8 accumulates in int16; a long run of large abs-diffs overflows the
    // cumulative first column.
    std::vector<std::int8_t> q(200, std::int8_t{127});
    std::vector<std::int8_t> r{std::int8_t{-128}};
    EXPECT_THROW(sdtw_full<std::int8_t>(q, r, Metric::abs_diff), SaturationError);
    EXPECT_THROW(sdtw_stream<std::int8_t>(q, r, Metric::abs_diff), SaturationError);
}

TEST(QueryFiltering, ThresholdBoundaries) {
    TimeSeries<std::int32_t> ref{5, 1, 2, 3, 9, 4, 4};
    QuerySet<std::int32_t> qs({TimeSeries<std::int32_t>{1, 2, 3},
                               TimeSeries<std::int32_t>{9, 9, 9},
                               TimeSeries<std::int32_t>{2, 3, 9}},
                              Mode::query_filtering);
    auto all = run_query_filtering(ref, qs, Metric::abs_diff,
                                   std::numeric_limits<std::int64_t>::max());
    ASSERT_EQ(all.size(), 3u);
    for (const auto& r : all) EXPECT_FALSE(r.anomaly);

    auto none = run_query_filtering(ref, qs, Metric::abs_diff, std::int64_t{-1});
    for (const auto& r : none) EXPECT_TRUE(r.anomaly);

    // The first query is an exact substring: distance 0, never anomalous for
    // any threshold >= 0.
    EXPECT_EQ(all[0].distance, 0);
    auto zero = run_query_filtering(ref, qs, Metric::abs_diff, std::int64_t{0});
    EXPECT_FALSE(zero[0].anomaly);
}

TEST(QueryFiltering, EmptyQuerySet) {
    TimeSeries<std::int32_t> ref{1, 2, 3};
    QuerySet<std::int32_t> qs;
    auto out = run_query_filtering(ref, qs, Metric::abs_diff, std::int64_t{0});
    EXPECT_TRUE(out.empty());
}

TEST(SelfJoin, MatchesBruteForce) {
    Lcg g{777};
    auto ti = lcg_series(g, 32);
    auto t = to<std::int32_t>(ti);
    const std::size_t m = 4, n = t.size();

    for (Metric met : {Metric::abs_diff, Metric::square_diff}) {
        auto got = run_self_join(TimeSeries<std::int32_t>(t), m, met, std::int64_t{0});
        ASSERT_EQ(got.size(), n - m + 1);
        // Brute force: full matrix per window, same exclusion rule.
        for (std::size_t i = 0; i + m <= n; ++i) {
            std::vector<int> w(ti.begin() + static_cast<long>(i),
                               ti.begin() + static_cast<long>(i + m));
            auto d = [&](int a, int b) -> long long {
                long long x = static_cast<long long>(a) - b;
                return met == Metric::abs_diff ? (x < 0 ? -x : x) : x * x;
            };
            std::vector<std::vector<long long>> s(m, std::vector<long long>(n, 0));
            s[0][0] = d(w[0], ti[0]);
            for (std::size_t k = 1; k < m; ++k) s[k][0] = s[k - 1][0] + d(w[k], ti[0]);
            for (std::size_t k = 1; k < m; ++k)
                for (std::size_t j = 1; j < n; ++j)
                    s[k][j] = d(w[k], ti[j]) +
                              std::min({s[k - 1][j - 1], s[k][j - 1], s[k - 1][j]});
            long long best = std::numeric_limits<long long>::max();
            for (std::size_t j = 0; j < n; ++j)
                if (self_join_endpoint_allowed(i, j, m)) best = std::min(best, s[m - 1][j]);
            EXPECT_EQ(got[i].distance, best) << "window " << i;
        }
    }
}

TEST(SelfJoin, FrozenValues) {
    Lcg g{777};
    auto t = to<std::int32_t>(lcg_series(g, 32));
    auto got = run_self_join(TimeSeries<std::int32_t>(t), 4, Metric::abs_diff, std::int64_t{0});
    const std::vector<std::int64_t> expect{6,  8, 10, 9,  13, 7, 10, 14, 13, 8,  11, 10, 5, 12, 16,
                                           7, 8, 7,  17, 12, 9, 9,  17, 8,  9, 10, 4,  7,  13};
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(got[i].distance, expect[i]);
}

TEST(SelfJoin, ConstantSeries) {
    std::vector<std::int32_t> t(12, 5);
    auto got = run_self_join(TimeSeries<std::int32_t>(t), 3, Metric::abs_diff, std::int64_t{0});
    ASSERT_EQ(got.size(), 10u);
    for (const auto& r : got) EXPECT_EQ(r.distance, 0);
}

TEST(SelfJoin, SingleWindowBoundary) {
    // n == m: one window, every endpoint is a trivial self-match, so the
    // distance saturates to "no valid match".
    std::vector<std::int32_t> t{1, 2, 3, 4};
    auto got = run_self_join(TimeSeries<std::int32_t>(t), 4, Metric::abs_diff, std::int64_t{0});
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].distance, std::numeric_limits<std::int64_t>::max());
    EXPECT_THROW(run_self_join(TimeSeries<std::int32_t>(t), 5, Metric::abs_diff, std::int64_t{0}),
                 std::invalid_argument);
}

TEST(SelfJoin, FloatOracleOnlyPath) {
    std::vector<double> t{0.5, 1.25, -0.75, 2.0, 0.5, 1.25, -0.75, 2.0, 3.5};
    auto got = run_self_join(TimeSeries<double>(t), 2, Metric::square_diff, 0.0);
    ASSERT_EQ(got.size(), 8u);
    for (const auto& r : got) EXPECT_GE(r.distance, 0.0);
}
