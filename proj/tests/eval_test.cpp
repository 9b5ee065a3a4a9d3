// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "kfrag/eval.hpp"
#include "kfrag/report.hpp"
#include "oracle.hpp"

using namespace kfrag;

namespace {

std::vector<std::uint8_t> all_bytes()
{
    std::vector<std::uint8_t> v(256);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, std::uint64_t seed)
{
    std::vector<std::uint8_t> v(n);
    SeededRandom(seed).fill(v);
    return v;
}

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return Errc::InvalidParams;
}

}  // namespace

TEST(Entropy, Examples)
{
    EXPECT_DOUBLE_EQ(shannon_entropy(all_bytes()), 8.0);
    EXPECT_DOUBLE_EQ(shannon_entropy(std::vector<std::uint8_t>(1000, 0x41)), 0.0);
    EXPECT_EQ(code_of([] { shannon_entropy({}); }), Errc::EmptyInput);
}

TEST(Entropy, BoundedByDistinctSymbolCount)
{
    std::mt19937 rng(1);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> v(1 + rng() % 2000);
        const unsigned alphabet = 1 + rng() % 256;
        for (auto& b : v)
            b = static_cast<std::uint8_t>(rng() % alphabet);
        const std::set<std::uint8_t> distinct(v.begin(), v.end());
        ASSERT_LE(shannon_entropy(v), std::log2(static_cast<double>(distinct.size())) + 1e-12);
        ASSERT_GE(shannon_entropy(v), 0.0);
    }
}

TEST(ChiSquared, Examples)
{
    EXPECT_DOUBLE_EQ(chi_squared_statistic(all_bytes()), 0.0);
    auto v = all_bytes();
    v[1] = 0;  // value 0 twice, value 1 never
    EXPECT_DOUBLE_EQ(chi_squared_statistic(v), 2.0);

    const std::vector<std::uint8_t> mono(1280, 0x41);
    const auto r = chi_squared_uniform(mono);
    // Direct evaluation: cell 0x41 holds 1280 against E = 5, 255 empty cells.
    const double expect = (1280.0 - 5.0) * (1280.0 - 5.0) / 5.0 + 255.0 * 5.0;
    EXPECT_DOUBLE_EQ(r.statistic, expect);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(code_of([] { chi_squared_uniform(all_bytes()); }), Errc::SampleTooSmall);
}

TEST(ChiSquared, BalancedSampleIsExactlyZeroAndPasses)
{
    std::vector<std::uint8_t> v;
    for (int rep = 0; rep < 8; ++rep)
        for (int b = 0; b < 256; ++b)
            v.push_back(static_cast<std::uint8_t>(b));
    const auto r = chi_squared_uniform(v);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(kChiSquaredThreshold, 293.0);
}

TEST(Pdf, Examples)
{
    for (double p : pdf_histogram(all_bytes()))
        EXPECT_NEAR(p, 0.0039, 0.00005);
    const auto mono = pdf_histogram(std::vector<std::uint8_t>(50, 0x41));
    for (std::size_t v = 0; v < 256; ++v)
        EXPECT_EQ(mono[v], v == 0x41 ? 1.0 : 0.0);

    const auto a = random_bytes(300, 1);
    std::vector<std::uint8_t> b(700, 0x10);
    auto ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const auto ha = pdf_histogram(a), hb = pdf_histogram(b), hab = pdf_histogram(ab);
    double sum = 0.0;
    for (std::size_t v = 0; v < 256; ++v) {
        EXPECT_NEAR(hab[v], 0.3 * ha[v] + 0.7 * hb[v], 1e-12);
        sum += hab[v];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Pearson, Examples)
{
    const auto a = random_bytes(1000, 2);
    EXPECT_NEAR(pearson_correlation(a, a), 1.0, 1e-12);
    std::vector<std::uint8_t> neg(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        neg[i] = static_cast<std::uint8_t>(255 - a[i]);
    EXPECT_NEAR(pearson_correlation(a, neg), -1.0, 1e-12);
    EXPECT_EQ(code_of([&] { pearson_correlation(std::vector<std::uint8_t>(1000, 3), a); }), Errc::ZeroVariance);
    EXPECT_EQ(code_of([&] { pearson_correlation(std::span(a).first(10), a); }), Errc::LengthMismatch);
}

TEST(Pearson, SymmetricAndAffineInvariant)
{
    std::mt19937 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto a = random_bytes(500, 100 + i);
        const auto b = random_bytes(500, 200 + i);
        ASSERT_NEAR(pearson_correlation(a, b), pearson_correlation(b, a), 1e-12);
        // b' = alpha*b + beta stays inside byte range for these choices.
        const int alpha = (rng() % 2 ? 1 : -1);
        std::vector<std::uint8_t> scaled(b.size());
        for (std::size_t t = 0; t < b.size(); ++t)
            scaled[t] = static_cast<std::uint8_t>(alpha > 0 ? b[t] / 2 + 17 : 255 - b[t]);
        if (alpha > 0) {
            // Halving is not exactly affine on integers; compare against the
            // real-valued shadow computed in doubles.
            double ma = 0, mb = 0;
            for (std::size_t t = 0; t < a.size(); ++t) {
                ma += a[t];
                mb += scaled[t];
            }
            ma /= a.size();
            mb /= a.size();
            double sab = 0, saa = 0, sbb = 0;
            for (std::size_t t = 0; t < a.size(); ++t) {
                sab += (a[t] - ma) * (scaled[t] - mb);
                saa += (a[t] - ma) * (a[t] - ma);
                sbb += (scaled[t] - mb) * (scaled[t] - mb);
            }
            ASSERT_NEAR(pearson_correlation(a, scaled), sab / std::sqrt(saa * sbb), 1e-12);
        } else {
            ASSERT_NEAR(pearson_correlation(a, scaled), -pearson_correlation(a, b), 1e-12);
        }
    }
}

TEST(BitDifference, Examples)
{
    const auto a = random_bytes(512, 4);
    EXPECT_EQ(bit_difference(a, a), 0.0);
    std::vector<std::uint8_t> inv(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        inv[i] = static_cast<std::uint8_t>(~a[i]);
    EXPECT_EQ(bit_difference(a, inv), 1.0);
    const auto b = random_bytes(512, 5);
    EXPECT_EQ(bit_difference(a, b), bit_difference(b, a));
    EXPECT_EQ(code_of([&] { bit_difference(a, std::span(b).first(3)); }), Errc::LengthMismatch);
}

TEST(Recurrence, Examples)
{
    const std::vector<std::uint8_t> d{1, 2, 3};
    const auto pts = recurrence_points(d, 1);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0], (RecurrencePair{1, 2}));
    EXPECT_EQ(pts[1], (RecurrencePair{2, 3}));
    EXPECT_EQ(recurrence_points(random_bytes(100, 6), 1).size(), 99u);
    const auto flat = recurrence_points(std::vector<std::uint8_t>(50, 9), 3);
    EXPECT_EQ(std::set<RecurrencePair>(flat.begin(), flat.end()).size(), 1u);
    EXPECT_EQ(code_of([&] { recurrence_points(d, 3); }), Errc::DelayTooLarge);
    EXPECT_EQ(code_of([&] { recurrence_points(d, 0); }), Errc::DelayTooLarge);
}

TEST(SeedSensitivity, ZeroFlipControlAndOneBitFlip)
{
    const auto& text = testdata::corpus();
    const std::span<const std::uint8_t> sample(text.data(), 4000);
    const CodecParams p = CodecParams::make(4, 4);
    std::vector<std::uint8_t> seed(4);
    SeededRandom(7).fill(seed);
    EXPECT_EQ(seed_sensitivity(sample, p, seed, std::nullopt).bit_difference, 0.0);
    const auto r = seed_sensitivity(sample, p, seed, 13);
    EXPECT_NEAR(r.bit_difference, 0.5, 0.02);
    EXPECT_LE(std::abs(r.correlation), 0.05);
    SeededRandom rng(8);
    EXPECT_EQ(code_of([&] { seed_sensitivity_report(sample.first(999), p, rng); }), Errc::SampleTooSmall);
}

TEST(SharedStreams, AlignedOriginalPairsWithShareStream)
{
    const auto data = random_bytes(1001, 9);
    const CodecParams p = CodecParams::make(4, 4);
    SeededRandom rng(9);
    const auto frags = fragment(data, p, rng);
    for (unsigned j = 1; j <= 4; ++j) {
        const auto s = share_stream(frags[j - 1]);
        const auto o = aligned_original(data, p, j);
        ASSERT_EQ(s.size(), o.size());
        EXPECT_EQ(o[0], data[j - 1]);
        EXPECT_EQ(o[1], data[4 + j - 1]);
    }
    EXPECT_EQ(aligned_original(data, p, 2).back(), 0);  // padding
}

TEST(Ida, VandermondeMinorsAreNonsingular)
{
    for (unsigned n = 2; n <= 8; ++n)
        for (unsigned k = 1; k <= n; ++k)
            EXPECT_NO_THROW(IdaMatrix::vandermonde(k, n).validate());
    IdaMatrix bad = IdaMatrix::vandermonde(2, 3);
    bad.entries[2] = bad.entries[1];  // column 2 := column 1
    bad.entries[5] = bad.entries[4];
    EXPECT_EQ(code_of([&] { bad.validate(); }), Errc::InvalidMatrix);
}

TEST(Ida, IdentityExtendedSubsamplesPlaintext)
{
    const auto data = random_bytes(600, 10);
    const IdaMatrix m = IdaMatrix::identity_extended(3, 5);
    const auto frags = ida_fragment(data, m);
    ASSERT_EQ(frags.size(), 5u);
    for (unsigned j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 200; ++i)
            ASSERT_EQ(frags[j][i], data[i * 3 + j]);
}

TEST(Ida, PeriodicPlaintextGivesPeriodicFragments)
{
    const auto block = random_bytes(48, 11);
    std::vector<std::uint8_t> data;
    for (int r = 0; r < 20; ++r)
        data.insert(data.end(), block.begin(), block.end());
    const auto frags = ida_fragment(data, IdaMatrix::vandermonde(4, 6));
    for (const auto& f : frags)
        for (std::size_t i = 12; i < f.size(); ++i)
            ASSERT_EQ(f[i], f[i - 12]);
}

TEST(Ida, AnyKFragmentsRecoverThroughInverseSubmatrix)
{
    const auto data = random_bytes(400, 12);
    const unsigned k = 4, n = 7;
    const IdaMatrix m = IdaMatrix::vandermonde(k, n);
    const auto frags = ida_fragment(data, m);
    std::mt19937 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<unsigned> cols(n);
        std::iota(cols.begin(), cols.end(), 0);
        std::shuffle(cols.begin(), cols.end(), rng);
        cols.resize(k);
        // Row vector c satisfies c * M_S = f_S, i.e. M_S^T c^T = f_S^T.
        std::vector<std::vector<std::uint32_t>> a(k, std::vector<std::uint32_t>(k));
        for (unsigned r = 0; r < k; ++r)
            for (unsigned c = 0; c < k; ++c)
                a[c][r] = m.at(r, cols[c]);
        for (std::size_t g = 0; g < data.size() / k; ++g) {
            std::vector<std::uint32_t> y(k);
            for (unsigned c = 0; c < k; ++c)
                y[c] = frags[cols[c]][g];
            const auto chunk = oracle::solve(oracle::gf8, a, y).value();
            for (unsigned r = 0; r < k; ++r)
                ASSERT_EQ(chunk[r], data[g * k + r]);
        }
    }
}

TEST(EvaluateFull, RejectsDegenerateProtocols)
{
    const auto& text = testdata::corpus();
    SeededRandom rng(13);
    EvalConfig cfg{{2, 3}, 0};
    EXPECT_EQ(code_of([&] { evaluate_full(text, cfg, rng); }), Errc::InvalidParams);
    cfg.trials = 2;
    std::vector<std::uint8_t> small(2999, 'a');
    EXPECT_EQ(code_of([&] { evaluate_full(small, cfg, rng); }), Errc::SampleTooSmall);
}

TEST(EvaluateFull, ReportInvariantsOnText)
{
    const auto& text = testdata::corpus();
    SeededRandom rng(14);
    EvalConfig cfg{{2, 5}, 3};
    const auto rep = evaluate_full(text, cfg, rng);
    ASSERT_EQ(rep.per_k.size(), 2u);
    EXPECT_GT(rep.original_entropy, 4.0);
    EXPECT_LT(rep.original_entropy, 6.0);
    for (const auto& ke : rep.per_k) {
        double sum = 0;
        for (double p : ke.fragment_pdf)
            sum += p;
        EXPECT_NEAR(sum, 1.0, 1e-9);
        EXPECT_GE(ke.min_fragment_entropy, 0.0);
        EXPECT_LE(ke.result_entropy, 8.0);
        EXPECT_LT(ke.ida_result_entropy, ke.result_entropy);
        for (const auto& row : ke.corr_fragments)
            for (double c : row)
                EXPECT_LE(std::abs(c), 1.0);
        for (double b : ke.bit_difference) {
            EXPECT_GE(b, 0.0);
            EXPECT_LE(b, 1.0);
        }
        EXPECT_EQ(ke.chi2_statistics.size(), ke.k * cfg.trials);
        EXPECT_EQ(ke.recurrence_fragment.size(), cfg.fragment_size - 1);
    }
    ASSERT_TRUE(rep.seed.has_value());
    EXPECT_EQ(summarize(rep).size(), 5u);
    const auto j = to_json(rep);
    EXPECT_EQ(j["per_k"].size(), 2u);
    EXPECT_EQ(j["original"]["pdf"].size(), 256u);
}

TEST(EvaluateFull, RandomInputEntropyMatchesUniformBaseline)
{
    // Fragments of random input should look like random data of the same
    // length: guards against harness bugs that inflate or deflate entropy.
    const auto data = random_bytes(50'000, 15);
    SeededRandom rng(15);
    EvalConfig cfg{{2, 4}, 5};
    const auto rep = evaluate_full(data, cfg, rng);
    double baseline = 0;
    for (int i = 0; i < 20; ++i)
        baseline += shannon_entropy(random_bytes(1000, 1000 + i)) / 20;
    for (const auto& ke : rep.per_k) {
        EXPECT_NEAR(ke.mean_fragment_entropy, baseline, 0.02);
        EXPECT_LE(ke.mean_fragment_entropy, 8.0);
    }
}
