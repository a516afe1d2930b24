// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <random>

#include "acs/quant/io.hpp"
#include "acs/quant/packing.hpp"
#include "acs/quant/reference.hpp"
#include "test_util.hpp"

using namespace acs;
using namespace acs::quant;

TEST_CASE("bit_decompose") {
    CHECK(bit_decompose(6, BitWidth(3)) == std::vector<int>{0, 1, 1});
    CHECK(bit_decompose(0, BitWidth(2)) == std::vector<int>{0, 0});
    CHECK_THROWS_AS(bit_decompose(4, BitWidth(2)), DomainError);

    std::mt19937_64 rng(1);
    for (int n = 0; n < 1000; ++n) {
        const int bits = 1 + static_cast<int>(rng() % 16);
        const std::uint64_t x = rng() % (1ull << bits);
        auto digits = bit_decompose(x, BitWidth(bits));
        std::uint64_t back = 0;
        for (int i = 0; i < bits; ++i) back += static_cast<std::uint64_t>(digits[i]) << i;
        REQUIRE(back == x);
    }
}

TEST_CASE("binary reconstruction of products over the full 2..8-bit grid") {
    for (int wb = 2; wb <= 8; ++wb)
        for (int ib = 2; ib <= 8; ++ib)
            for (int a = 0; a < (1 << wb); ++a)
                for (int b = 0; b < (1 << ib); ++b) {
                    auto ad = bit_decompose(a, BitWidth(wb));
                    auto bd = bit_decompose(b, BitWidth(ib));
                    long sum = 0;
                    for (int i = 0; i < wb; ++i)
                        for (int j = 0; j < ib; ++j) sum += (long{ad[i] & bd[j]}) << (i + j);
                    REQUIRE(sum == a * b);
                }
}

TEST_CASE("QTensor invariants") {
    CHECK_THROWS_AS(QTensor({2, 2}, {1, 2, 3}, BitWidth(4), false), FormatError);
    CHECK_THROWS_AS(QTensor({1}, {16}, BitWidth(4), false), DomainError);
    CHECK_THROWS_AS(QTensor({1}, {-1}, BitWidth(4), false), DomainError);
    CHECK_NOTHROW(QTensor({1}, {-8}, BitWidth(4), true));
    CHECK_THROWS_AS(BitWidth(0), DomainError);
}

TEST_CASE("pack_activations layout") {
    SUBCASE("all ones, I=2") {
        QTensor t({1, 1, 32}, std::vector<std::int32_t>(32, 1), BitWidth(2), false);
        auto p = pack_activations(t, BitWidth(2));
        REQUIRE(p.words.size() == 2);
        CHECK(p.words[0] == 0xFFFFFFFFu);
        CHECK(p.words[1] == 0x00000000u);
    }
    SUBCASE("zero tensor") {
        auto p = pack_activations(QTensor::zeros({3, 2, 40}, BitWidth(5)), BitWidth(5));
        CHECK(p.words.size() == 3 * 2 * 2 * 5);
        for (auto w : p.words) CHECK(w == 0);
    }
    SUBCASE("channel k sits in lane k mod 32 of slice k/32") {
        auto t = QTensor::zeros({1, 1, 64}, BitWidth(3));
        t.set({0, 0, 37}, 5);  // bits 0 and 2
        auto p = pack_activations(t, BitWidth(3));
        CHECK(p.words[p.index(0, 0, 1, 0)] == (1u << 5));
        CHECK(p.words[p.index(0, 0, 1, 1)] == 0u);
        CHECK(p.words[p.index(0, 0, 1, 2)] == (1u << 5));
    }
    SUBCASE("out of range element") {
        QTensor t({1, 1, 1}, {7}, BitWidth(3), false);
        CHECK_THROWS_AS(pack_activations(t, BitWidth(2)), DomainError);
    }
}

TEST_CASE("pack/unpack round trips") {
    std::mt19937_64 rng(7);
    auto t = test::random_tensor(rng, {4, 4, 64}, 5);
    CHECK(unpack_activations(pack_activations(t, BitWidth(5))) == t);

    auto z = QTensor::zeros({2, 3, 33}, BitWidth(4));
    CHECK(unpack_activations(pack_activations(z, BitWidth(4))) == z);

    auto w3 = test::random_tensor(rng, {64, 64, 3, 3}, 3);
    CHECK(unpack_weights(pack_weights(w3, BitWidth(3), ConvMode::Conv3x3)) == w3);

    for (int trial = 0; trial < 20; ++trial) {
        const int bits = 2 + static_cast<int>(rng() % 7);
        const int kin = 1 + static_cast<int>(rng() % 100);
        auto w1 = test::random_tensor(rng, {1 + static_cast<int>(rng() % 5), kin, 1, 1}, bits);
        CHECK(unpack_weights(pack_weights(w1, BitWidth(bits), ConvMode::Conv1x1)) == w1);
        auto a = test::random_tensor(rng, {1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4), kin},
                                     bits);
        CHECK(unpack_activations(pack_activations(a, BitWidth(bits))) == a);
    }

    PackedActivations bad = pack_activations(t, BitWidth(5));
    bad.words.pop_back();
    CHECK_THROWS_AS(unpack_activations(bad), FormatError);
}

TEST_CASE("pack_weights layout") {
    QTensor ones({1, 32, 1, 1}, std::vector<std::int32_t>(32, 1), BitWidth(2), false);
    auto p = pack_weights(ones, BitWidth(2), ConvMode::Conv1x1);
    REQUIRE(p.words.size() == 2);
    CHECK(p.words[0] == 0xFFFFFFFFu);
    CHECK(p.words[1] == 0u);

    auto z = pack_weights(QTensor::zeros({2, 40, 3, 3}, BitWidth(4)), BitWidth(4), ConvMode::Conv3x3);
    CHECK(z.words.size() == 2 * 2 * 4 * 9);
    for (auto w : z.words) CHECK(w == 0);

    // tap order is row-major (fy, fx)
    auto t = QTensor::zeros({1, 1, 3, 3}, BitWidth(2));
    t.set({0, 0, 1, 2}, 1);
    auto pt = pack_weights(t, BitWidth(2), ConvMode::Conv3x3);
    CHECK(pt.words[pt.index(0, 0, 0, 5)] == 1u);

    CHECK_THROWS_AS(pack_weights(QTensor::zeros({1, 1, 3, 3}, BitWidth(2)), BitWidth(2), ConvMode::Conv1x1),
                    DomainError);
}

TEST_CASE("reference_conv examples") {
    QTensor a({1, 1, 1}, {2}, BitWidth(8), false);
    QTensor w({1, 1, 1, 1}, {3}, BitWidth(8), false);
    auto out = reference_conv(a, w, NormParams::identity(1), ConvMode::Conv1x1, BitWidth(8));
    CHECK(out.at({0, 0, 0}) == 6);

    CHECK(reference_normquant(10, 2, 4, 3, true, BitWidth(2)) == 3);
    // floor semantics of the arithmetic shift
    CHECK(reference_normquant(-3, 1, 0, 1, false, BitWidth(8)) == 0);
    CHECK(reference_normquant(1000, 1, 0, 0, false, BitWidth(4)) == 15);
}

TEST_CASE("reference_conv matches the naive oracle") {
    std::mt19937_64 rng(11);
    {
        auto a = test::random_tensor(rng, {8, 8, 64}, 8);
        auto w = test::random_tensor(rng, {16, 64, 3, 3}, 8);
        auto n = test::random_norm(rng, 16);
        auto ref = reference_conv(a, w, n, ConvMode::Conv3x3, BitWidth(8));
        auto oracle = test::naive_conv(a, w, n, 8, true);
        CHECK(std::vector<std::int32_t>(ref.data().begin(), ref.data().end()) == oracle);
    }
    for (int trial = 0; trial < 30; ++trial) {
        const bool conv3 = trial % 2 == 0;
        const bool same = trial % 3 != 0;
        const int f = conv3 ? 3 : 1;
        const int h = 3 + static_cast<int>(rng() % 6), wd = 3 + static_cast<int>(rng() % 6);
        const int kin = 1 + static_cast<int>(rng() % 70), kout = 1 + static_cast<int>(rng() % 40);
        const int ib = 2 + static_cast<int>(rng() % 7), wb = 2 + static_cast<int>(rng() % 7);
        const int ob = 2 + static_cast<int>(rng() % 7);
        auto a = test::random_tensor(rng, {h, wd, kin}, ib);
        auto w = test::random_tensor(rng, {kout, kin, f, f}, wb);
        auto n = test::random_norm(rng, kout);
        auto ref = reference_conv(a, w, n, conv3 ? ConvMode::Conv3x3 : ConvMode::Conv1x1, BitWidth(ob),
                                  same ? Padding::Same : Padding::Valid);
        auto oracle = test::naive_conv(a, w, n, ob, same);
        REQUIRE(std::vector<std::int32_t>(ref.data().begin(), ref.data().end()) == oracle);
    }
}

TEST_CASE("reference_conv properties") {
    std::mt19937_64 rng(3);
    SUBCASE("all-zero weights give clamp(relu(bias >> S))") {
        auto a = test::random_tensor(rng, {5, 5, 20}, 6);
        auto w = QTensor::zeros({7, 20, 3, 3}, BitWidth(4));
        auto n = test::random_norm(rng, 7);
        auto out = reference_conv(a, w, n, ConvMode::Conv3x3, BitWidth(5));
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x)
                for (int ko = 0; ko < 7; ++ko) {
                    std::int64_t v = std::int64_t{n.bias[ko]} >> n.shift;
                    v = std::clamp<std::int64_t>(v, 0, 31);
                    CHECK(out.at({y, x, ko}) == v);
                }
    }
    SUBCASE("zero channel padding 60 -> 64 is neutral") {
        auto a = test::random_tensor(rng, {4, 4, 60}, 8);
        auto w = test::random_tensor(rng, {8, 60, 3, 3}, 8);
        auto n = test::random_norm(rng, 8);
        auto a64 = QTensor::zeros({4, 4, 64}, BitWidth(8));
        auto w64 = QTensor::zeros({8, 64, 3, 3}, BitWidth(8));
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x)
                for (int k = 0; k < 60; ++k) a64.set({y, x, k}, a.at({y, x, k}));
        for (int ko = 0; ko < 8; ++ko)
            for (int k = 0; k < 60; ++k)
                for (int fy = 0; fy < 3; ++fy)
                    for (int fx = 0; fx < 3; ++fx) w64.set({ko, k, fy, fx}, w.at({ko, k, fy, fx}));
        CHECK(reference_conv(a, w, n, ConvMode::Conv3x3, BitWidth(8)) ==
              reference_conv(a64, w64, n, ConvMode::Conv3x3, BitWidth(8)));
    }
    SUBCASE("accumulator overflow is reported") {
        // 255 * 255 * 35000 > 2^31
        QTensor a({1, 1, 35000}, std::vector<std::int32_t>(35000, 255), BitWidth(8), false);
        QTensor w({1, 35000, 1, 1}, std::vector<std::int32_t>(35000, 255), BitWidth(8), false);
        CHECK_THROWS_AS(reference_conv(a, w, NormParams::identity(1), ConvMode::Conv1x1, BitWidth(8)),
                        OverflowError);
    }
    SUBCASE("signed operands rejected") {
        QTensor a({1, 1, 1}, {-1}, BitWidth(8), true);
        QTensor w({1, 1, 1, 1}, {1}, BitWidth(8), false);
        CHECK_THROWS_AS(reference_conv(a, w, NormParams::identity(1), ConvMode::Conv1x1, BitWidth(8)), DomainError);
    }
}

TEST_CASE("QTensor file round trip") {
    std::mt19937_64 rng(5);
    auto t = test::random_tensor(rng, {3, 4, 5}, 6);
    auto dir = std::filesystem::temp_directory_path() / "acs_test_quant_io";
    std::filesystem::create_directories(dir);
    save_qtensor(t, dir / "t.json");
    CHECK(load_qtensor(dir / "t.json") == t);

    auto p = pack_activations(t, BitWidth(6));
    save_words(p.words, dir / "p.bin");
    CHECK(load_words(dir / "p.bin") == p.words);
    CHECK(std::filesystem::file_size(dir / "p.bin") == 4 * p.words.size());
}
