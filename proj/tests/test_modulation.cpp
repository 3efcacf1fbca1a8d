// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "rofso/modulation.hpp"

using namespace rofso;

namespace {

// Independent constellation oracle: per axis, the m bits (b0,b2,...) are the
// bitwise complement of the binary-reflected Gray code of the level index,
// with levels 2i-(2^m-1) and the usual unit-power normalization.
unsigned gray_inverse(unsigned g) {
    unsigned j = g;
    j ^= j >> 1;
    j ^= j >> 2;
    j ^= j >> 4;
    return j;
}

double oracle_level(const std::vector<std::uint8_t>& axis_bits) {
    const unsigned m = static_cast<unsigned>(axis_bits.size());
    unsigned code = 0;
    for (unsigned k = 0; k < m; ++k) code |= static_cast<unsigned>(axis_bits[k]) << (m - 1 - k);
    const unsigned mask = (1u << m) - 1u;
    const unsigned idx = gray_inverse(~code & mask);
    return 2.0 * static_cast<double>(idx) - static_cast<double>(mask);
}

cplx oracle_point(const std::vector<std::uint8_t>& bits, unsigned order) {
    const unsigned m = (order == 4) ? 1 : (order == 64) ? 3 : 4;
    std::vector<std::uint8_t> ib(m), qb(m);
    for (unsigned k = 0; k < m; ++k) {
        ib[k] = bits[2 * k];
        qb[k] = bits[2 * k + 1];
    }
    const double norm = std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0);
    return {oracle_level(ib) / norm, oracle_level(qb) / norm};
}

}  // namespace

TEST_CASE("constellations match the independent Gray/PAM oracle exhaustively") {
    for (unsigned order : {4u, 64u, 256u}) {
        const unsigned bps = qam_bits_per_symbol(order);
        for (unsigned pattern = 0; pattern < (1u << bps); ++pattern) {
            std::vector<std::uint8_t> bits(bps);
            for (unsigned k = 0; k < bps; ++k) bits[k] = (pattern >> (bps - 1 - k)) & 1u;
            const cplx got = qam_point(bits.data(), order);
            const cplx want = oracle_point(bits, order);
            INFO("order " << order << " pattern " << pattern);
            REQUIRE(std::abs(got - want) < 1e-12);
        }
    }
}

TEST_CASE("frozen mapper spot values") {
    const std::uint8_t z8[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    REQUIRE(std::abs(qam_point(z8, 4) - cplx{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}) < 1e-15);
    REQUIRE(std::abs(qam_point(z8, 64) - cplx{3.0 / std::sqrt(42.0), 3.0 / std::sqrt(42.0)}) <
            1e-15);
    REQUIRE(std::abs(qam_point(z8, 256) - cplx{5.0 / std::sqrt(170.0), 5.0 / std::sqrt(170.0)}) <
            1e-15);
}

TEST_CASE("every QPSK symbol has unit magnitude") {
    Prbs23 prbs(0x12345);
    const auto syms = qam_modulate(prbs.bits(2000), 4);
    for (const auto& s : syms) REQUIRE(std::abs(s) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("constellation alphabets have unit mean power") {
    for (unsigned order : {4u, 64u, 256u}) {
        const unsigned bps = qam_bits_per_symbol(order);
        double acc = 0.0;
        for (unsigned pattern = 0; pattern < (1u << bps); ++pattern) {
            std::vector<std::uint8_t> bits(bps);
            for (unsigned k = 0; k < bps; ++k) bits[k] = (pattern >> (bps - 1 - k)) & 1u;
            acc += std::norm(qam_point(bits.data(), order));
        }
        REQUIRE(acc / static_cast<double>(1u << bps) == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gray property: adjacent levels differ in one bit") {
    // walk the 64-QAM I axis: levels -7..7 in order
    std::vector<unsigned> codes(8);
    for (unsigned pattern = 0; pattern < 64; ++pattern) {
        std::vector<std::uint8_t> bits(6);
        for (unsigned k = 0; k < 6; ++k) bits[k] = (pattern >> (5 - k)) & 1u;
        const cplx p = qam_point(bits.data(), 64);
        const int level = static_cast<int>(std::round(p.real() * std::sqrt(42.0)));
        const unsigned idx = static_cast<unsigned>((level + 7) / 2);
        codes[idx] = (bits[0] << 2) | (bits[2] << 1) | bits[4];
    }
    for (std::size_t i = 1; i < codes.size(); ++i) {
        const unsigned diff = codes[i] ^ codes[i - 1];
        REQUIRE((diff & (diff - 1)) == 0);  // exactly one bit flips
        REQUIRE(diff != 0);
    }
}

TEST_CASE("bit count must divide the symbol size") {
    std::vector<std::uint8_t> bits(7, 0);
    REQUIRE_THROWS_AS(qam_modulate(bits, 4), InputError);
    REQUIRE_THROWS_AS(qam_modulate(bits, 64), InputError);
    REQUIRE_THROWS_AS(qam_modulate(bits, 16), InputError);  // unsupported order
}

TEST_CASE("prbs23 is deterministic and balanced") {
    Prbs23 a(0x44cf21), b(0x44cf21);
    const auto x = a.bits(100000);
    const auto y = b.bits(100000);
    REQUIRE(x == y);
    double ones = 0.0;
    for (auto v : x) ones += v;
    REQUIRE(ones / 100000.0 == Catch::Approx(0.5).margin(0.01));

    Prbs23 c(0x000001);
    const auto z = c.bits(64);
    REQUIRE(z != std::vector<std::uint8_t>(64, 0));
}
