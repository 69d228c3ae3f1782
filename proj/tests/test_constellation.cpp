#include <doctest.h>

#include <bit>
#include <cmath>
#include <set>

#include "imsim/constellation.hpp"

using namespace imsim;

TEST_SUITE("constellation") {

TEST_CASE("gray code round trip") {
    for (std::uint32_t v = 0; v < 256; ++v) {
        CHECK(gray_decode(gray_encode(v)) == v);
        CHECK(gray_encode(gray_decode(v)) == v);
    }
    CHECK(gray_encode(0) == 0);
    CHECK(gray_encode(1) == 1);
    CHECK(gray_encode(2) == 3);
    CHECK(gray_encode(3) == 2);
}

TEST_CASE("BPSK is exactly +1 / -1") {
    const Constellation c = build_constellation(2, ConstellationFamily::PSK);
    CHECK(c.symbols[0] == std::complex<double>{1.0, 0.0});
    CHECK(c.symbols[1] == std::complex<double>{-1.0, 0.0});
}

TEST_CASE("QPSK labels walk the ring as 00 01 11 10") {
    const Constellation c = build_constellation(4, ConstellationFamily::PSK);
    // ring positions 0..3 carry labels 0, 1, 3, 2
    CHECK(c.symbols[0] == std::complex<double>{1.0, 0.0});
    CHECK(c.symbols[1] == std::complex<double>{0.0, 1.0});
    CHECK(c.symbols[3] == std::complex<double>{-1.0, 0.0});
    CHECK(c.symbols[2] == std::complex<double>{0.0, -1.0});
}

TEST_CASE("16-QAM sits on the odd lattice scaled by 1/sqrt(10)") {
    const Constellation c = build_constellation(16, ConstellationFamily::QAM);
    const double unit = 1.0 / std::sqrt(10.0);
    double energy = 0.0;  // direct summation
    for (const auto& s : c.symbols) {
        const double re = s.real() / unit;
        const double im = s.imag() / unit;
        CHECK(std::abs(std::abs(re) - 1.0) * std::abs(std::abs(re) - 3.0) < 1e-9);
        CHECK(std::abs(std::abs(im) - 1.0) * std::abs(std::abs(im) - 3.0) < 1e-9);
        energy += std::norm(s);
    }
    CHECK(std::abs(energy / 16.0 - 1.0) < 1e-12);
}

TEST_CASE("unit average energy for every supported alphabet") {
    for (int m : {2, 4, 8, 16, 32, 64}) {
        const Constellation c = build_constellation(m, ConstellationFamily::PSK);
        CHECK(std::abs(c.average_energy() - 1.0) < 1e-12);
    }
    for (int m : {2, 4, 16, 64}) {
        const Constellation c = build_constellation(m, ConstellationFamily::QAM);
        CHECK(std::abs(c.average_energy() - 1.0) < 1e-12);
    }
}

TEST_CASE("labels are a bijection onto the index range") {
    for (int m : {4, 16, 64}) {
        const Constellation c = build_constellation(m, ConstellationFamily::PSK);
        std::set<std::uint32_t> seen(c.labels.begin(), c.labels.end());
        CHECK(static_cast<int>(seen.size()) == m);
        CHECK(*seen.rbegin() == static_cast<std::uint32_t>(m - 1));
    }
}

TEST_CASE("PSK ring neighbours differ in exactly one label bit") {
    for (int m : {4, 8, 16, 32, 64}) {
        const Constellation c = build_constellation(m, ConstellationFamily::PSK);
        // label at ring position k
        std::vector<std::uint32_t> at_position(m);
        for (int label = 0; label < m; ++label)
            at_position[gray_decode(static_cast<std::uint32_t>(label))] =
                static_cast<std::uint32_t>(label);
        for (int k = 0; k < m; ++k) {
            const std::uint32_t a = at_position[k];
            const std::uint32_t b = at_position[(k + 1) % m];
            CHECK(std::popcount(a ^ b) == 1);
        }
    }
}

TEST_CASE("QAM lattice neighbours differ in exactly one label bit per axis") {
    for (int m : {16, 64}) {
        const Constellation c = build_constellation(m, ConstellationFamily::QAM);
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
        const int axis_bits = c.bits / 2;
        // label placed at lattice cell (i, q)
        std::vector<std::uint32_t> grid(static_cast<std::size_t>(side) * side);
        for (int label = 0; label < m; ++label) {
            const int i = static_cast<int>(gray_decode(static_cast<std::uint32_t>(label) >> axis_bits));
            const int q = static_cast<int>(
                gray_decode(static_cast<std::uint32_t>(label) & ((1u << axis_bits) - 1)));
            grid[static_cast<std::size_t>(i) * side + q] = static_cast<std::uint32_t>(label);
        }
        for (int i = 0; i < side; ++i) {
            for (int q = 0; q < side; ++q) {
                if (i + 1 < side)
                    CHECK(std::popcount(grid[static_cast<std::size_t>(i) * side + q] ^
                                        grid[static_cast<std::size_t>(i + 1) * side + q]) == 1);
                if (q + 1 < side)
                    CHECK(std::popcount(grid[static_cast<std::size_t>(i) * side + q] ^
                                        grid[static_cast<std::size_t>(i) * side + q + 1]) == 1);
            }
        }
    }
}

TEST_CASE("unsupported pairs are rejected") {
    CHECK_THROWS_AS(build_constellation(8, ConstellationFamily::QAM), ConfigError);
    CHECK_THROWS_AS(build_constellation(32, ConstellationFamily::QAM), ConfigError);
    CHECK_THROWS_AS(build_constellation(3, ConstellationFamily::PSK), ConfigError);
    CHECK_THROWS_AS(build_constellation(1, ConstellationFamily::PSK), ConfigError);
}

}  // TEST_SUITE
