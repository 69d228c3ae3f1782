#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "imsim/mapper.hpp"
#include "imsim/rng.hpp"

using namespace imsim;

namespace {

SchemeConfig make(SchemeKind scheme, int n_tx, int groups, int mod_order, int frame_slots = 1,
                  int active_slots = 1) {
    SchemeConfig c;
    c.scheme = scheme;
    c.n_tx = n_tx;
    c.n_rx = 4;
    c.groups = groups;
    c.mod_order = mod_order;
    c.frame_slots = frame_slots;
    c.active_slots = active_slots;
    return c;
}

// Independent oracle: all k-combinations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> lex_combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    std::function<void(int, int)> rec = [&](int start, int need) {
        if (need == 0) {
            out.push_back(current);
            return;
        }
        for (int i = start; i <= n - need; ++i) {
            current.push_back(i);
            rec(i + 1, need - 1);
            current.pop_back();
        }
    };
    rec(0, k);
    return out;
}

}  // namespace

TEST_SUITE("mapper") {

TEST_CASE("bits per frame") {
    CHECK(bits_per_frame(validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2))) == 16);
    CHECK(bits_per_frame(validate(make(SchemeKind::TI_SM, 8, 1, 16, 4, 2))) == 16);
    CHECK(bits_per_frame(validate(make(SchemeKind::SM, 4, 1, 2))) == 3);  // no time-index bits
    CHECK(bits_per_frame(validate(make(SchemeKind::TI_SM, 4, 1, 2, 3, 3))) == 9);  // T_a == T
}

TEST_CASE("tap ranking matches lexicographic enumeration") {
    for (int n = 1; n <= 8; ++n) {
        for (int k = 1; k <= n; ++k) {
            const auto oracle = lex_combinations(n, k);
            const std::uint64_t usable = std::uint64_t{1} << floor_log2(binomial(n, k));
            for (std::uint64_t rank = 0; rank < usable; ++rank) {
                const Tap tap = rank_to_tap(static_cast<std::uint32_t>(rank), n, k);
                CHECK(tap.active == oracle[rank]);
                CHECK(tap_to_rank(tap, n, k) == rank);
            }
        }
    }
}

TEST_CASE("tap ranking examples") {
    CHECK(rank_to_tap(0, 4, 2).active == std::vector<int>{0, 1});
    CHECK(rank_to_tap(3, 4, 2).active == std::vector<int>{1, 2});
    CHECK(rank_to_tap(0, 5, 5).active == std::vector<int>{0, 1, 2, 3, 4});
    // C(4,2) = 6 patterns but only 2^2 = 4 usable ranks
    CHECK_THROWS_AS(rank_to_tap(4, 4, 2), std::out_of_range);
}

TEST_CASE("all-zero input selects the first element everywhere") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const std::vector<std::uint8_t> bits(16, 0);
    const Codeword cw = encode_frame(bits, config);
    CHECK(cw.tap_rank == 0);
    CHECK(rank_to_tap(cw.tap_rank, 4, 2).active == std::vector<int>{0, 1});
    for (const auto a : cw.antenna) CHECK(a == 0);
    for (const auto s : cw.symbol) CHECK(s == 0);
    CHECK(decode_frame(cw, config) == bits);
}

TEST_CASE("leading one lands in the time-index field") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    std::vector<std::uint8_t> bits(16, 0);
    bits[0] = 1;  // tap field "10" = rank 2
    const Codeword cw = encode_frame(bits, config);
    CHECK(cw.tap_rank == 2);
    CHECK(rank_to_tap(cw.tap_rank, 4, 2).active == std::vector<int>{0, 3});
    for (const auto a : cw.antenna) CHECK(a == 0);
    for (const auto s : cw.symbol) CHECK(s == 0);
}

TEST_CASE("wrong bit count is rejected") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const std::vector<std::uint8_t> bits(15, 0);
    CHECK_THROWS_AS(encode_frame(bits, config), std::invalid_argument);
}

TEST_CASE("exhaustive encode/decode round trip over 16-bit frames") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    for (std::uint64_t word = 0; word < (std::uint64_t{1} << 16); ++word) {
        const Codeword cw = encode_frame_word(word, config);
        REQUIRE(decode_frame_word(cw, config) == word);
    }
}

TEST_CASE("random round trip on a 54-bit frame") {
    // too large to enumerate: sample the bijection instead
    SchemeConfig raw = make(SchemeKind::TI_PSM, 16, 4, 16, 8, 4);
    const ValidatedConfig config = validate(raw);
    REQUIRE(bits_per_frame(config) == 54);  // floor(log2 C(8,4)) + 4 * (8 + 4)
    RandomStream rng(808);
    for (int i = 0; i < 100'000; ++i) {
        const std::uint64_t word = rng.next_bits(54);
        REQUIRE(decode_frame_word(encode_frame_word(word, config), config) == word);
    }
}

TEST_CASE("QAM frames carry unit slot energy in expectation") {
    SchemeConfig raw = make(SchemeKind::TI_PSM, 4, 2, 4, 3, 2);
    raw.family = ConstellationFamily::QAM;
    const ValidatedConfig config = validate(raw);
    const Constellation qam = build_constellation(4, ConstellationFamily::QAM);
    CodebookEnumerator stream(config, qam);
    Codeword cw;
    FrameSignal signal;
    double energy = 0.0;
    std::uint64_t count = 0;
    while (stream.next(cw, signal)) {
        for (const auto& v : signal.values) energy += std::norm(v);
        ++count;
    }
    // averaged over the whole codebook the frame energy is exactly T_a
    CHECK(std::abs(energy / static_cast<double>(count) - 2.0) < 1e-9);
}

TEST_CASE("pack/unpack are inverses and MSB-first") {
    const std::vector<std::uint8_t> bits{1, 0, 1, 1, 0};
    CHECK(pack_bits(bits) == 0b10110);
    CHECK(unpack_bits(0b10110, 5) == bits);
}

TEST_CASE("signal synthesis places the group vectors") {
    // one slot, three groups of four antennas, BPSK, unit per-antenna amplitude
    SchemeConfig raw = make(SchemeKind::PSM, 12, 3, 2);
    raw.normalization = Normalization::PER_ANTENNA_UNIT;
    const ValidatedConfig config = validate(raw);
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);

    Codeword cw;
    cw.tap_rank = 0;
    cw.antenna = {1, 0, 0};  // group 0 uses its second antenna
    cw.symbol = {1};         // BPSK -1
    const FrameSignal signal = codeword_to_signal(cw, config, bpsk);
    // group 0 block reads [0, -1, 0, 0]
    CHECK(signal.values[0] == std::complex<double>{0.0, 0.0});
    CHECK(signal.values[1] == std::complex<double>{-1.0, 0.0});
    CHECK(signal.values[2] == std::complex<double>{0.0, 0.0});
    CHECK(signal.values[3] == std::complex<double>{0.0, 0.0});
    // remaining groups carry the same symbol at their first antenna
    CHECK(signal.values[4] == std::complex<double>{-1.0, 0.0});
    CHECK(signal.values[8] == std::complex<double>{-1.0, 0.0});
}

TEST_CASE("per-slot normalization yields unit slot energy") {
    const ValidatedConfig config = validate(make(SchemeKind::PSM, 8, 4, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    Codeword cw;
    cw.tap_rank = 0;
    cw.antenna = {0, 0, 0, 0};
    cw.symbol = {0};
    const FrameSignal signal = codeword_to_signal(cw, config, bpsk);
    double energy = 0.0;
    int nonzero = 0;
    for (const auto& v : signal.values) {
        energy += std::norm(v);
        if (v != std::complex<double>{0.0, 0.0}) {
            ++nonzero;
            CHECK(v == std::complex<double>{0.5, 0.0});
        }
    }
    CHECK(nonzero == 4);
    CHECK(std::abs(energy - 1.0) < 1e-12);
}

TEST_CASE("inactive slots are exactly zero") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    const Codeword cw = encode_frame_word(0, config);  // tap {0, 1}
    const FrameSignal signal = codeword_to_signal(cw, config, psk);
    for (int slot : {2, 3})
        for (int i = 0; i < 8; ++i)
            CHECK(signal.values[static_cast<std::size_t>(slot) * 8 + i] ==
                  std::complex<double>{0.0, 0.0});
}

TEST_CASE("enumeration counts and structural invariants") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    CodebookEnumerator stream(config, psk);
    CHECK(stream.size() == 65536);

    Codeword cw;
    FrameSignal signal;
    std::uint64_t count = 0;
    while (stream.next(cw, signal)) {
        if (count % 97 == 0) {  // structural spot checks along the stream
            int active = 0;
            double energy = 0.0;
            for (int slot = 0; slot < 4; ++slot) {
                std::set<std::complex<double>, bool (*)(const std::complex<double>&,
                                                        const std::complex<double>&)>
                    values([](const std::complex<double>& a, const std::complex<double>& b) {
                        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
                    });
                int nonzero = 0;
                for (int i = 0; i < 8; ++i) {
                    const auto v = signal.values[static_cast<std::size_t>(slot) * 8 + i];
                    energy += std::norm(v);
                    if (v != std::complex<double>{0.0, 0.0}) {
                        ++nonzero;
                        values.insert(v);
                    }
                }
                if (nonzero > 0) {
                    ++active;
                    CHECK(nonzero == 4);          // one antenna per group
                    CHECK(values.size() == 1);    // same symbol in every group
                }
            }
            CHECK(active == 2);
            CHECK(std::abs(energy - 2.0) < 1e-12);  // T_a unit-energy slots
        }
        ++count;
    }
    CHECK(count == 65536);

    stream.reset();
    CHECK(stream.next(cw, signal));
    CHECK(decode_frame_word(cw, config) == 0);
}

TEST_CASE("small codebooks enumerate distinct signals") {
    const ValidatedConfig config = validate(make(SchemeKind::PSM, 4, 2, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    CodebookEnumerator stream(config, bpsk);
    CHECK(stream.size() == 8);

    std::set<std::vector<std::pair<double, double>>> seen;
    Codeword cw;
    FrameSignal signal;
    while (stream.next(cw, signal)) {
        std::vector<std::pair<double, double>> key;
        for (const auto& v : signal.values) key.emplace_back(v.real(), v.imag());
        seen.insert(key);
    }
    CHECK(seen.size() == 8);
}

TEST_CASE("enumeration cap") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    CHECK_THROWS_AS(CodebookEnumerator(config, psk, 1024), CapExceededError);
}

}  // TEST_SUITE
