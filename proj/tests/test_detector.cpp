#include <doctest.h>

#include <cmath>

#include "imsim/channel.hpp"
#include "imsim/detector.hpp"

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

Eigen::MatrixXcd block_diagonal(const ChannelRealization& h) {
    return equivalent_matrix(h);
}

std::span<const Eigen::MatrixXcd> slots_of(const ChannelRealization& h) {
    return {h.slot_tap.data(), h.slot_tap.size()};
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("noiseless frames are recovered exactly") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    const DecomposedDetector decomposed(config, psk);
    const BruteForceDetector brute(config, psk);

    RandomStream rng = RandomStream::derive(1001, 0, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint64_t word = rng.next_bits(16);
        const Codeword cw = encode_frame_word(word, config);
        const FrameSignal signal = codeword_to_signal(cw, config, psk);
        const ChannelRealization h = draw_channel(config, rng);
        const Eigen::MatrixXcd eq = block_diagonal(h);
        const Eigen::VectorXcd y = apply_channel(eq, signal, NoiseSpec{0.0}, rng);

        const DetectionResult a = decomposed.detect(y, slots_of(h));
        CHECK(a.bits == word);
        CHECK(a.metric >= 0.0);
        CHECK(a.metric <= 1e-18);
        if (trial < 30) {
            const DetectionResult b = brute.detect(y, eq);
            CHECK(b.bits == word);
            CHECK(b.metric <= 1e-18);
        }
    }
}

TEST_CASE("decomposed equals brute force on noisy frames") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 4, 2, 2, 4, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    const DecomposedDetector decomposed(config, bpsk);
    const BruteForceDetector brute(config, bpsk);

    RandomStream rng = RandomStream::derive(77, 0, 0);
    const double n0 = 0.5;
    for (int trial = 0; trial < 3000; ++trial) {
        const std::uint64_t word = rng.next_bits(bits_per_frame(config));
        const FrameSignal signal =
            codeword_to_signal(encode_frame_word(word, config), config, bpsk);
        const ChannelRealization h = draw_channel(config, rng);
        const Eigen::MatrixXcd eq = block_diagonal(h);
        const Eigen::VectorXcd y = apply_channel(eq, signal, NoiseSpec{n0}, rng);

        const DetectionResult a = decomposed.detect(y, slots_of(h));
        const DetectionResult b = brute.detect(y, eq);
        REQUIRE(a.bits == b.bits);
        REQUIRE(std::abs(a.metric - b.metric) <= 1e-9 * std::max(1.0, b.metric));
    }
}

TEST_CASE("eight-codeword scheme matches a hand-rolled scan") {
    const ValidatedConfig config = validate(make(SchemeKind::PSM, 4, 2, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    const BruteForceDetector brute(config, bpsk);
    const DecomposedDetector decomposed(config, bpsk);
    CHECK(brute.codebook_entries() == 8);

    // independent enumeration of all 8 signals through the public mapper
    std::vector<Eigen::VectorXcd> candidates;
    for (std::uint64_t word = 0; word < 8; ++word) {
        const FrameSignal s = codeword_to_signal(encode_frame_word(word, config), config, bpsk);
        candidates.push_back(Eigen::Map<const Eigen::VectorXcd>(s.values.data(), 4));
    }

    RandomStream rng = RandomStream::derive(13, 0, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const ChannelRealization h = draw_channel(config, rng);
        const Eigen::MatrixXcd eq = block_diagonal(h);
        Eigen::VectorXcd y(4);
        for (int i = 0; i < 4; ++i) y(i) = rng.next_cgauss(2.0);

        std::uint64_t oracle_best = 0;
        double oracle_metric = std::numeric_limits<double>::infinity();
        for (std::uint64_t word = 0; word < 8; ++word) {
            const double metric = (y - eq * candidates[word]).squaredNorm();
            if (metric < oracle_metric) {
                oracle_metric = metric;
                oracle_best = word;
            }
        }

        const DetectionResult a = brute.detect(y, eq);
        CHECK(a.bits == oracle_best);
        CHECK(std::abs(a.metric - oracle_metric) <= 1e-9 * std::max(1.0, oracle_metric));
        CHECK(decomposed.detect(y, slots_of(h)).bits == oracle_best);
    }
}

TEST_CASE("zero observation picks the weakest candidate, exhaustively verified") {
    const ValidatedConfig config = validate(make(SchemeKind::SM, 4, 1, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    const BruteForceDetector brute(config, bpsk);

    ChannelRealization h;
    h.frame_slots = 1;
    h.taps = 1;
    h.n_rx = 4;
    h.n_tx = 4;
    h.slot_tap.resize(1);
    h.slot_tap[0].resize(4, 4);
    RandomStream rng = RandomStream::derive(4, 0, 0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            h.slot_tap[0](r, c) = {rng.next_double() * 2.0 - 1.0, 0.0};  // all-real channel

    const Eigen::VectorXcd y = Eigen::VectorXcd::Zero(4);
    const Eigen::MatrixXcd eq = equivalent_matrix(h);

    std::uint64_t oracle_best = 0;
    double oracle_metric = std::numeric_limits<double>::infinity();
    for (std::uint64_t word = 0; word < 8; ++word) {
        const FrameSignal s = codeword_to_signal(encode_frame_word(word, config), config, bpsk);
        const double metric =
            (eq * Eigen::Map<const Eigen::VectorXcd>(s.values.data(), 4)).squaredNorm();
        if (metric < oracle_metric) {
            oracle_metric = metric;
            oracle_best = word;
        }
    }
    // with y = 0 the metric is the received candidate energy
    CHECK(brute.detect(y, eq).bits == oracle_best);
}

TEST_CASE("ties break towards the smallest codeword deterministically") {
    const ValidatedConfig config = validate(make(SchemeKind::SM, 4, 1, 2));
    const Constellation bpsk = build_constellation(2, ConstellationFamily::PSK);
    const BruteForceDetector brute(config, bpsk);
    const DecomposedDetector decomposed(config, bpsk);

    // antennas 0 and 1 see identical columns, so codewords differing only in
    // that index bit tie exactly
    ChannelRealization h;
    h.frame_slots = 1;
    h.taps = 1;
    h.n_rx = 4;
    h.n_tx = 4;
    h.slot_tap.resize(1);
    h.slot_tap[0].resize(4, 4);
    RandomStream rng = RandomStream::derive(6, 0, 0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) h.slot_tap[0](r, c) = rng.next_cgauss(1.0);
    h.slot_tap[0].col(1) = h.slot_tap[0].col(0);

    const Eigen::MatrixXcd eq = equivalent_matrix(h);
    const Eigen::VectorXcd y = eq.col(0);  // exactly BPSK +1 from antenna 0 or 1

    const DetectionResult a = brute.detect(y, eq);
    const DetectionResult b = decomposed.detect(y, slots_of(h));
    CHECK(a.bits == b.bits);
    CHECK(a.codeword.antenna[0] == 0);  // smallest index wins the tie
    CHECK(brute.detect(y, eq).bits == a.bits);  // repeatable
}

TEST_CASE("demap returns the frame bit string") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    const DecomposedDetector decomposed(config, psk);
    const BruteForceDetector brute(config, psk);
    CHECK(decomposed.hypotheses_per_slot() == 128);

    RandomStream rng = RandomStream::derive(1234, 0, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint64_t word = rng.next_bits(16);
        const FrameSignal signal =
            codeword_to_signal(encode_frame_word(word, config), config, psk);
        const ChannelRealization h = draw_channel(config, rng);
        const Eigen::MatrixXcd eq = block_diagonal(h);
        Eigen::VectorXcd y = apply_channel(eq, signal, NoiseSpec{0.0}, rng);

        CHECK(detect_and_demap(decomposed, y, slots_of(h), config) == unpack_bits(word, 16));

        // an adversarial perturbation still yields a full-length bit string
        y(3) += std::complex<double>{4.0, -3.0};
        const auto bits_a = detect_and_demap(decomposed, y, slots_of(h), config);
        const auto bits_b = detect_and_demap(brute, y, eq, config);
        CHECK(bits_a.size() == 16);
        CHECK(bits_a == bits_b);
    }
}

TEST_CASE("codebook cap is enforced") {
    const ValidatedConfig config = validate(make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2));
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    CHECK_THROWS_AS(BruteForceDetector(config, psk, 1000), CapExceededError);
}

TEST_CASE("decomposed detection rejects multi-tap configs") {
    SchemeConfig raw = make(SchemeKind::TI_PSM, 8, 4, 8, 4, 2);
    raw.taps = 2;
    const ValidatedConfig config = validate(raw);
    const Constellation psk = build_constellation(8, ConstellationFamily::PSK);
    CHECK_THROWS_AS(DecomposedDetector(config, psk), std::invalid_argument);
}

}  // TEST_SUITE
