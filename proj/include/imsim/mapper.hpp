#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "imsim/config.hpp"
#include "imsim/constellation.hpp"

namespace imsim {

/// Time-slot activation pattern: the strictly increasing indices of the T_a
/// slots that carry signal.
struct Tap {
    std::vector<int> active;
};

/// Structured transmit decision for one frame.
struct Codeword {
    std::uint32_t tap_rank = 0;
    std::vector<std::uint8_t> antenna;   // T_a x G, slot-major; values in [0, N_tg)
    std::vector<std::uint16_t> symbol;   // per active slot; values in [0, M)
};

/// Complex transmit vector of length T * N_t, slot-major: slot t occupies
/// entries [t * N_t, (t + 1) * N_t).
struct FrameSignal {
    std::vector<std::complex<double>> values;
};

class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 22;

/// Information bits carried per frame:
/// floor(log2 C(T, T_a)) + T_a * (G * log2 N_tg + log2 M).
int bits_per_frame(const ValidatedConfig& config);

/// rank-th T_a-combination of {0..T-1} in lexicographic order of the sorted
/// index tuples. Throws std::out_of_range for rank >= 2^p.
Tap rank_to_tap(std::uint32_t rank, int frame_slots, int active_slots);
std::uint32_t tap_to_rank(const Tap& tap, int frame_slots, int active_slots);

/// Bit strings are MSB-first: bit 0 of the frame is the highest bit of the
/// packed word.
std::uint64_t pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::uint64_t word, int count);

/// Field split, in order: p time-index bits, then per active slot (ascending
/// slot order) G antenna fields of log2 N_tg bits (group 0 first), then
/// log2 M symbol bits.
Codeword encode_frame_word(std::uint64_t bits, const ValidatedConfig& config);
std::uint64_t decode_frame_word(const Codeword& codeword, const ValidatedConfig& config);

Codeword encode_frame(std::span<const std::uint8_t> bits, const ValidatedConfig& config);
std::vector<std::uint8_t> decode_frame(const Codeword& codeword, const ValidatedConfig& config);

/// Nonzero entry (t * N_t + g * N_tg + antenna) = amplitude * x for every
/// active slot t and group g; all other entries exactly zero.
FrameSignal codeword_to_signal(const Codeword& codeword, const ValidatedConfig& config,
                               const Constellation& constellation);

/// Streams every codeword exactly once, in the bit-lexicographic order
/// induced by decode_frame. Restartable via reset().
class CodebookEnumerator {
public:
    CodebookEnumerator(const ValidatedConfig& config, const Constellation& constellation,
                       std::uint64_t cap = kDefaultEnumerationCap);

    std::uint64_t size() const { return size_; }
    bool next(Codeword& codeword, FrameSignal& signal);
    void reset() { index_ = 0; }

private:
    const ValidatedConfig& config_;
    const Constellation& constellation_;
    std::uint64_t size_ = 0;
    std::uint64_t index_ = 0;
};

}  // namespace imsim
