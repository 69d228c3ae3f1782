#include "imsim/mapper.hpp"

#include <algorithm>

namespace imsim {

int bits_per_frame(const ValidatedConfig& config) {
    return config.tap_index_bits() +
           config.active_slots() *
               (config.antenna_bits_per_slot() + config.symbol_bits_per_slot());
}

Tap rank_to_tap(std::uint32_t rank, int frame_slots, int active_slots) {
    const int p = floor_log2(binomial(frame_slots, active_slots));
    if (rank >= (std::uint64_t{1} << p)) throw std::out_of_range("tap rank out of range");

    Tap tap;
    tap.active.reserve(active_slots);
    std::uint64_t remaining = rank;
    int next = 0;
    for (int i = 0; i < active_slots; ++i) {
        for (int candidate = next;; ++candidate) {
            // combinations that keep `candidate` as the i-th (smallest free) slot
            const std::uint64_t block = binomial(frame_slots - 1 - candidate, active_slots - 1 - i);
            if (remaining < block) {
                tap.active.push_back(candidate);
                next = candidate + 1;
                break;
            }
            remaining -= block;
        }
    }
    return tap;
}

std::uint32_t tap_to_rank(const Tap& tap, int frame_slots, int active_slots) {
    if (static_cast<int>(tap.active.size()) != active_slots)
        throw std::invalid_argument("tap size does not match active_slots");
    std::uint64_t rank = 0;
    int next = 0;
    for (int i = 0; i < active_slots; ++i) {
        const int slot = tap.active[i];
        if (slot < next || slot >= frame_slots)
            throw std::invalid_argument("tap indices must be strictly increasing and < frame_slots");
        for (int candidate = next; candidate < slot; ++candidate)
            rank += binomial(frame_slots - 1 - candidate, active_slots - 1 - i);
        next = slot + 1;
    }
    return static_cast<std::uint32_t>(rank);
}

std::uint64_t pack_bits(std::span<const std::uint8_t> bits) {
    std::uint64_t word = 0;
    for (const auto b : bits) word = (word << 1) | (b & 1u);
    return word;
}

std::vector<std::uint8_t> unpack_bits(std::uint64_t word, int count) {
    std::vector<std::uint8_t> bits(count);
    for (int i = 0; i < count; ++i)
        bits[i] = static_cast<std::uint8_t>((word >> (count - 1 - i)) & 1u);
    return bits;
}

namespace {

// MSB-first field extraction from the low `total` bits of `word`.
struct FieldReader {
    std::uint64_t word;
    int remaining;
    std::uint64_t take(int width) {
        remaining -= width;
        return (word >> remaining) & ((std::uint64_t{1} << width) - 1);
    }
};

}  // namespace

Codeword encode_frame_word(std::uint64_t bits, const ValidatedConfig& config) {
    const int p = config.tap_index_bits();
    const int group_bits = floor_log2(static_cast<std::uint64_t>(config.group_size()));
    const int symbol_bits = config.symbol_bits_per_slot();
    const int g = config.groups();
    const int slots = config.active_slots();

    FieldReader reader{bits, bits_per_frame(config)};
    Codeword cw;
    cw.tap_rank = p > 0 ? static_cast<std::uint32_t>(reader.take(p)) : 0;
    cw.antenna.resize(static_cast<std::size_t>(slots) * g);
    cw.symbol.resize(slots);
    for (int s = 0; s < slots; ++s) {
        for (int j = 0; j < g; ++j)
            cw.antenna[static_cast<std::size_t>(s) * g + j] =
                static_cast<std::uint8_t>(reader.take(group_bits));
        cw.symbol[s] = static_cast<std::uint16_t>(symbol_bits > 0 ? reader.take(symbol_bits) : 0);
    }
    return cw;
}

std::uint64_t decode_frame_word(const Codeword& codeword, const ValidatedConfig& config) {
    const int p = config.tap_index_bits();
    const int group_bits = floor_log2(static_cast<std::uint64_t>(config.group_size()));
    const int symbol_bits = config.symbol_bits_per_slot();
    const int g = config.groups();
    const int slots = config.active_slots();

    std::uint64_t word = codeword.tap_rank & ((std::uint64_t{1} << p) - 1);
    for (int s = 0; s < slots; ++s) {
        for (int j = 0; j < g; ++j)
            word = (word << group_bits) | codeword.antenna[static_cast<std::size_t>(s) * g + j];
        word = (word << symbol_bits) | codeword.symbol[s];
    }
    return word;
}

Codeword encode_frame(std::span<const std::uint8_t> bits, const ValidatedConfig& config) {
    if (static_cast<int>(bits.size()) != bits_per_frame(config))
        throw std::invalid_argument("bit count does not match bits_per_frame");
    return encode_frame_word(pack_bits(bits), config);
}

std::vector<std::uint8_t> decode_frame(const Codeword& codeword, const ValidatedConfig& config) {
    return unpack_bits(decode_frame_word(codeword, config), bits_per_frame(config));
}

FrameSignal codeword_to_signal(const Codeword& codeword, const ValidatedConfig& config,
                               const Constellation& constellation) {
    const int n_tx = config.n_tx();
    const int g = config.groups();
    const int group_size = config.group_size();
    const double amplitude = config.amplitude();

    FrameSignal signal;
    signal.values.assign(static_cast<std::size_t>(config.frame_slots()) * n_tx, {0.0, 0.0});

    const Tap tap = rank_to_tap(codeword.tap_rank, config.frame_slots(), config.active_slots());
    for (int s = 0; s < config.active_slots(); ++s) {
        const int slot = tap.active[s];
        const std::complex<double> value =
            amplitude * constellation.symbols[codeword.symbol[s]];
        for (int j = 0; j < g; ++j) {
            const int pos = slot * n_tx + j * group_size +
                            codeword.antenna[static_cast<std::size_t>(s) * g + j];
            signal.values[pos] = value;
        }
    }
    return signal;
}

CodebookEnumerator::CodebookEnumerator(const ValidatedConfig& config,
                                       const Constellation& constellation, std::uint64_t cap)
    : config_(config), constellation_(constellation), size_(codebook_size(config)) {
    if (size_ > cap) throw CapExceededError("codebook size exceeds the enumeration cap");
}

bool CodebookEnumerator::next(Codeword& codeword, FrameSignal& signal) {
    if (index_ >= size_) return false;
    codeword = encode_frame_word(index_, config_);
    signal = codeword_to_signal(codeword, config_, constellation_);
    ++index_;
    return true;
}

}  // namespace imsim
