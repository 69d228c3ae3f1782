#include "imsim/config.hpp"

#include <bit>
#include <cmath>

namespace imsim {

bool is_power_of_two(std::uint64_t value) { return value != 0 && (value & (value - 1)) == 0; }

int floor_log2(std::uint64_t value) {
    if (value == 0) throw std::domain_error("floor_log2 of zero");
    return 63 - std::countl_zero(value);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // exact at every step: result * (n-k+i) is divisible by i
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (result > UINT64_MAX / num) throw std::overflow_error("binomial overflows 64 bits");
        result = result * num / static_cast<std::uint64_t>(i);
    }
    return result;
}

int ValidatedConfig::tap_index_bits() const {
    return floor_log2(binomial(cfg_.frame_slots, cfg_.active_slots));
}

int ValidatedConfig::antenna_bits_per_slot() const {
    return cfg_.groups * floor_log2(static_cast<std::uint64_t>(cfg_.group_size));
}

int ValidatedConfig::symbol_bits_per_slot() const {
    return floor_log2(static_cast<std::uint64_t>(cfg_.mod_order));
}

double ValidatedConfig::amplitude() const {
    return cfg_.normalization == Normalization::PER_SLOT_UNIT
               ? 1.0 / std::sqrt(static_cast<double>(cfg_.groups))
               : 1.0;
}

namespace {

bool is_square(int value) {
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(value))));
    return r * r == value;
}

}  // namespace

ValidatedConfig validate(const SchemeConfig& config) {
    SchemeConfig c = config;
    const bool grouped = c.scheme == SchemeKind::PSM || c.scheme == SchemeKind::TI_PSM;
    const bool time_indexed = c.scheme == SchemeKind::TI_SM || c.scheme == SchemeKind::TI_PSM;

    if (c.n_rx < 1) throw ConfigError("n_rx", "must be a positive integer");
    if (c.n_tx < 2) throw ConfigError("n_tx", "need at least two transmit antennas");
    if (c.groups < 1) throw ConfigError("groups", "must be a positive integer");

    if (!grouped && c.groups != 1)
        throw ConfigError("groups", "SM and TI-SM use a single antenna group");
    if (grouped) {
        if (c.n_tx <= 2) throw ConfigError("n_tx", "grouped schemes need more than two antennas");
        if (c.groups <= 1) throw ConfigError("groups", "grouped schemes need more than one group");
        if (2 * c.groups > c.n_tx)
            throw ConfigError("groups", "at most n_tx / 2 groups (two antennas per group)");
    }

    if (c.n_tx % c.groups != 0)
        throw ConfigError("groups", "groups must divide n_tx exactly");
    const int derived_group_size = c.n_tx / c.groups;
    if (c.group_size != 0 && c.group_size != derived_group_size)
        throw ConfigError("group_size", "inconsistent with n_tx / groups");
    c.group_size = derived_group_size;
    if (c.group_size < 2 || !is_power_of_two(static_cast<std::uint64_t>(c.group_size))) {
        throw ConfigError(c.groups == 1 ? "n_tx" : "group_size",
                          "per-group antenna count must be a power of two (>= 2)");
    }

    if (c.mod_order < 2 || !is_power_of_two(static_cast<std::uint64_t>(c.mod_order)))
        throw ConfigError("mod_order", "must be a power of two (>= 2)");
    if (c.family == ConstellationFamily::QAM && c.mod_order != 2 && !is_square(c.mod_order))
        throw ConfigError("mod_order", "QAM needs a square constellation (or M = 2)");

    if (c.frame_slots < 1) throw ConfigError("frame_slots", "must be a positive integer");
    if (c.frame_slots > 32)
        throw ConfigError("frame_slots", "at most 32 slots (exact 64-bit combinatorics)");
    if (!time_indexed && (c.frame_slots != 1 || c.active_slots != 1))
        throw ConfigError("frame_slots", "SM and PSM are single-slot schemes (T = T_a = 1)");
    if (c.active_slots < 1 || c.active_slots > c.frame_slots)
        throw ConfigError("active_slots", "need 1 <= T_a <= T");

    if (c.taps < 1) throw ConfigError("taps", "must be a positive integer");
    if (c.taps > c.frame_slots)
        throw ConfigError("taps", "tap count must not exceed frame_slots");

    ValidatedConfig v(c);
    const int bits = v.tap_index_bits() +
                     c.active_slots * (v.antenna_bits_per_slot() + v.symbol_bits_per_slot());
    if (bits > 62) throw ConfigError("config", "frame carries more than 62 bits");
    return v;
}

Rate spectral_efficiency(const ValidatedConfig& config) {
    const std::int64_t bits =
        config.tap_index_bits() +
        static_cast<std::int64_t>(config.active_slots()) *
            (config.antenna_bits_per_slot() + config.symbol_bits_per_slot());
    return Rate(bits, config.frame_slots() + config.taps() - 1);
}

std::uint64_t codebook_size(const ValidatedConfig& config) {
    const std::uint64_t per_slot =
        (std::uint64_t{1} << config.antenna_bits_per_slot()) *
        static_cast<std::uint64_t>(config.mod_order());
    switch (config.scheme()) {
        case SchemeKind::SM:
        case SchemeKind::PSM:
            return per_slot;
        case SchemeKind::TI_SM:
        case SchemeKind::TI_PSM: {
            std::uint64_t size = std::uint64_t{1} << config.tap_index_bits();
            for (int i = 0; i < config.active_slots(); ++i) size *= per_slot;
            return size;
        }
    }
    throw std::logic_error("unknown scheme");
}

std::string to_string(SchemeKind scheme) {
    switch (scheme) {
        case SchemeKind::SM: return "SM";
        case SchemeKind::PSM: return "PSM";
        case SchemeKind::TI_SM: return "TI_SM";
        case SchemeKind::TI_PSM: return "TI_PSM";
    }
    return "?";
}

std::string to_string(ConstellationFamily family) {
    return family == ConstellationFamily::PSK ? "PSK" : "QAM";
}

std::string to_string(Normalization normalization) {
    return normalization == Normalization::PER_SLOT_UNIT ? "PER_SLOT_UNIT" : "PER_ANTENNA_UNIT";
}

std::string to_string(ChannelTimeModel model) {
    return model == ChannelTimeModel::PER_SLOT_IID ? "PER_SLOT_IID" : "PER_FRAME_QUASI_STATIC";
}

}  // namespace imsim
