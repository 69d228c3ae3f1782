#include "imsim/constellation.hpp"

#include <cmath>

namespace imsim {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

std::uint32_t gray_encode(std::uint32_t value) { return value ^ (value >> 1); }

std::uint32_t gray_decode(std::uint32_t value) {
    std::uint32_t out = value;
    for (std::uint32_t shift = 1; shift < 32; shift <<= 1) out ^= out >> shift;
    return out;
}

double Constellation::average_energy() const {
    double sum = 0.0;
    for (const auto& s : symbols) sum += std::norm(s);
    return sum / static_cast<double>(order);
}

namespace {

// Ring position k as a complex point, exact on the axes.
std::complex<double> psk_point(int k, int order) {
    const int quarter = 4 * k;
    if (quarter % order == 0) {
        switch ((quarter / order) & 3) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            case 3: return {0.0, -1.0};
        }
    }
    const double angle = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(order);
    return {std::cos(angle), std::sin(angle)};
}

Constellation build_psk(int order) {
    Constellation c;
    c.order = order;
    c.bits = floor_log2(static_cast<std::uint64_t>(order));
    c.family = ConstellationFamily::PSK;
    c.symbols.resize(order);
    c.labels.resize(order);
    for (int m = 0; m < order; ++m) {
        // label m sits at ring position gray_decode(m), so ring neighbours
        // carry labels that differ in exactly one bit
        const int position = static_cast<int>(gray_decode(static_cast<std::uint32_t>(m)));
        c.symbols[m] = psk_point(position, order);
        c.labels[m] = static_cast<std::uint32_t>(m);
    }
    return c;
}

Constellation build_qam(int order) {
    Constellation c;
    c.order = order;
    c.bits = floor_log2(static_cast<std::uint64_t>(order));
    c.family = ConstellationFamily::QAM;
    c.symbols.resize(order);
    c.labels.resize(order);

    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    const int axis_bits = c.bits / 2;
    const double scale = std::sqrt(3.0 / (2.0 * (order - 1)));
    for (int m = 0; m < order; ++m) {
        const std::uint32_t i_label = static_cast<std::uint32_t>(m) >> axis_bits;
        const std::uint32_t q_label = static_cast<std::uint32_t>(m) & ((1u << axis_bits) - 1);
        const int i_level = static_cast<int>(gray_decode(i_label));
        const int q_level = static_cast<int>(gray_decode(q_label));
        c.symbols[m] = {scale * (2 * i_level - (side - 1)), scale * (2 * q_level - (side - 1))};
        c.labels[m] = static_cast<std::uint32_t>(m);
    }
    return c;
}

}  // namespace

Constellation build_constellation(int order, ConstellationFamily family) {
    if (order < 2 || !is_power_of_two(static_cast<std::uint64_t>(order)))
        throw ConfigError("mod_order", "constellation order must be a power of two (>= 2)");
    if (family == ConstellationFamily::PSK) return build_psk(order);

    if (order == 2) {
        Constellation c = build_psk(2);  // BPSK; QAM degenerates to the same points
        c.family = ConstellationFamily::QAM;
        return c;
    }
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    if (side * side != order)
        throw ConfigError("mod_order", "QAM needs a square constellation (or M = 2)");
    return build_qam(order);
}

}  // namespace imsim
