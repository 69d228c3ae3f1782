#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "imsim/config.hpp"

namespace imsim {

/// Unit-average-energy alphabet indexed by bit label value: symbols[m] is the
/// point transmitted for the log2(M)-bit label m, and the geometry is Gray
/// arranged so that ring / per-axis lattice neighbours differ in one bit.
struct Constellation {
    int order = 0;  // M
    int bits = 0;   // log2(M)
    ConstellationFamily family = ConstellationFamily::PSK;
    std::vector<std::complex<double>> symbols;
    std::vector<std::uint32_t> labels;  // labels[m] == m; kept for dump output

    double average_energy() const;
};

std::uint32_t gray_encode(std::uint32_t value);
std::uint32_t gray_decode(std::uint32_t value);

/// PSK for any power-of-two M; QAM for square M or M = 2.
/// Throws ConfigError("mod_order", ...) for unsupported pairs.
Constellation build_constellation(int order, ConstellationFamily family);

}  // namespace imsim
