#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imsim/channel.hpp"
#include "imsim/config.hpp"

namespace imsim {

struct StoppingRule {
    std::uint64_t min_bit_errors = 200;
    std::uint64_t max_frames = 20'000'000;
    std::uint64_t min_frames = 10'000;
};

enum class CsiMode { PERFECT, CEE };
enum class DetectorKind { AUTO, DECOMPOSED, BRUTE_FORCE };
enum class StopReason { MIN_ERRORS, MAX_FRAMES };

struct BerRecord {
    std::string label;
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bit_errors_time = 0;
    std::uint64_t bit_errors_antenna = 0;
    std::uint64_t bit_errors_symbol = 0;
    double ber = 0.0;
    double ci95 = 0.0;  // normal-approximation half width
    StopReason stop = StopReason::MAX_FRAMES;
};

struct RunSettings {
    CsiMode csi = CsiMode::PERFECT;
    CsiErrorScope cee_scope = CsiErrorScope::FULL_MATRIX;
    double sigma_e2_scale = 1.0;  // sigma_e2 = scale * n0
    SnrAxis axis = SnrAxis::ES_N0;
    DetectorKind detector = DetectorKind::AUTO;
    StoppingRule stopping{};
    std::uint64_t master_seed = 1;
    int threads = 1;  // 0 = hardware concurrency; never changes results
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

/// Runs i.i.d. frames until the stopping rule fires. Every frame owns a
/// random stream derived from (master_seed, snr_db bits, frame index), so
/// the record is identical for any thread count and any sweep order.
/// Stopping is evaluated at fixed batch boundaries.
BerRecord run_point(const ValidatedConfig& config, double snr_db, const RunSettings& settings);

std::vector<BerRecord> run_sweep(const ValidatedConfig& config, std::span<const double> snr_db,
                                 const RunSettings& settings);

struct BerPoint {
    double snr_db = 0.0;
    double ber = 0.0;
};

struct CurveCrossing {
    double snr_db = 0.0;  // interpolated SNR at the target BER
    BerPoint lower;       // bracketing point at or above the target
    BerPoint upper;       // bracketing point at or below the target
};

/// Linear interpolation of SNR against log10(BER) between the bracketing
/// points. Throws std::domain_error when the curve does not cross the target.
CurveCrossing snr_at_ber(std::span<const BerPoint> curve, double target_ber);

/// SNR_b(target) - SNR_a(target): positive when curve a reaches the target
/// BER at lower SNR than curve b.
double gap_at_ber(std::span<const BerPoint> curve_a, std::span<const BerPoint> curve_b,
                  double target_ber);

std::vector<BerPoint> to_points(std::span<const BerRecord> records);

std::string to_string(StopReason reason);
std::string to_string(CsiMode mode);

}  // namespace imsim
