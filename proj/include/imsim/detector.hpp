#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "imsim/config.hpp"
#include "imsim/constellation.hpp"
#include "imsim/mapper.hpp"

namespace imsim {

struct DetectionResult {
    Codeword codeword;
    double metric = 0.0;       // residual ||y - H_est s||^2 at the decision
    std::uint64_t bits = 0;    // decode_frame_word(codeword)
};

/// Scratch buffers reused across detect calls. Each concurrent caller owns
/// its own workspace; detectors never mutate shared state.
struct DetectorWorkspace {
    std::vector<std::complex<double>> residual;
    std::vector<std::complex<double>> combo_sum;
    std::vector<double> slot_off;
    std::vector<double> slot_best;
    std::vector<std::int32_t> slot_hyp;
};

/// Reference maximum-likelihood search: evaluates ||y - H_est s||^2 for the
/// entire codebook in bit-lexicographic order, keeping the first minimum so
/// ties resolve to the smallest codeword. Works for any equivalent-matrix
/// structure, including multi-tap and fully corrupted estimates.
class BruteForceDetector {
public:
    BruteForceDetector(const ValidatedConfig& config, const Constellation& constellation,
                       std::uint64_t cap = kDefaultEnumerationCap);

    DetectionResult detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_est,
                           DetectorWorkspace& workspace) const;
    DetectionResult detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h_est) const;

    std::uint64_t codebook_entries() const { return entries_; }

private:
    const ValidatedConfig& config_;
    std::uint64_t entries_ = 0;
    int nnz_ = 0;  // nonzero signal entries per codeword (G * T_a)
    std::vector<std::int32_t> positions_;
    std::vector<std::complex<double>> values_;
};

/// Exact ML for single-tap frames with a block-diagonal channel estimate.
/// The frame metric separates per slot, so the search memoizes the best
/// per-slot hypothesis and the idle-slot energy, then minimizes over the
/// valid activation patterns. Result (codeword and metric) matches the
/// brute-force search.
class DecomposedDetector {
public:
    DecomposedDetector(const ValidatedConfig& config, const Constellation& constellation);

    DetectionResult detect(const Eigen::VectorXcd& y, std::span<const Eigen::MatrixXcd> h_slots,
                           DetectorWorkspace& workspace) const;
    DetectionResult detect(const Eigen::VectorXcd& y,
                           std::span<const Eigen::MatrixXcd> h_slots) const;

    /// Per-slot hypothesis count N_tg^G * M.
    int hypotheses_per_slot() const { return combos_ * mod_order_; }

private:
    const ValidatedConfig& config_;
    int combos_ = 0;      // N_tg^G antenna index combinations
    int mod_order_ = 0;   // M
    std::vector<std::int32_t> combo_cols_;            // combos_ x G column indices in a slot
    std::vector<std::complex<double>> scaled_symbols_;
    std::vector<Tap> taps_;                           // all 2^p patterns, rank order
};

std::vector<std::uint8_t> detect_and_demap(const BruteForceDetector& detector,
                                           const Eigen::VectorXcd& y,
                                           const Eigen::MatrixXcd& h_est,
                                           const ValidatedConfig& config);
std::vector<std::uint8_t> detect_and_demap(const DecomposedDetector& detector,
                                           const Eigen::VectorXcd& y,
                                           std::span<const Eigen::MatrixXcd> h_slots,
                                           const ValidatedConfig& config);

}  // namespace imsim
