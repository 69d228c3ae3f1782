#pragma once

#include <Eigen/Dense>
#include <vector>

#include "imsim/config.hpp"
#include "imsim/mapper.hpp"
#include "imsim/rng.hpp"

namespace imsim {

/// Per-slot, per-tap fading matrices. Entries are i.i.d. CN(0, 1/L) so the
/// energy of a physical column summed across taps is one.
struct ChannelRealization {
    int frame_slots = 0;
    int taps = 0;
    int n_rx = 0;
    int n_tx = 0;
    std::vector<Eigen::MatrixXcd> slot_tap;  // index t * taps + l

    const Eigen::MatrixXcd& at(int slot, int tap) const {
        return slot_tap[static_cast<std::size_t>(slot) * taps + tap];
    }
    Eigen::MatrixXcd& at(int slot, int tap) {
        return slot_tap[static_cast<std::size_t>(slot) * taps + tap];
    }
};

/// Total complex noise variance per receive entry (n0 / 2 per real dimension).
struct NoiseSpec {
    double n0 = 0.0;
};

/// Total complex variance of each channel-estimation-error entry.
struct CsiErrorSpec {
    double sigma_e2 = 0.0;
};

/// NONZERO_BLOCKS corrupts only the structurally nonzero blocks of the
/// equivalent matrix (per-slot diagonal blocks for single-tap channels);
/// FULL_MATRIX draws an error for every entry.
enum class CsiErrorScope { NONZERO_BLOCKS, FULL_MATRIX };

/// ES_N0 references the average transmit energy of an active slot;
/// EB_N0 references the frame energy divided by bits_per_frame.
enum class SnrAxis { ES_N0, EB_N0 };

/// Deterministic given (stream state, config). Draw order: slots ascending,
/// taps ascending, entries row-major. Under PER_FRAME_QUASI_STATIC only slot
/// zero is drawn and shared by every slot.
ChannelRealization draw_channel(const ValidatedConfig& config, RandomStream& rng);

/// Same draws as draw_channel, reusing the realization's storage.
void draw_channel_into(ChannelRealization& realization, const ValidatedConfig& config,
                       RandomStream& rng);

/// T*N_r x T*N_t block matrix: block (r, c) holds the tap (r - c) mod T of
/// the receive-slot-r channel when that tap index is below L, zero otherwise.
/// Single-tap channels yield an exactly block-diagonal matrix.
Eigen::MatrixXcd equivalent_matrix(const ChannelRealization& realization);

/// y = H s + n with i.i.d. CN(0, n0) noise entries, drawn in index order.
Eigen::VectorXcd apply_channel(const Eigen::MatrixXcd& equivalent, const FrameSignal& signal,
                               const NoiseSpec& noise, RandomStream& rng);

/// Estimate = H - E with i.i.d. CN(0, sigma_e2) error entries. Blocks are
/// visited ascending (row block, column block), entries row-major.
Eigen::MatrixXcd corrupt_csi(const Eigen::MatrixXcd& equivalent, const CsiErrorSpec& error,
                             int frame_slots, int taps, RandomStream& rng,
                             CsiErrorScope scope = CsiErrorScope::NONZERO_BLOCKS);

/// Average transmit energy of one active slot: 1 under PER_SLOT_UNIT,
/// G under PER_ANTENNA_UNIT (exact for PSK, in expectation for QAM).
double average_slot_energy(const ValidatedConfig& config);
double average_frame_energy(const ValidatedConfig& config);

NoiseSpec snr_to_n0(double snr_db, const ValidatedConfig& config, SnrAxis axis = SnrAxis::ES_N0);

}  // namespace imsim
