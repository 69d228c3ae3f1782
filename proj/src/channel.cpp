#include "imsim/channel.hpp"

#include <cmath>

namespace imsim {

void draw_channel_into(ChannelRealization& r, const ValidatedConfig& config, RandomStream& rng) {
    r.frame_slots = config.frame_slots();
    r.taps = config.taps();
    r.n_rx = config.n_rx();
    r.n_tx = config.n_tx();
    r.slot_tap.resize(static_cast<std::size_t>(r.frame_slots) * r.taps);

    const double tap_variance = 1.0 / static_cast<double>(r.taps);
    const bool quasi_static = config.time_model() == ChannelTimeModel::PER_FRAME_QUASI_STATIC;
    const int drawn_slots = quasi_static ? 1 : r.frame_slots;

    for (int t = 0; t < drawn_slots; ++t) {
        for (int l = 0; l < r.taps; ++l) {
            Eigen::MatrixXcd& h = r.at(t, l);
            h.resize(r.n_rx, r.n_tx);
            for (int row = 0; row < r.n_rx; ++row)
                for (int col = 0; col < r.n_tx; ++col) h(row, col) = rng.next_cgauss(tap_variance);
        }
    }
    if (quasi_static)
        for (int t = 1; t < r.frame_slots; ++t)
            for (int l = 0; l < r.taps; ++l) r.at(t, l) = r.at(0, l);
}

ChannelRealization draw_channel(const ValidatedConfig& config, RandomStream& rng) {
    ChannelRealization r;
    draw_channel_into(r, config, rng);
    return r;
}

Eigen::MatrixXcd equivalent_matrix(const ChannelRealization& realization) {
    const int T = realization.frame_slots;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(T) * realization.n_rx,
                                                static_cast<Eigen::Index>(T) * realization.n_tx);
    for (int row = 0; row < T; ++row) {
        for (int col = 0; col < T; ++col) {
            const int tap = (row - col + T) % T;  // block-circulant wrap after CP removal
            if (tap < realization.taps)
                h.block(static_cast<Eigen::Index>(row) * realization.n_rx,
                        static_cast<Eigen::Index>(col) * realization.n_tx, realization.n_rx,
                        realization.n_tx) = realization.at(row, tap);
        }
    }
    return h;
}

Eigen::VectorXcd apply_channel(const Eigen::MatrixXcd& equivalent, const FrameSignal& signal,
                               const NoiseSpec& noise, RandomStream& rng) {
    if (equivalent.cols() != static_cast<Eigen::Index>(signal.values.size()))
        throw std::invalid_argument("signal length does not match channel columns");
    const Eigen::Map<const Eigen::VectorXcd> s(signal.values.data(),
                                               static_cast<Eigen::Index>(signal.values.size()));
    Eigen::VectorXcd y = equivalent * s;
    if (noise.n0 > 0.0)
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.next_cgauss(noise.n0);
    return y;
}

Eigen::MatrixXcd corrupt_csi(const Eigen::MatrixXcd& equivalent, const CsiErrorSpec& error,
                             int frame_slots, int taps, RandomStream& rng, CsiErrorScope scope) {
    Eigen::MatrixXcd estimate = equivalent;
    if (error.sigma_e2 <= 0.0) return estimate;

    if (scope == CsiErrorScope::FULL_MATRIX) {
        for (Eigen::Index row = 0; row < estimate.rows(); ++row)
            for (Eigen::Index col = 0; col < estimate.cols(); ++col)
                estimate(row, col) -= rng.next_cgauss(error.sigma_e2);
        return estimate;
    }

    const Eigen::Index block_rows = estimate.rows() / frame_slots;
    const Eigen::Index block_cols = estimate.cols() / frame_slots;
    for (int rb = 0; rb < frame_slots; ++rb) {
        for (int cb = 0; cb < frame_slots; ++cb) {
            if ((rb - cb + frame_slots) % frame_slots >= taps) continue;
            auto block = estimate.block(rb * block_rows, cb * block_cols, block_rows, block_cols);
            for (Eigen::Index row = 0; row < block_rows; ++row)
                for (Eigen::Index col = 0; col < block_cols; ++col)
                    block(row, col) -= rng.next_cgauss(error.sigma_e2);
        }
    }
    return estimate;
}

double average_slot_energy(const ValidatedConfig& config) {
    return config.normalization() == Normalization::PER_SLOT_UNIT
               ? 1.0
               : static_cast<double>(config.groups());
}

double average_frame_energy(const ValidatedConfig& config) {
    return average_slot_energy(config) * static_cast<double>(config.active_slots());
}

NoiseSpec snr_to_n0(double snr_db, const ValidatedConfig& config, SnrAxis axis) {
    const double linear = std::pow(10.0, snr_db / 10.0);
    const double reference =
        axis == SnrAxis::ES_N0
            ? average_slot_energy(config)
            : average_frame_energy(config) / static_cast<double>(bits_per_frame(config));
    return NoiseSpec{reference / linear};
}

}  // namespace imsim
