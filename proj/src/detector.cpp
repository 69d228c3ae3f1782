#include "imsim/detector.hpp"

#include <algorithm>
#include <limits>

namespace imsim {

namespace {

// ||r||^2 accumulated in index order.
double squared_norm(const std::complex<double>* r, int len) {
    double acc = 0.0;
    for (int i = 0; i < len; ++i) acc += r[i].real() * r[i].real() + r[i].imag() * r[i].imag();
    return acc;
}

// r -= v * col
void subtract_scaled(std::complex<double>* r, const std::complex<double>* col, int len,
                     std::complex<double> v) {
    const double vr = v.real();
    const double vi = v.imag();
    for (int i = 0; i < len; ++i) {
        const double cr = col[i].real();
        const double ci = col[i].imag();
        r[i] = {r[i].real() - (vr * cr - vi * ci), r[i].imag() - (vr * ci + vi * cr)};
    }
}

}  // namespace

BruteForceDetector::BruteForceDetector(const ValidatedConfig& config,
                                       const Constellation& constellation, std::uint64_t cap)
    : config_(config) {
    entries_ = codebook_size(config);
    if (entries_ > cap) throw CapExceededError("codebook size exceeds the enumeration cap");
    nnz_ = config.groups() * config.active_slots();
    positions_.resize(entries_ * nnz_);
    values_.resize(entries_ * nnz_);

    const int n_tx = config.n_tx();
    const int group_size = config.group_size();
    const double amplitude = config.amplitude();
    std::size_t k = 0;
    for (std::uint64_t index = 0; index < entries_; ++index) {
        const Codeword cw = encode_frame_word(index, config);
        const Tap tap = rank_to_tap(cw.tap_rank, config.frame_slots(), config.active_slots());
        for (int s = 0; s < config.active_slots(); ++s) {
            const std::complex<double> value = amplitude * constellation.symbols[cw.symbol[s]];
            for (int g = 0; g < config.groups(); ++g) {
                positions_[k] = tap.active[s] * n_tx + g * group_size +
                                cw.antenna[static_cast<std::size_t>(s) * config.groups() + g];
                values_[k] = value;
                ++k;
            }
        }
    }
}

DetectionResult BruteForceDetector::detect(const Eigen::VectorXcd& y,
                                           const Eigen::MatrixXcd& h_est,
                                           DetectorWorkspace& ws) const {
    const int len = static_cast<int>(y.size());
    if (h_est.rows() != len) throw std::invalid_argument("received vector does not match channel");
    ws.residual.resize(len);

    const std::complex<double>* h_data = h_est.data();
    const Eigen::Index h_rows = h_est.rows();

    double best_metric = std::numeric_limits<double>::infinity();
    std::uint64_t best_index = 0;
    for (std::uint64_t index = 0; index < entries_; ++index) {
        std::complex<double>* r = ws.residual.data();
        std::copy(y.data(), y.data() + len, r);
        const std::size_t base = index * nnz_;
        for (int k = 0; k < nnz_; ++k)
            subtract_scaled(r, h_data + positions_[base + k] * h_rows, len, values_[base + k]);
        const double metric = squared_norm(r, len);
        if (metric < best_metric) {
            best_metric = metric;
            best_index = index;
        }
    }

    DetectionResult result;
    result.codeword = encode_frame_word(best_index, config_);
    result.metric = best_metric;
    result.bits = best_index;
    return result;
}

DetectionResult BruteForceDetector::detect(const Eigen::VectorXcd& y,
                                           const Eigen::MatrixXcd& h_est) const {
    DetectorWorkspace ws;
    return detect(y, h_est, ws);
}

DecomposedDetector::DecomposedDetector(const ValidatedConfig& config,
                                       const Constellation& constellation)
    : config_(config) {
    if (config.taps() != 1)
        throw std::invalid_argument("decomposed detection requires a single-tap channel");

    const int g = config.groups();
    const int group_size = config.group_size();
    mod_order_ = config.mod_order();
    combos_ = 1;
    for (int i = 0; i < g; ++i) combos_ *= group_size;

    combo_cols_.resize(static_cast<std::size_t>(combos_) * g);
    for (int a = 0; a < combos_; ++a) {
        int digits = a;
        for (int j = g - 1; j >= 0; --j) {  // group 0 is the most significant digit
            combo_cols_[static_cast<std::size_t>(a) * g + j] =
                j * group_size + digits % group_size;
            digits /= group_size;
        }
    }

    const double amplitude = config.amplitude();
    scaled_symbols_.resize(mod_order_);
    for (int m = 0; m < mod_order_; ++m) scaled_symbols_[m] = amplitude * constellation.symbols[m];

    const std::uint32_t ranks = 1u << config.tap_index_bits();
    taps_.reserve(ranks);
    for (std::uint32_t rank = 0; rank < ranks; ++rank)
        taps_.push_back(rank_to_tap(rank, config.frame_slots(), config.active_slots()));
}

DetectionResult DecomposedDetector::detect(const Eigen::VectorXcd& y,
                                           std::span<const Eigen::MatrixXcd> h_slots,
                                           DetectorWorkspace& ws) const {
    const int T = config_.frame_slots();
    const int n_rx = config_.n_rx();
    const int g = config_.groups();
    if (static_cast<int>(h_slots.size()) != T)
        throw std::invalid_argument("need one channel block per slot");
    if (y.size() != static_cast<Eigen::Index>(T) * n_rx)
        throw std::invalid_argument("received vector does not match frame dimensions");

    ws.combo_sum.resize(n_rx);
    ws.slot_off.resize(T);
    ws.slot_best.resize(T);
    ws.slot_hyp.resize(T);

    for (int t = 0; t < T; ++t) {
        const std::complex<double>* yt = y.data() + static_cast<std::size_t>(t) * n_rx;
        ws.slot_off[t] = squared_norm(yt, n_rx);

        const Eigen::MatrixXcd& h = h_slots[t];
        const std::complex<double>* h_data = h.data();
        const Eigen::Index h_rows = h.rows();

        double best = std::numeric_limits<double>::infinity();
        std::int32_t best_hyp = 0;
        std::complex<double>* u = ws.combo_sum.data();
        for (int a = 0; a < combos_; ++a) {
            const std::int32_t* cols = combo_cols_.data() + static_cast<std::size_t>(a) * g;
            for (int i = 0; i < n_rx; ++i) {
                double re = 0.0, im = 0.0;
                for (int j = 0; j < g; ++j) {
                    const std::complex<double> e = h_data[cols[j] * h_rows + i];
                    re += e.real();
                    im += e.imag();
                }
                u[i] = {re, im};
            }
            for (int m = 0; m < mod_order_; ++m) {
                const double vr = scaled_symbols_[m].real();
                const double vi = scaled_symbols_[m].imag();
                double acc = 0.0;
                for (int i = 0; i < n_rx; ++i) {
                    const double dr = yt[i].real() - (vr * u[i].real() - vi * u[i].imag());
                    const double di = yt[i].imag() - (vr * u[i].imag() + vi * u[i].real());
                    acc += dr * dr + di * di;
                }
                if (acc < best) {
                    best = acc;
                    best_hyp = static_cast<std::int32_t>(a) * mod_order_ + m;
                }
            }
        }
        ws.slot_best[t] = best;
        ws.slot_hyp[t] = best_hyp;
    }

    // Minimize over activation patterns; strict < keeps the lowest rank, and
    // the per-slot argmins already resolve in-slot ties to the lowest
    // hypothesis, so the overall tie-break matches the brute-force scan.
    double best_metric = std::numeric_limits<double>::infinity();
    std::uint32_t best_rank = 0;
    for (std::uint32_t rank = 0; rank < taps_.size(); ++rank) {
        const Tap& tap = taps_[rank];
        double acc = 0.0;
        std::size_t next = 0;
        for (int t = 0; t < T; ++t) {
            if (next < tap.active.size() && tap.active[next] == t) {
                acc += ws.slot_best[t];
                ++next;
            } else {
                acc += ws.slot_off[t];
            }
        }
        if (acc < best_metric) {
            best_metric = acc;
            best_rank = rank;
        }
    }

    DetectionResult result;
    result.metric = best_metric;
    result.codeword.tap_rank = best_rank;
    const Tap& tap = taps_[best_rank];
    result.codeword.antenna.resize(static_cast<std::size_t>(config_.active_slots()) * g);
    result.codeword.symbol.resize(config_.active_slots());
    for (int s = 0; s < config_.active_slots(); ++s) {
        const std::int32_t hyp = ws.slot_hyp[tap.active[s]];
        int combo = hyp / mod_order_;
        result.codeword.symbol[s] = static_cast<std::uint16_t>(hyp % mod_order_);
        for (int j = g - 1; j >= 0; --j) {
            result.codeword.antenna[static_cast<std::size_t>(s) * g + j] =
                static_cast<std::uint8_t>(combo % config_.group_size());
            combo /= config_.group_size();
        }
    }
    result.bits = decode_frame_word(result.codeword, config_);
    return result;
}

DetectionResult DecomposedDetector::detect(const Eigen::VectorXcd& y,
                                           std::span<const Eigen::MatrixXcd> h_slots) const {
    DetectorWorkspace ws;
    return detect(y, h_slots, ws);
}

std::vector<std::uint8_t> detect_and_demap(const BruteForceDetector& detector,
                                           const Eigen::VectorXcd& y,
                                           const Eigen::MatrixXcd& h_est,
                                           const ValidatedConfig& config) {
    return unpack_bits(detector.detect(y, h_est).bits, bits_per_frame(config));
}

std::vector<std::uint8_t> detect_and_demap(const DecomposedDetector& detector,
                                           const Eigen::VectorXcd& y,
                                           std::span<const Eigen::MatrixXcd> h_slots,
                                           const ValidatedConfig& config) {
    return unpack_bits(detector.detect(y, h_slots).bits, bits_per_frame(config));
}

}  // namespace imsim
