#include "imsim/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <thread>

#include "imsim/constellation.hpp"
#include "imsim/detector.hpp"
#include "imsim/mapper.hpp"
#include "imsim/rng.hpp"

namespace imsim {

namespace {

// Stopping is evaluated at batch boundaries so the frame count never depends
// on worker scheduling. Batches grow 512 -> 8192 to keep cheap points cheap.
constexpr std::uint64_t kFirstBatch = 512;
constexpr std::uint64_t kMaxBatch = 8192;

struct BitMasks {
    std::uint64_t time = 0;
    std::uint64_t antenna = 0;
    std::uint64_t symbol = 0;
};

// Frame bit i occupies bit (bits_per_frame - 1 - i) of the packed word.
BitMasks build_masks(const ValidatedConfig& config) {
    const int total = bits_per_frame(config);
    const int p = config.tap_index_bits();
    const int antenna_bits = config.antenna_bits_per_slot();
    const int symbol_bits = config.symbol_bits_per_slot();

    const auto field_mask = [total](int first, int width) -> std::uint64_t {
        if (width == 0) return 0;
        return ((std::uint64_t{1} << width) - 1) << (total - first - width);
    };

    BitMasks masks;
    masks.time = field_mask(0, p);
    int cursor = p;
    for (int s = 0; s < config.active_slots(); ++s) {
        masks.antenna |= field_mask(cursor, antenna_bits);
        cursor += antenna_bits;
        masks.symbol |= field_mask(cursor, symbol_bits);
        cursor += symbol_bits;
    }
    return masks;
}

struct PointPlan {
    const ValidatedConfig& config;
    Constellation constellation;
    double n0 = 0.0;
    double sigma_e2 = 0.0;
    int bits = 0;
    BitMasks masks;
    CsiMode csi = CsiMode::PERFECT;
    CsiErrorScope scope = CsiErrorScope::FULL_MATRIX;
    bool use_brute = false;
    bool single_tap = true;
    std::uint64_t master = 0;
    std::uint64_t key = 0;
    std::vector<Tap> taps;
    std::unique_ptr<DecomposedDetector> decomposed;
    std::unique_ptr<BruteForceDetector> brute;

    explicit PointPlan(const ValidatedConfig& c) : config(c) {}
};

struct WorkerState {
    ChannelRealization channel;
    std::vector<Eigen::MatrixXcd> est_slots;
    Eigen::VectorXcd y;
    Eigen::MatrixXcd h_dense;
    Eigen::MatrixXcd h_est_dense;
    DetectorWorkspace detector_ws;
    std::uint64_t err_time = 0;
    std::uint64_t err_antenna = 0;
    std::uint64_t err_symbol = 0;
};

void simulate_frame(const PointPlan& plan, std::uint64_t frame, WorkerState& w) {
    RandomStream rng = RandomStream::derive(plan.master, plan.key, frame);
    const std::uint64_t tx_bits = rng.next_bits(plan.bits);
    const Codeword cw = encode_frame_word(tx_bits, plan.config);

    const int T = plan.config.frame_slots();
    const int n_rx = plan.config.n_rx();
    const int n_tx = plan.config.n_tx();
    const int groups = plan.config.groups();
    const int group_size = plan.config.group_size();

    draw_channel_into(w.channel, plan.config, rng);

    if (plan.single_tap) {
        w.y.resize(static_cast<Eigen::Index>(T) * n_rx);
        w.y.setZero();
        const Tap& tap = plan.taps[cw.tap_rank];
        const double amplitude = plan.config.amplitude();
        for (int s = 0; s < plan.config.active_slots(); ++s) {
            const int slot = tap.active[s];
            const std::complex<double> value =
                amplitude * plan.constellation.symbols[cw.symbol[s]];
            const Eigen::MatrixXcd& h = w.channel.at(slot, 0);
            for (int g = 0; g < groups; ++g) {
                const int col = g * group_size + cw.antenna[static_cast<std::size_t>(s) * groups + g];
                w.y.segment(static_cast<Eigen::Index>(slot) * n_rx, n_rx) += value * h.col(col);
            }
        }
    } else {
        w.h_dense = equivalent_matrix(w.channel);
        const FrameSignal signal = codeword_to_signal(cw, plan.config, plan.constellation);
        const Eigen::Map<const Eigen::VectorXcd> s(signal.values.data(),
                                                   static_cast<Eigen::Index>(signal.values.size()));
        w.y = w.h_dense * s;
    }
    if (plan.n0 > 0.0)
        for (Eigen::Index i = 0; i < w.y.size(); ++i) w.y(i) += rng.next_cgauss(plan.n0);

    std::uint64_t rx_bits = 0;
    if (!plan.use_brute) {
        std::span<const Eigen::MatrixXcd> est(w.channel.slot_tap);
        if (plan.csi == CsiMode::CEE) {
            // diagonal-block corruption; same draw order as corrupt_csi
            w.est_slots.resize(T);
            for (int t = 0; t < T; ++t) {
                w.est_slots[t] = w.channel.at(t, 0);
                for (int row = 0; row < n_rx; ++row)
                    for (int col = 0; col < n_tx; ++col)
                        w.est_slots[t](row, col) -= rng.next_cgauss(plan.sigma_e2);
            }
            est = w.est_slots;
        }
        rx_bits = plan.decomposed->detect(w.y, est, w.detector_ws).bits;
    } else {
        if (plan.single_tap) {
            w.h_dense.resize(static_cast<Eigen::Index>(T) * n_rx,
                             static_cast<Eigen::Index>(T) * n_tx);
            w.h_dense.setZero();
            for (int t = 0; t < T; ++t)
                w.h_dense.block(static_cast<Eigen::Index>(t) * n_rx,
                                static_cast<Eigen::Index>(t) * n_tx, n_rx, n_tx) =
                    w.channel.at(t, 0);
        }
        if (plan.csi == CsiMode::CEE) {
            w.h_est_dense = corrupt_csi(w.h_dense, CsiErrorSpec{plan.sigma_e2}, T,
                                        plan.config.taps(), rng, plan.scope);
            rx_bits = plan.brute->detect(w.y, w.h_est_dense, w.detector_ws).bits;
        } else {
            rx_bits = plan.brute->detect(w.y, w.h_dense, w.detector_ws).bits;
        }
    }

    const std::uint64_t diff = tx_bits ^ rx_bits;
    w.err_time += static_cast<std::uint64_t>(std::popcount(diff & plan.masks.time));
    w.err_antenna += static_cast<std::uint64_t>(std::popcount(diff & plan.masks.antenna));
    w.err_symbol += static_cast<std::uint64_t>(std::popcount(diff & plan.masks.symbol));
}

}  // namespace

BerRecord run_point(const ValidatedConfig& config, double snr_db, const RunSettings& settings) {
    const StoppingRule& stop = settings.stopping;
    if (stop.min_bit_errors < 1) throw std::invalid_argument("min_bit_errors must be >= 1");
    if (stop.max_frames < 1) throw std::invalid_argument("max_frames must be >= 1");
    if (stop.min_frames > stop.max_frames)
        throw std::invalid_argument("min_frames must not exceed max_frames");

    int threads = settings.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;

    PointPlan plan(config);
    plan.constellation = build_constellation(config.mod_order(), config.family());
    plan.n0 = snr_to_n0(snr_db, config, settings.axis).n0;
    plan.sigma_e2 = settings.csi == CsiMode::CEE ? settings.sigma_e2_scale * plan.n0 : 0.0;
    plan.bits = bits_per_frame(config);
    plan.masks = build_masks(config);
    plan.csi = settings.csi;
    plan.scope = settings.cee_scope;
    plan.single_tap = config.taps() == 1;
    plan.master = settings.master_seed;
    plan.key = std::bit_cast<std::uint64_t>(snr_db);

    switch (settings.detector) {
        case DetectorKind::DECOMPOSED:
            plan.use_brute = false;
            break;
        case DetectorKind::BRUTE_FORCE:
            plan.use_brute = true;
            break;
        case DetectorKind::AUTO:
            plan.use_brute = !plan.single_tap || (settings.csi == CsiMode::CEE &&
                                                  settings.cee_scope == CsiErrorScope::FULL_MATRIX);
            break;
    }
    if (!plan.use_brute) {
        if (!plan.single_tap)
            throw std::invalid_argument("decomposed detection requires a single-tap channel");
        if (settings.csi == CsiMode::CEE && settings.cee_scope == CsiErrorScope::FULL_MATRIX)
            throw std::invalid_argument(
                "decomposed detection requires a block-diagonal channel estimate");
        plan.decomposed = std::make_unique<DecomposedDetector>(config, plan.constellation);
    } else {
        plan.brute =
            std::make_unique<BruteForceDetector>(config, plan.constellation, settings.enumeration_cap);
    }

    const std::uint32_t ranks = 1u << config.tap_index_bits();
    plan.taps.reserve(ranks);
    for (std::uint32_t rank = 0; rank < ranks; ++rank)
        plan.taps.push_back(rank_to_tap(rank, config.frame_slots(), config.active_slots()));

    std::vector<WorkerState> workers(static_cast<std::size_t>(threads));

    std::uint64_t frames_done = 0;
    StopReason reason = StopReason::MAX_FRAMES;
    std::uint64_t total = 0;
    std::uint64_t batch_size = kFirstBatch;
    while (true) {
        const std::uint64_t batch = std::min<std::uint64_t>(batch_size, stop.max_frames - frames_done);
        batch_size = std::min(batch_size * 2, kMaxBatch);
        const std::uint64_t lo = frames_done;
        const std::uint64_t hi = frames_done + batch;
        if (threads == 1 || batch < 2) {
            for (std::uint64_t f = lo; f < hi; ++f) simulate_frame(plan, f, workers[0]);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (int k = 0; k < threads; ++k) {
                pool.emplace_back([&, k] {
                    for (std::uint64_t f = lo + k; f < hi; f += threads)
                        simulate_frame(plan, f, workers[k]);
                });
            }
            for (auto& t : pool) t.join();
        }
        frames_done = hi;

        total = 0;
        for (const auto& w : workers) total += w.err_time + w.err_antenna + w.err_symbol;
        if (frames_done >= stop.min_frames && total >= stop.min_bit_errors) {
            reason = StopReason::MIN_ERRORS;
            break;
        }
        if (frames_done >= stop.max_frames) {
            reason = StopReason::MAX_FRAMES;
            break;
        }
    }

    BerRecord record;
    record.label = to_string(config.scheme());
    record.snr_db = snr_db;
    record.frames = frames_done;
    for (const auto& w : workers) {
        record.bit_errors_time += w.err_time;
        record.bit_errors_antenna += w.err_antenna;
        record.bit_errors_symbol += w.err_symbol;
    }
    record.bit_errors =
        record.bit_errors_time + record.bit_errors_antenna + record.bit_errors_symbol;
    const double denom = static_cast<double>(frames_done) * static_cast<double>(plan.bits);
    record.ber = static_cast<double>(record.bit_errors) / denom;
    record.ci95 = 1.96 * std::sqrt(record.ber * (1.0 - record.ber) / denom);
    record.stop = reason;
    return record;
}

std::vector<BerRecord> run_sweep(const ValidatedConfig& config, std::span<const double> snr_db,
                                 const RunSettings& settings) {
    std::vector<BerRecord> records;
    records.reserve(snr_db.size());
    for (const double snr : snr_db) records.push_back(run_point(config, snr, settings));
    std::stable_sort(records.begin(), records.end(),
                     [](const BerRecord& a, const BerRecord& b) { return a.snr_db < b.snr_db; });
    return records;
}

CurveCrossing snr_at_ber(std::span<const BerPoint> curve, double target_ber) {
    if (!(target_ber > 0.0)) throw std::domain_error("target BER must be positive");
    std::vector<BerPoint> pts(curve.begin(), curve.end());
    std::stable_sort(pts.begin(), pts.end(),
                     [](const BerPoint& a, const BerPoint& b) { return a.snr_db < b.snr_db; });

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const BerPoint& hi = pts[i];      // higher BER, lower SNR
        const BerPoint& lo = pts[i + 1];  // lower BER, higher SNR
        if (hi.ber >= target_ber && lo.ber <= target_ber && lo.ber > 0.0) {
            CurveCrossing crossing;
            crossing.lower = hi;
            crossing.upper = lo;
            if (hi.ber == lo.ber) {
                crossing.snr_db = hi.snr_db;
            } else {
                const double t = (std::log10(hi.ber) - std::log10(target_ber)) /
                                 (std::log10(hi.ber) - std::log10(lo.ber));
                crossing.snr_db = hi.snr_db + t * (lo.snr_db - hi.snr_db);
            }
            return crossing;
        }
    }
    throw std::domain_error("curve does not cross the target BER with positive estimates");
}

double gap_at_ber(std::span<const BerPoint> curve_a, std::span<const BerPoint> curve_b,
                  double target_ber) {
    return snr_at_ber(curve_b, target_ber).snr_db - snr_at_ber(curve_a, target_ber).snr_db;
}

std::vector<BerPoint> to_points(std::span<const BerRecord> records) {
    std::vector<BerPoint> points;
    points.reserve(records.size());
    for (const auto& r : records) points.push_back({r.snr_db, r.ber});
    return points;
}

std::string to_string(StopReason reason) {
    return reason == StopReason::MIN_ERRORS ? "min_errors" : "max_frames";
}

std::string to_string(CsiMode mode) { return mode == CsiMode::PERFECT ? "perfect" : "cee"; }

}  // namespace imsim
