#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "imsim/config.hpp"
#include "imsim/montecarlo.hpp"

namespace imsim {

class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CurveSpec {
    std::string label;
    SchemeConfig config;
    CsiMode csi = CsiMode::PERFECT;
    CsiErrorScope cee_scope = CsiErrorScope::FULL_MATRIX;
};

/// A named set of BER curves swept over a common SNR grid. All curves must
/// share the same spectral efficiency unless allow_mixed_rate is set.
struct ExperimentSpec {
    std::string name = "experiment";
    std::vector<CurveSpec> curves;
    std::vector<double> snr_db;
    StoppingRule stopping{};
    std::uint64_t master_seed = 1;
    SnrAxis axis = SnrAxis::ES_N0;
    double sigma_e2_scale = 1.0;
    double target_ber = 1e-4;
    bool allow_mixed_rate = false;
    int threads = 1;
};

/// "start:step:stop" (inclusive) or a comma-separated list.
std::vector<double> parse_snr_spec(const std::string& text);

/// Key = value sections: one [experiment] section plus one [curve <label>]
/// section per curve. See the README for the full schema.
ExperimentSpec parse_experiment(std::istream& in, const std::string& origin);
ExperimentSpec load_experiment_file(const std::string& path);

/// Canned experiments fig2..fig5. Each derives the modulation order of every
/// scheme from the experiment's common rate; the derivation is written to
/// `audit` when given.
ExperimentSpec preset_experiment(const std::string& name, std::ostream* audit = nullptr);
std::vector<std::string> preset_names();

/// Validates every curve, label uniqueness, and the equal-rate constraint.
/// Returns one validated config per curve (same order).
std::vector<ValidatedConfig> validate_experiment(const ExperimentSpec& spec,
                                                 std::ostream* warnings = nullptr);

/// Runs every (curve, SNR) point; records carry the curve labels and arrive
/// grouped by curve in spec order, each group sorted by SNR.
std::vector<BerRecord> run_experiment(const ExperimentSpec& spec,
                                      std::ostream* progress = nullptr);

}  // namespace imsim
