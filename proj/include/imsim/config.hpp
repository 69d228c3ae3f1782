#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace imsim {

enum class SchemeKind { SM, PSM, TI_SM, TI_PSM };
enum class ConstellationFamily { PSK, QAM };

/// PER_SLOT_UNIT scales the per-antenna amplitude by 1/sqrt(G) so an active
/// slot radiates unit average energy regardless of the group count;
/// PER_ANTENNA_UNIT keeps unit-energy symbols on every active antenna.
enum class Normalization { PER_SLOT_UNIT, PER_ANTENNA_UNIT };

enum class ChannelTimeModel { PER_SLOT_IID, PER_FRAME_QUASI_STATIC };

/// Exact spectral efficiency in bits per channel use.
using Rate = boost::rational<std::int64_t>;

/// Raw scheme parameters as read from a config file. Every other module only
/// accepts the ValidatedConfig produced by validate().
struct SchemeConfig {
    SchemeKind scheme = SchemeKind::SM;
    int n_tx = 2;        // total transmit antennas
    int n_rx = 1;        // receive antennas
    int groups = 1;      // G; must be 1 for SM / TI-SM
    int group_size = 0;  // N_tg; 0 = derive as n_tx / groups
    int mod_order = 2;   // M
    ConstellationFamily family = ConstellationFamily::PSK;
    int frame_slots = 1;   // T; 1 for SM / PSM
    int active_slots = 1;  // T_a
    int taps = 1;          // L; the cyclic prefix spans L - 1 slots
    Normalization normalization = Normalization::PER_SLOT_UNIT;
    ChannelTimeModel time_model = ChannelTimeModel::PER_SLOT_IID;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// A SchemeConfig that passed every structural invariant. group_size is
/// always filled in; values are immutable and safe to share across threads.
class ValidatedConfig {
public:
    const SchemeConfig& raw() const { return cfg_; }

    SchemeKind scheme() const { return cfg_.scheme; }
    int n_tx() const { return cfg_.n_tx; }
    int n_rx() const { return cfg_.n_rx; }
    int groups() const { return cfg_.groups; }
    int group_size() const { return cfg_.group_size; }
    int mod_order() const { return cfg_.mod_order; }
    ConstellationFamily family() const { return cfg_.family; }
    int frame_slots() const { return cfg_.frame_slots; }
    int active_slots() const { return cfg_.active_slots; }
    int taps() const { return cfg_.taps; }
    Normalization normalization() const { return cfg_.normalization; }
    ChannelTimeModel time_model() const { return cfg_.time_model; }

    bool time_indexed() const {
        return cfg_.scheme == SchemeKind::TI_SM || cfg_.scheme == SchemeKind::TI_PSM;
    }

    /// Number of time-index bits: floor(log2 C(T, T_a)).
    int tap_index_bits() const;
    int antenna_bits_per_slot() const;  // G * log2(N_tg)
    int symbol_bits_per_slot() const;   // log2(M)

    /// Per-antenna amplitude applied to the constellation symbol.
    double amplitude() const;

private:
    friend ValidatedConfig validate(const SchemeConfig&);
    explicit ValidatedConfig(const SchemeConfig& c) : cfg_(c) {}
    SchemeConfig cfg_;
};

/// Checks every structural invariant and returns the config with derived
/// fields filled in. Throws ConfigError naming the offending field.
ValidatedConfig validate(const SchemeConfig& config);

/// Exact rate in bpcu; frames pay for the cyclic prefix through the
/// T + L - 1 denominator.
Rate spectral_efficiency(const ValidatedConfig& config);

/// Number of distinct transmit frames the scheme can produce.
std::uint64_t codebook_size(const ValidatedConfig& config);

std::string to_string(SchemeKind scheme);
std::string to_string(ConstellationFamily family);
std::string to_string(Normalization normalization);
std::string to_string(ChannelTimeModel model);

/// Exact binomial coefficient; requires the result to fit in 64 bits.
std::uint64_t binomial(int n, int k);

int floor_log2(std::uint64_t value);
bool is_power_of_two(std::uint64_t value);

}  // namespace imsim
