#include "imsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "imsim/mapper.hpp"

namespace imsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    throw ExperimentError(origin + ":" + std::to_string(line) + ": " + message);
}

long long parse_int(const std::string& origin, int line, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(origin, line, "expected an integer, got '" + value + "'");
    }
}

double parse_real(const std::string& origin, int line, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(origin, line, "expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& origin, int line, const std::string& value) {
    const std::string v = lower(value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(origin, line, "expected a boolean, got '" + value + "'");
}

SchemeKind parse_scheme(const std::string& origin, int line, const std::string& value) {
    const std::string v = lower(value);
    if (v == "sm") return SchemeKind::SM;
    if (v == "psm") return SchemeKind::PSM;
    if (v == "ti_sm" || v == "ti-sm" || v == "tism") return SchemeKind::TI_SM;
    if (v == "ti_psm" || v == "ti-psm" || v == "tipsm") return SchemeKind::TI_PSM;
    fail(origin, line, "unknown scheme '" + value + "'");
}

}  // namespace

std::vector<double> parse_snr_spec(const std::string& text) {
    const std::string spec = trim(text);
    std::vector<double> values;
    if (spec.empty()) return values;

    if (spec.find(':') != std::string::npos) {
        std::istringstream in(spec);
        std::string a, b, c;
        if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c))
            throw ExperimentError("SNR range must be start:step:stop, got '" + text + "'");
        const double start = std::stod(trim(a));
        const double step = std::stod(trim(b));
        const double stop = std::stod(trim(c));
        if (step <= 0.0) throw ExperimentError("SNR step must be positive");
        for (double v = start; v <= stop + 1e-9; v += step) values.push_back(v);
        return values;
    }

    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) values.push_back(std::stod(item));
    }
    return values;
}

ExperimentSpec parse_experiment(std::istream& in, const std::string& origin) {
    ExperimentSpec spec;
    enum class Section { NONE, EXPERIMENT, CURVE };
    Section section = Section::NONE;
    CurveSpec* curve = nullptr;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = raw;
        const auto comment = text.find_first_of("#;");
        if (comment != std::string::npos) text = text.substr(0, comment);
        text = trim(text);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') fail(origin, line, "unterminated section header");
            const std::string header = trim(text.substr(1, text.size() - 2));
            if (lower(header) == "experiment") {
                section = Section::EXPERIMENT;
                continue;
            }
            if (lower(header.substr(0, 5)) == "curve") {
                const std::string label = trim(header.substr(5));
                if (label.empty()) fail(origin, line, "curve sections need a label: [curve <label>]");
                spec.curves.emplace_back();
                curve = &spec.curves.back();
                curve->label = label;
                section = Section::CURVE;
                continue;
            }
            fail(origin, line, "unknown section [" + header + "]");
        }

        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected key = value");
        const std::string key = lower(trim(text.substr(0, eq)));
        const std::string value = trim(text.substr(eq + 1));

        if (section == Section::EXPERIMENT) {
            if (key == "name") spec.name = value;
            else if (key == "snr" || key == "snr_db") spec.snr_db = parse_snr_spec(value);
            else if (key == "seed") spec.master_seed = static_cast<std::uint64_t>(parse_int(origin, line, value));
            else if (key == "min_bit_errors") spec.stopping.min_bit_errors = parse_int(origin, line, value);
            else if (key == "max_frames") spec.stopping.max_frames = parse_int(origin, line, value);
            else if (key == "min_frames") spec.stopping.min_frames = parse_int(origin, line, value);
            else if (key == "target_ber") spec.target_ber = parse_real(origin, line, value);
            else if (key == "sigma_e2_scale") spec.sigma_e2_scale = parse_real(origin, line, value);
            else if (key == "allow_mixed_rate") spec.allow_mixed_rate = parse_bool(origin, line, value);
            else if (key == "threads") spec.threads = static_cast<int>(parse_int(origin, line, value));
            else if (key == "axis") {
                const std::string v = lower(value);
                if (v == "es_n0" || v == "es") spec.axis = SnrAxis::ES_N0;
                else if (v == "eb_n0" || v == "eb") spec.axis = SnrAxis::EB_N0;
                else fail(origin, line, "axis must be es_n0 or eb_n0");
            } else fail(origin, line, "unknown experiment key '" + key + "'");
            continue;
        }
        if (section != Section::CURVE) fail(origin, line, "key outside of any section");

        SchemeConfig& c = curve->config;
        if (key == "scheme") c.scheme = parse_scheme(origin, line, value);
        else if (key == "n_tx") c.n_tx = static_cast<int>(parse_int(origin, line, value));
        else if (key == "n_rx") c.n_rx = static_cast<int>(parse_int(origin, line, value));
        else if (key == "groups") c.groups = static_cast<int>(parse_int(origin, line, value));
        else if (key == "group_size") c.group_size = static_cast<int>(parse_int(origin, line, value));
        else if (key == "mod_order") c.mod_order = static_cast<int>(parse_int(origin, line, value));
        else if (key == "frame_slots") c.frame_slots = static_cast<int>(parse_int(origin, line, value));
        else if (key == "active_slots") c.active_slots = static_cast<int>(parse_int(origin, line, value));
        else if (key == "taps") c.taps = static_cast<int>(parse_int(origin, line, value));
        else if (key == "family") {
            const std::string v = lower(value);
            if (v == "psk") c.family = ConstellationFamily::PSK;
            else if (v == "qam") c.family = ConstellationFamily::QAM;
            else fail(origin, line, "family must be PSK or QAM");
        } else if (key == "normalization") {
            const std::string v = lower(value);
            if (v == "per_slot_unit") c.normalization = Normalization::PER_SLOT_UNIT;
            else if (v == "per_antenna_unit") c.normalization = Normalization::PER_ANTENNA_UNIT;
            else fail(origin, line, "normalization must be PER_SLOT_UNIT or PER_ANTENNA_UNIT");
        } else if (key == "channel_time") {
            const std::string v = lower(value);
            if (v == "per_slot_iid") c.time_model = ChannelTimeModel::PER_SLOT_IID;
            else if (v == "per_frame_quasi_static") c.time_model = ChannelTimeModel::PER_FRAME_QUASI_STATIC;
            else fail(origin, line, "channel_time must be PER_SLOT_IID or PER_FRAME_QUASI_STATIC");
        } else if (key == "csi") {
            const std::string v = lower(value);
            if (v == "perfect") curve->csi = CsiMode::PERFECT;
            else if (v == "cee") curve->csi = CsiMode::CEE;
            else fail(origin, line, "csi must be perfect or cee");
        } else if (key == "cee_scope") {
            const std::string v = lower(value);
            if (v == "full") curve->cee_scope = CsiErrorScope::FULL_MATRIX;
            else if (v == "diagonal" || v == "nonzero_blocks") curve->cee_scope = CsiErrorScope::NONZERO_BLOCKS;
            else fail(origin, line, "cee_scope must be full or diagonal");
        } else fail(origin, line, "unknown curve key '" + key + "'");
    }

    if (spec.curves.empty()) throw ExperimentError(origin + ": no [curve <label>] sections found");
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    return parse_experiment(in, path);
}

namespace {

struct PresetShape {
    std::string label;
    SchemeKind scheme;
    int n_tx;
    int groups;
};

// Derives M so the scheme hits `bpcu` exactly; writes the derivation when
// `audit` is given.
int solve_mod_order(const PresetShape& shape, int bpcu, int frame_slots, int active_slots,
                    std::ostream* audit) {
    const int group_size = shape.n_tx / shape.groups;
    const int group_bits = floor_log2(static_cast<std::uint64_t>(group_size));
    const int antenna_bits = shape.groups * group_bits;
    const bool time_indexed =
        shape.scheme == SchemeKind::TI_SM || shape.scheme == SchemeKind::TI_PSM;

    int symbol_bits;
    std::ostringstream derivation;
    if (time_indexed) {
        const int p = floor_log2(binomial(frame_slots, active_slots));
        const int frame_bits = bpcu * frame_slots;  // L = 1, so T + L - 1 = T
        const int numerator = frame_bits - p;
        if (numerator % active_slots != 0)
            throw ExperimentError(shape.label + ": rate " + std::to_string(bpcu) +
                                  " bpcu is not reachable with these slots");
        symbol_bits = numerator / active_slots - antenna_bits;
        derivation << shape.label << ": log2(M) = (" << bpcu << "*" << frame_slots << " - " << p
                   << ")/" << active_slots << " - " << antenna_bits << " = " << symbol_bits;
    } else {
        symbol_bits = bpcu - antenna_bits;
        derivation << shape.label << ": log2(M) = " << bpcu << " - " << antenna_bits << " = "
                   << symbol_bits;
    }
    if (symbol_bits < 1)
        throw ExperimentError(shape.label + ": rate " + std::to_string(bpcu) +
                              " bpcu needs log2(M) >= 1");
    if (audit) *audit << "  " << derivation.str() << "  -> M = " << (1 << symbol_bits) << "\n";
    return 1 << symbol_bits;
}

ExperimentSpec build_preset(const std::string& name, int bpcu,
                            const std::vector<PresetShape>& shapes, bool with_cee,
                            const std::string& snr, std::ostream* audit) {
    ExperimentSpec spec;
    spec.name = name;
    spec.snr_db = parse_snr_spec(snr);
    spec.target_ber = with_cee ? 1e-3 : 1e-4;
    if (audit) *audit << name << ": common rate " << bpcu << " bpcu\n";

    for (const auto& shape : shapes) {
        const bool time_indexed =
            shape.scheme == SchemeKind::TI_SM || shape.scheme == SchemeKind::TI_PSM;
        const int frame_slots = time_indexed ? 4 : 1;
        const int active_slots = time_indexed ? 2 : 1;

        CurveSpec curve;
        curve.label = shape.label;
        curve.config.scheme = shape.scheme;
        curve.config.n_tx = shape.n_tx;
        curve.config.n_rx = 4;
        curve.config.groups = shape.groups;
        curve.config.mod_order =
            solve_mod_order(shape, bpcu, frame_slots, active_slots, audit);
        curve.config.family = ConstellationFamily::PSK;
        curve.config.frame_slots = frame_slots;
        curve.config.active_slots = active_slots;
        curve.config.taps = 1;
        spec.curves.push_back(curve);
    }
    if (with_cee) {
        const std::size_t n = spec.curves.size();
        for (std::size_t i = 0; i < n; ++i) {
            CurveSpec cee = spec.curves[i];
            cee.label += " CEE";
            cee.csi = CsiMode::CEE;
            spec.curves.push_back(cee);
        }
    }
    return spec;
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

ExperimentSpec preset_experiment(const std::string& name, std::ostream* audit) {
    if (name == "fig2") {
        return build_preset("fig2", 8,
                            {{"SM 8x4", SchemeKind::SM, 8, 1},
                             {"PSM 8x4 G4", SchemeKind::PSM, 8, 4},
                             {"PSM 10x4 G5", SchemeKind::PSM, 10, 5}},
                            true, "10:2:38", audit);
    }
    if (name == "fig3") {
        return build_preset("fig3", 4,
                            {{"PSM 4x4 G2", SchemeKind::PSM, 4, 2},
                             {"PSM 6x4 G3", SchemeKind::PSM, 6, 3},
                             {"TI-SM 8x4", SchemeKind::TI_SM, 8, 1},
                             {"TI-PSM 8x4 G4", SchemeKind::TI_PSM, 8, 4},
                             {"TI-PSM 12x4 G3", SchemeKind::TI_PSM, 12, 3}},
                            false, "8:2:30", audit);
    }
    if (name == "fig4") {
        return build_preset("fig4", 4,
                            {{"TI-SM 8x4", SchemeKind::TI_SM, 8, 1},
                             {"TI-PSM 8x4 G4", SchemeKind::TI_PSM, 8, 4},
                             {"TI-PSM 12x4 G3", SchemeKind::TI_PSM, 12, 3}},
                            true, "8:2:34", audit);
    }
    if (name == "fig5") {
        return build_preset("fig5", 4,
                            {{"PSM 4x4 G2", SchemeKind::PSM, 4, 2},
                             {"PSM 6x4 G3", SchemeKind::PSM, 6, 3},
                             {"TI-PSM 8x4 G4", SchemeKind::TI_PSM, 8, 4},
                             {"TI-PSM 12x4 G3", SchemeKind::TI_PSM, 12, 3}},
                            true, "6:2:32", audit);
    }
    throw ExperimentError("unknown preset '" + name + "' (available: fig2 fig3 fig4 fig5)");
}

std::vector<ValidatedConfig> validate_experiment(const ExperimentSpec& spec,
                                                 std::ostream* warnings) {
    if (spec.curves.empty()) throw ExperimentError("experiment has no curves");

    std::set<std::string> labels;
    std::vector<ValidatedConfig> configs;
    configs.reserve(spec.curves.size());
    for (const auto& curve : spec.curves) {
        if (curve.label.empty()) throw ExperimentError("curve labels must not be empty");
        if (curve.label.find(',') != std::string::npos)
            throw ExperimentError("curve label '" + curve.label + "' must not contain commas");
        if (!labels.insert(curve.label).second)
            throw ExperimentError("duplicate curve label '" + curve.label + "'");
        configs.push_back(validate(curve.config));
    }

    const Rate reference = spectral_efficiency(configs.front());
    for (std::size_t i = 1; i < configs.size(); ++i) {
        if (spectral_efficiency(configs[i]) == reference) continue;
        if (!spec.allow_mixed_rate)
            throw ExperimentError("curve '" + spec.curves[i].label +
                                  "' does not match the experiment rate (set allow_mixed_rate "
                                  "to override)");
        if (warnings)
            *warnings << "warning: curve '" << spec.curves[i].label
                      << "' has a different spectral efficiency\n";
    }
    return configs;
}

std::vector<BerRecord> run_experiment(const ExperimentSpec& spec, std::ostream* progress) {
    const std::vector<ValidatedConfig> configs = validate_experiment(spec, progress);

    std::vector<BerRecord> records;
    records.reserve(spec.curves.size() * spec.snr_db.size());
    for (std::size_t i = 0; i < spec.curves.size(); ++i) {
        const CurveSpec& curve = spec.curves[i];
        RunSettings settings;
        settings.csi = curve.csi;
        settings.cee_scope = curve.cee_scope;
        settings.sigma_e2_scale = spec.sigma_e2_scale;
        settings.axis = spec.axis;
        settings.stopping = spec.stopping;
        settings.master_seed = spec.master_seed;
        settings.threads = spec.threads;

        std::vector<BerRecord> swept = run_sweep(configs[i], spec.snr_db, settings);
        for (auto& record : swept) {
            record.label = curve.label;
            if (progress)
                *progress << record.label << "  snr " << record.snr_db << " dB  ber " << record.ber
                          << "  frames " << record.frames << "\n";
            records.push_back(std::move(record));
        }
    }
    return records;
}

}  // namespace imsim
