// imsim - link-level Monte Carlo simulator for index-modulation MIMO schemes
// (SM, PSM, TI-SM, TI-PSM). Subcommands: rate | codebook | simulate | gap.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "imsim/detector.hpp"
#include "imsim/experiment.hpp"
#include "imsim/io.hpp"
#include "imsim/mapper.hpp"

namespace {

using namespace imsim;

std::string rate_string(const Rate& rate) {
    std::string text = std::to_string(rate.numerator());
    if (rate.denominator() != 1) text += "/" + std::to_string(rate.denominator());
    return text;
}

std::string bit_string(std::uint64_t word, int count) {
    std::string s(count, '0');
    for (int i = 0; i < count; ++i)
        if ((word >> (count - 1 - i)) & 1u) s[i] = '1';
    return s;
}

int cmd_rate(const std::string& config_path) {
    const ExperimentSpec spec = load_experiment_file(config_path);
    std::cout << "label | scheme | rate_bpcu | rate | bits_per_frame | codebook_size\n";
    for (const auto& curve : spec.curves) {
        const ValidatedConfig config = validate(curve.config);
        const Rate rate = spectral_efficiency(config);
        std::cout << curve.label << " | " << to_string(config.scheme()) << " | "
                  << rate_string(rate) << " | " << boost::rational_cast<double>(rate) << " | "
                  << bits_per_frame(config) << " | " << codebook_size(config) << "\n";
    }
    return 0;
}

int cmd_codebook(const std::string& config_path, const std::string& label,
                 const std::string& out_path, std::uint64_t cap) {
    const ExperimentSpec spec = load_experiment_file(config_path);
    const CurveSpec* curve = nullptr;
    if (label.empty()) {
        if (spec.curves.size() != 1)
            throw ExperimentError("config has several curves; pick one with --label");
        curve = &spec.curves.front();
    } else {
        for (const auto& c : spec.curves)
            if (c.label == label) curve = &c;
        if (!curve) throw ExperimentError("no curve labelled '" + label + "'");
    }

    const ValidatedConfig config = validate(curve->config);
    const Constellation constellation = build_constellation(config.mod_order(), config.family());
    const int bits = bits_per_frame(config);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::ios_base::failure("cannot open output file: " + out_path);
        out = &file;
    }

    CodebookEnumerator enumerator(config, constellation, cap);
    Codeword cw;
    FrameSignal signal;
    while (enumerator.next(cw, signal)) {
        const Tap tap = rank_to_tap(cw.tap_rank, config.frame_slots(), config.active_slots());
        *out << bit_string(decode_frame_word(cw, config), bits) << " tap=";
        for (std::size_t i = 0; i < tap.active.size(); ++i)
            *out << (i ? "," : "") << tap.active[i];
        *out << " ant=";
        for (int s = 0; s < config.active_slots(); ++s) {
            if (s) *out << ";";
            for (int g = 0; g < config.groups(); ++g)
                *out << (g ? "," : "")
                     << static_cast<int>(cw.antenna[static_cast<std::size_t>(s) * config.groups() + g]);
        }
        *out << " sym=";
        for (int s = 0; s < config.active_slots(); ++s)
            *out << (s ? "," : "") << cw.symbol[s];
        *out << " nz=";
        bool first = true;
        for (std::size_t i = 0; i < signal.values.size(); ++i) {
            const auto v = signal.values[i];
            if (v == std::complex<double>{0.0, 0.0}) continue;
            if (!first) *out << ";";
            *out << i << ":(" << format_double(v.real()) << "," << format_double(v.imag()) << ")";
            first = false;
        }
        *out << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 const std::string& out_dir, const std::string& snr_override,
                 const std::string& csi_override, std::uint64_t seed, bool seed_given,
                 int threads, bool allow_mixed_rate) {
    ExperimentSpec spec;
    if (!preset.empty()) {
        spec = preset_experiment(preset, &std::cout);
    } else if (!config_path.empty()) {
        spec = load_experiment_file(config_path);
    } else {
        throw ExperimentError("simulate needs --config or --preset");
    }
    if (!snr_override.empty()) spec.snr_db = parse_snr_spec(snr_override);
    if (seed_given) spec.master_seed = seed;
    if (threads >= 0) spec.threads = threads;
    if (allow_mixed_rate) spec.allow_mixed_rate = true;
    if (!csi_override.empty()) {
        CsiMode mode;
        if (csi_override == "perfect") mode = CsiMode::PERFECT;
        else if (csi_override == "cee") mode = CsiMode::CEE;
        else throw ExperimentError("--csi must be perfect or cee");
        for (auto& curve : spec.curves) curve.csi = mode;
    }

    const std::vector<BerRecord> records = run_experiment(spec, &std::cerr);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path csv_path = std::filesystem::path(out_dir) / (spec.name + ".csv");
    const std::filesystem::path svg_path = std::filesystem::path(out_dir) / (spec.name + ".svg");

    std::ofstream csv(csv_path);
    if (!csv) throw std::ios_base::failure("cannot open output file: " + csv_path.string());
    write_csv(csv, records);

    std::vector<SvgCurve> curves;
    for (const auto& curve : spec.curves)
        curves.push_back({curve.label, curve_points(records, curve.label),
                          curve.csi == CsiMode::CEE});
    std::ofstream svg(svg_path);
    if (!svg) throw std::ios_base::failure("cannot open output file: " + svg_path.string());
    write_svg(svg, spec.name, curves);

    std::cout << "wrote " << csv_path.string() << "\n";
    std::cout << "wrote " << svg_path.string() << "\n";
    return 0;
}

int cmd_gap(const std::string& csv_path, const std::string& csv_path_b, const std::string& label_a,
            const std::string& label_b, double target_ber) {
    const std::vector<BerRecord> records_a = load_csv_file(csv_path);
    const std::vector<BerRecord> records_b =
        csv_path_b.empty() ? records_a : load_csv_file(csv_path_b);

    const std::vector<BerPoint> a = curve_points(records_a, label_a);
    const std::vector<BerPoint> b = curve_points(records_b, label_b);
    const CurveCrossing ca = snr_at_ber(a, target_ber);
    const CurveCrossing cb = snr_at_ber(b, target_ber);

    const auto describe = [&](const std::string& label, const CurveCrossing& c) {
        std::cout << "curve '" << label << "': BER " << format_double(target_ber) << " at "
                  << format_double(c.snr_db) << " dB (bracket " << format_double(c.lower.snr_db)
                  << " dB @ " << format_double(c.lower.ber) << " .. "
                  << format_double(c.upper.snr_db) << " dB @ " << format_double(c.upper.ber)
                  << ")\n";
    };
    describe(label_a, ca);
    describe(label_b, cb);
    std::cout << "gap (b - a): " << format_double(cb.snr_db - ca.snr_db) << " dB\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level Monte Carlo simulator for index-modulation MIMO schemes"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "results", label, out_path;
    std::string snr_override, csi_override, csv_path, csv_path_b, label_a, label_b;
    std::uint64_t seed = 1;
    std::uint64_t cap = kDefaultEnumerationCap;
    int threads = -1;
    bool allow_mixed_rate = false;
    double target_ber = 1e-4;

    CLI::App* rate = app.add_subcommand("rate", "print rate, bits per frame and codebook size");
    rate->add_option("--config", config_path, "scheme config file")->required();

    CLI::App* codebook = app.add_subcommand("codebook", "dump every codeword of a scheme");
    codebook->add_option("--config", config_path, "scheme config file")->required();
    codebook->add_option("--label", label, "curve label when the file has several");
    codebook->add_option("--out", out_path, "write to a file instead of stdout");
    codebook->add_option("--cap", cap, "enumeration cap (default 2^22)");

    CLI::App* simulate = app.add_subcommand("simulate", "run BER sweeps; writes CSV and SVG");
    simulate->add_option("--config", config_path, "experiment config file");
    simulate->add_option("--preset", preset, "canned experiment: fig2 fig3 fig4 fig5");
    auto* seed_opt = simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--snr", snr_override, "override SNR grid, start:step:stop");
    simulate->add_option("--csi", csi_override, "override CSI mode for every curve: perfect|cee");
    simulate->add_option("--out", out_dir, "output directory (default results)");
    simulate->add_option("--threads", threads, "worker threads (0 = hardware; affects speed only)");
    simulate->add_flag("--allow-mixed-rate", allow_mixed_rate,
                       "permit curves with different spectral efficiency");

    CLI::App* gap = app.add_subcommand("gap", "SNR gap between two curves at a target BER");
    gap->add_option("--csv", csv_path, "CSV produced by simulate")->required();
    gap->add_option("--csv-b", csv_path_b, "optional second CSV holding curve b");
    gap->add_option("--curve-a", label_a, "label of the reference (better) curve")->required();
    gap->add_option("--curve-b", label_b, "label of the compared curve")->required();
    gap->add_option("--target-ber", target_ber, "target BER (default 1e-4)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) return cmd_rate(config_path);
        if (codebook->parsed()) return cmd_codebook(config_path, label, out_path, cap);
        if (simulate->parsed())
            return cmd_simulate(config_path, preset, out_dir, snr_override, csi_override, seed,
                                seed_opt->count() > 0, threads, allow_mixed_rate);
        if (gap->parsed()) return cmd_gap(csv_path, csv_path_b, label_a, label_b, target_ber);
    } catch (const imsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const imsim::ExperimentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const imsim::CapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
