#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "imsim/montecarlo.hpp"

namespace imsim {

/// Shortest round-trip decimal form, locale independent ('.' separator).
std::string format_double(double value);

inline constexpr const char* kCsvHeader =
    "label,snr_db,frames,bit_errors,bit_errors_ti,bit_errors_ai,bit_errors_sym,ber,ci95,"
    "stop_reason";

void write_csv(std::ostream& out, std::span<const BerRecord> records);
std::string csv_string(std::span<const BerRecord> records);

/// Parses a file produced by write_csv. Unknown stop reasons are rejected.
std::vector<BerRecord> read_csv(std::istream& in);
std::vector<BerRecord> load_csv_file(const std::string& path);

/// Pulls one labelled curve out of a record set, sorted by SNR; throws
/// std::domain_error when the label is absent.
std::vector<BerPoint> curve_points(std::span<const BerRecord> records, const std::string& label);

struct SvgCurve {
    std::string label;
    std::vector<BerPoint> points;
    bool dashed = false;  // dashed lines mark channel-estimation-error curves
};

/// Log-y BER chart. Zero-BER points are left out of the polylines.
void write_svg(std::ostream& out, const std::string& title, std::span<const SvgCurve> curves);

}  // namespace imsim
