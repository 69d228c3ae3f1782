#include "imsim/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace imsim {

std::string format_double(double value) {
    std::array<char, 64> buffer;
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buffer.data(), end);
}

void write_csv(std::ostream& out, std::span<const BerRecord> records) {
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.label << ',' << format_double(r.snr_db) << ',' << r.frames << ',' << r.bit_errors
            << ',' << r.bit_errors_time << ',' << r.bit_errors_antenna << ','
            << r.bit_errors_symbol << ',' << format_double(r.ber) << ',' << format_double(r.ci95)
            << ',' << to_string(r.stop) << "\n";
    }
}

std::string csv_string(std::span<const BerRecord> records) {
    std::ostringstream out;
    write_csv(out, records);
    return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) fields.push_back(item);
    return fields;
}

}  // namespace

std::vector<BerRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::ios_base::failure("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw std::ios_base::failure("unexpected CSV header: " + line);

    std::vector<BerRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 10) throw std::ios_base::failure("malformed CSV row: " + line);
        BerRecord r;
        r.label = fields[0];
        r.snr_db = std::stod(fields[1]);
        r.frames = std::stoull(fields[2]);
        r.bit_errors = std::stoull(fields[3]);
        r.bit_errors_time = std::stoull(fields[4]);
        r.bit_errors_antenna = std::stoull(fields[5]);
        r.bit_errors_symbol = std::stoull(fields[6]);
        r.ber = std::stod(fields[7]);
        r.ci95 = std::stod(fields[8]);
        if (fields[9] == "min_errors") r.stop = StopReason::MIN_ERRORS;
        else if (fields[9] == "max_frames") r.stop = StopReason::MAX_FRAMES;
        else throw std::ios_base::failure("unknown stop reason: " + fields[9]);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<BerRecord> load_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open CSV file: " + path);
    return read_csv(in);
}

std::vector<BerPoint> curve_points(std::span<const BerRecord> records, const std::string& label) {
    std::vector<BerPoint> points;
    for (const auto& r : records)
        if (r.label == label) points.push_back({r.snr_db, r.ber});
    if (points.empty()) throw std::domain_error("no curve labelled '" + label + "' in the records");
    std::stable_sort(points.begin(), points.end(),
                     [](const BerPoint& a, const BerPoint& b) { return a.snr_db < b.snr_db; });
    return points;
}

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
};

struct Mapping {
    double x0, x1, y_top_log, y_bot_log;
    double left, top, width, height;

    double x(double snr) const { return left + (snr - x0) / (x1 - x0) * width; }
    double y(double ber) const {
        const double l = std::log10(ber);
        return top + (y_top_log - l) / (y_top_log - y_bot_log) * height;
    }
};

}  // namespace

void write_svg(std::ostream& out, const std::string& title, std::span<const SvgCurve> curves) {
    constexpr double kWidth = 920, kHeight = 640;
    constexpr double kLeft = 80, kTop = 50, kRight = 240, kBottom = 70;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double snr_min = 0.0, snr_max = 1.0, ber_min = 1.0;
    bool any = false;
    for (const auto& curve : curves) {
        for (const auto& p : curve.points) {
            if (!any) {
                snr_min = snr_max = p.snr_db;
                any = true;
            }
            snr_min = std::min(snr_min, p.snr_db);
            snr_max = std::max(snr_max, p.snr_db);
            if (p.ber > 0.0) ber_min = std::min(ber_min, p.ber);
        }
    }
    if (snr_max <= snr_min) snr_max = snr_min + 1.0;
    const double bot_log =
        std::min(-1.0, std::max(-9.0, std::floor(std::log10(std::max(ber_min, 1e-9)))));

    Mapping map{snr_min, snr_max, 0.0, bot_log, kLeft, kTop, plot_w, plot_h};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"28\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // decade grid and y labels
    for (int decade = 0; decade >= static_cast<int>(bot_log); --decade) {
        const double y = map.y(std::pow(10.0, decade));
        out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << decade
            << "</text>\n";
    }
    // x ticks every 2 dB
    for (double snr = std::ceil(snr_min / 2.0) * 2.0; snr <= snr_max + 1e-9; snr += 2.0) {
        const double x = map.x(snr);
        out << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
            << kTop + plot_h << "\" stroke=\"#eeeeee\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_double(snr) << "</text>\n";
    }
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">SNR (dB)"
        << "</text>\n";
    out << "<text x=\"22\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 22 " << kTop + plot_h / 2 << ")\">BER</text>\n";

    for (std::size_t i = 0; i < curves.size(); ++i) {
        const SvgCurve& curve = curves[i];
        const char* color = kPalette[i % kPalette.size()];
        std::ostringstream path;
        bool first = true;
        for (const auto& p : curve.points) {
            if (p.ber <= 0.0) continue;
            path << (first ? "" : " ") << format_double(map.x(p.snr_db)) << ","
                 << format_double(map.y(p.ber));
            first = false;
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
        if (curve.dashed) out << " stroke-dasharray=\"7,4\"";
        out << " points=\"" << path.str() << "\"/>\n";
        for (const auto& p : curve.points) {
            if (p.ber <= 0.0) continue;
            out << "<circle cx=\"" << format_double(map.x(p.snr_db)) << "\" cy=\""
                << format_double(map.y(p.ber)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        const double ly = kTop + 16 + 20.0 * static_cast<double>(i);
        const double lx = kLeft + plot_w + 14;
        out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 28 << "\" y2=\""
            << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
        if (curve.dashed) out << " stroke-dasharray=\"7,4\"";
        out << "/>\n";
        out << "<text x=\"" << lx + 34 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << curve.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace imsim
