#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/decoy.hpp"
#include "qkdlab/keyrate.hpp"

namespace qkdlab {

// File I/O problem; carries the path involved.
struct IoError : std::runtime_error {
    std::string path;

    IoError(std::string path_, const std::string& message)
        : std::runtime_error("i/o error for '" + path_ + "': " + message), path(std::move(path_)) {}
};

inline std::string_view to_string(RateMode mode) {
    return mode == RateMode::asymptotic ? "asymptotic" : "two-decoy";
}

// Flag bits rendered as "-" (none) or "|"-joined tokens, lowest bit first.
inline std::string flags_to_string(unsigned flags) {
    if (flags == 0)
        return "-";
    std::string s;
    const auto add = [&s](std::string_view token) {
        if (!s.empty())
            s += '|';
        s += token;
    };
    if (flags & pointflag::floored)
        add("floored");
    if (flags & pointflag::clamped)
        add("clamped");
    if (flags & pointflag::no_signal)
        add("no_signal");
    return s;
}

namespace detail {

// Shortest representation that round-trips the double exactly.
inline std::string csv_num(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// Fixed 17-significant-digit form: every distinct double gets a distinct,
// stable column of text, convenient for diffing runs.
inline std::string csv_num17(double v) {
    char buf[48];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

inline double csv_parse_double(std::string_view v, const std::string& path) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw IoError(path, "bad number '" + std::string(v) + "'");
    return out;
}

}  // namespace detail

inline constexpr std::string_view keyrate_csv_header = "distance_km,eta_s,mode,mu,nu,rate,flags";

inline void write_keyrate_csv(std::ostream& os, const std::vector<KeyRatePoint>& points) {
    os << keyrate_csv_header << '\n';
    for (const KeyRatePoint& p : points) {
        os << detail::csv_num(p.distance_km) << ',' << detail::csv_num(p.eta_s) << ','
           << to_string(p.mode) << ',' << detail::csv_num(p.mu) << ',' << detail::csv_num(p.nu)
           << ',' << detail::csv_num17(p.rate) << ',' << flags_to_string(p.flags) << '\n';
    }
}

inline void write_keyrate_csv(const std::string& path, const std::vector<KeyRatePoint>& points) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError(path, "cannot open for writing");
    write_keyrate_csv(os, points);
    os.flush();
    if (!os) {
        os.close();
        std::remove(path.c_str());
        throw IoError(path, "write failed");
    }
}

inline constexpr std::string_view pair_statistics_csv_header = "basis,i,j,gain,qber,empty";

// Serialize observed gain/error tables; from_csv restores them bit-for-bit.
inline std::string pair_statistics_to_csv(const PairStatistics& stats) {
    std::string s{pair_statistics_csv_header};
    s += '\n';
    for (const Basis basis : {Basis::z, Basis::x}) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const BasisStatistics& c = stats.cell(basis, i, j);
                s += basis == Basis::z ? 'z' : 'x';
                s += ',';
                s += std::to_string(i);
                s += ',';
                s += std::to_string(j);
                s += ',';
                s += detail::csv_num(c.gain);
                s += ',';
                s += detail::csv_num(c.qber);
                s += ',';
                s += c.empty ? '1' : '0';
                s += '\n';
            }
        }
    }
    return s;
}

inline PairStatistics pair_statistics_from_csv(std::string_view text, const std::string& path = "<string>") {
    PairStatistics stats;
    bool filled[2][3][3] = {};
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (line_no == 1) {
            if (line != pair_statistics_csv_header)
                throw IoError(path, "unexpected header '" + std::string(line) + "'");
            continue;
        }
        std::array<std::string_view, 6> fields;
        std::size_t field = 0, start = 0;
        for (std::size_t k = 0; k <= line.size(); ++k) {
            if (k == line.size() || line[k] == ',') {
                if (field >= fields.size())
                    throw IoError(path, "too many fields on line " + std::to_string(line_no));
                fields[field++] = line.substr(start, k - start);
                start = k + 1;
            }
        }
        if (field != fields.size())
            throw IoError(path, "expected 6 fields on line " + std::to_string(line_no));

        Basis basis;
        if (fields[0] == "z")
            basis = Basis::z;
        else if (fields[0] == "x")
            basis = Basis::x;
        else
            throw IoError(path, "bad basis '" + std::string(fields[0]) + "'");
        const int i = static_cast<int>(detail::csv_parse_double(fields[1], path));
        const int j = static_cast<int>(detail::csv_parse_double(fields[2], path));
        if (i < 0 || i > 2 || j < 0 || j > 2)
            throw IoError(path, "intensity index out of range on line " + std::to_string(line_no));

        BasisStatistics cell;
        cell.gain = detail::csv_parse_double(fields[3], path);
        cell.qber = detail::csv_parse_double(fields[4], path);
        if (fields[5] == "1")
            cell.empty = true;
        else if (fields[5] == "0")
            cell.empty = false;
        else
            throw IoError(path, "bad empty flag '" + std::string(fields[5]) + "'");

        const int b = basis == Basis::z ? 0 : 1;
        if (filled[b][i][j])
            throw IoError(path, "duplicate cell on line " + std::to_string(line_no));
        filled[b][i][j] = true;
        stats.cell(basis, i, j) = cell;
    }
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!filled[b][i][j])
                    throw IoError(path, "missing cell " + std::string(b ? "x" : "z") + "," +
                                            std::to_string(i) + "," + std::to_string(j));
    return stats;
}

}  // namespace qkdlab
