#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ctgame/error.hpp"
#include "ctgame/price_path.hpp"

namespace ctgame {

/// Shortest-independent decimal form with 17 significant digits (round-trips any double).
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(line, "not a number: '" + std::string(field) + "'");
    return v;
}

/// Writes a temporary sibling file and renames it over `dest` only after `body`
/// returns; on any exception the temporary is removed and `dest` is untouched.
inline void write_atomically(const std::filesystem::path& dest,
                             const std::function<void(std::ostream&)>& body) {
    std::random_device rd;
    auto tmp = dest;
    tmp += ".tmp" + std::to_string(rd());
    try {
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw ValidationError("cannot open '" + tmp.string() + "' for writing");
            body(out);
            out.flush();
            if (!out) throw Error("write to '" + tmp.string() + "' failed");
        }
        std::filesystem::rename(tmp, dest);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

inline void write_path(const PricePath& path, std::ostream& out) {
    out << "time,price\n";
    auto t = path.times();
    auto s = path.prices();
    for (std::size_t i = 0; i < path.size(); ++i)
        out << format_double(t[i]) << ',' << format_double(s[i]) << '\n';
}

inline void write_path(const PricePath& path, const std::filesystem::path& dest) {
    write_atomically(dest, [&](std::ostream& out) { write_path(path, out); });
}

/// Reads "time,price" records. A leading "time,price" header is accepted;
/// blank lines are skipped. Validation failures report the offending line.
inline PricePath read_path(std::istream& in) {
    std::vector<double> times;
    std::vector<double> prices;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view rec = trim(line);
        if (rec.empty()) continue;
        if (lineno == 1 && rec == "time,price") continue;
        auto comma = rec.find(',');
        if (comma == std::string_view::npos || rec.find(',', comma + 1) != std::string_view::npos)
            throw ParseError(lineno, "expected two comma-separated columns");
        double t = parse_double(rec.substr(0, comma), lineno);
        double s = parse_double(rec.substr(comma + 1), lineno);
        if (!(s > 0.0) || !std::isfinite(s))
            throw ParseError(lineno, "price must be finite and positive");
        if (!std::isfinite(t)) throw ParseError(lineno, "time must be finite");
        if (!times.empty() && !(t > times.back()))
            throw ParseError(lineno, "time column must be strictly increasing");
        times.push_back(t);
        prices.push_back(s);
    }
    return PricePath::from_prices(std::move(times), std::move(prices));
}

inline PricePath read_path(const std::filesystem::path& src) {
    std::ifstream in(src, std::ios::binary);
    if (!in) throw ValidationError("cannot open path file '" + src.string() + "'");
    return read_path(in);
}

}  // namespace ctgame
