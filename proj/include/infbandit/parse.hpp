#pragma once

// Text forms of reservoirs and families, as accepted on the command line:
//   beta:a,b[,cap]   discrete:x1;x2;...   dirac:low,high,w   uniform:lo,hi
//   bernoulli   gaussian[:variance]   poisson   exponential
// Names are case-insensitive.

#include "errors.hpp"
#include "exp_family.hpp"
#include "reservoir.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace infbandit {

namespace detail {

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view text, std::string_view context) {
    const std::string_view t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        throw InvalidInput("cannot parse number '" + std::string(text) + "' in '" +
                           std::string(context) + "'");
    return value;
}

inline std::vector<double> parse_list(std::string_view body, char sep, std::string_view context) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = body.find(sep, start);
        out.push_back(parse_number(body.substr(start, pos - start), context));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::pair<std::string, std::string_view> split_kind(std::string_view spec) {
    spec = trim(spec);
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) return {lowercase(spec), std::string_view{}};
    return {lowercase(trim(spec.substr(0, colon))), spec.substr(colon + 1)};
}

} // namespace detail

inline Reservoir parse_reservoir(std::string_view spec) {
    const auto [kind, body] = detail::split_kind(spec);
    if (kind == "beta") {
        const auto v = detail::parse_list(body, ',', spec);
        if (v.size() != 2 && v.size() != 3)
            throw InvalidInput("beta reservoir expects beta:a,b[,cap]");
        return Reservoir::beta(v[0], v[1], v.size() == 3 ? v[2] : 1.0);
    }
    if (kind == "discrete") return Reservoir::discrete(detail::parse_list(body, ';', spec));
    if (kind == "dirac") {
        const auto v = detail::parse_list(body, ',', spec);
        if (v.size() != 3) throw InvalidInput("dirac reservoir expects dirac:low,high,w");
        return Reservoir::dirac(v[0], v[1], v[2]);
    }
    if (kind == "uniform") {
        const auto v = detail::parse_list(body, ',', spec);
        if (v.size() != 2) throw InvalidInput("uniform reservoir expects uniform:lo,hi");
        return Reservoir::uniform(v[0], v[1]);
    }
    throw InvalidInput("unknown reservoir '" + std::string(spec) + "'");
}

inline ArmFamily parse_family(std::string_view spec) {
    const auto [kind, body] = detail::split_kind(spec);
    if (kind == "bernoulli") return ArmFamily::bernoulli();
    if (kind == "poisson") return ArmFamily::poisson();
    if (kind == "exponential") return ArmFamily::exponential();
    if (kind == "gaussian" || kind == "normal")
        return ArmFamily::gaussian(body.empty() ? 1.0 : detail::parse_number(body, spec));
    throw InvalidInput("unknown family '" + std::string(spec) + "'");
}

} // namespace infbandit
