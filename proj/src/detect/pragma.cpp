#include "vigil/detect/pragma.hpp"

#include <cctype>
#include <charconv>
#include <regex>

namespace vigil::detect {

namespace {

bool is_wild(std::string_view s) { return s == "*" || s == "x" || s == "X"; }

// A version as written: up to three components, any of which may be a wildcard.
struct Partial {
    std::optional<int> major, minor, patch;
    int specified = 0;  // components given as numbers before the first wildcard
};

std::optional<Partial> parse_partial(std::string_view text) {
    if (!text.empty() && (text.front() == 'v' || text.front() == 'V')) text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    Partial p;
    std::optional<int>* slots[] = {&p.major, &p.minor, &p.patch};
    int index = 0;
    bool wild_seen = false;
    while (!text.empty()) {
        if (index == 3) return std::nullopt;
        const auto dot = text.find('.');
        const auto part = text.substr(0, dot);
        if (part.empty()) return std::nullopt;
        if (is_wild(part)) {
            wild_seen = true;
        } else {
            if (wild_seen) return std::nullopt;
            int value = 0;
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
            if (ec != std::errc{} || ptr != part.data() + part.size() || value < 0) return std::nullopt;
            *slots[index] = value;
            ++p.specified;
        }
        ++index;
        if (dot == std::string_view::npos) break;
        text.remove_prefix(dot + 1);
        if (text.empty()) return std::nullopt;
    }
    return p;
}

Version floor_of(const Partial& p) { return Version{p.major.value_or(0), p.minor.value_or(0), p.patch.value_or(0)}; }

// Smallest version strictly above every version matching the partial, or nullopt if unbounded.
std::optional<Version> ceiling_of(const Partial& p) {
    switch (p.specified) {
        case 0: return std::nullopt;
        case 1: return Version{*p.major + 1, 0, 0};
        case 2: return Version{*p.major, *p.minor + 1, 0};
        default: return Version{*p.major, *p.minor, *p.patch + 1};
    }
}

void intersect(VersionInterval& acc, const VersionInterval& other) {
    if (other.lower && (!acc.lower || *other.lower > *acc.lower ||
                        (*other.lower == *acc.lower && !other.lower_inclusive))) {
        acc.lower = other.lower;
        acc.lower_inclusive = other.lower_inclusive;
    }
    if (other.upper && (!acc.upper || *other.upper < *acc.upper ||
                        (*other.upper == *acc.upper && !other.upper_inclusive))) {
        acc.upper = other.upper;
        acc.upper_inclusive = other.upper_inclusive;
    }
}

std::optional<VersionInterval> parse_comparator(std::string_view token) {
    std::string_view opname;
    for (std::string_view candidate : {">=", "<=", ">", "<", "=", "^", "~"}) {
        if (token.substr(0, candidate.size()) == candidate) {
            opname = candidate;
            break;
        }
    }
    const auto partial = parse_partial(token.substr(opname.size()));
    if (!partial) return std::nullopt;
    const Version lo = floor_of(*partial);
    const auto hi = ceiling_of(*partial);

    VersionInterval iv;
    if (opname.empty() || opname == "=") {
        if (partial->specified > 0) iv.lower = lo;
        iv.upper = hi;
    } else if (opname == ">=") {
        iv.lower = lo;
    } else if (opname == ">") {
        // ">0.4" excludes the whole 0.4 line.
        if (!hi) return VersionInterval{Version{0, 0, 0}, true, Version{0, 0, 0}, false};
        iv.lower = *hi;
    } else if (opname == "<") {
        if (partial->specified == 0) return VersionInterval{Version{0, 0, 0}, true, Version{0, 0, 0}, false};
        iv.upper = lo;
    } else if (opname == "<=") {
        iv.upper = hi;
    } else if (opname == "^") {
        if (partial->specified > 0) iv.lower = lo;
        if (partial->specified == 0) return iv;
        if (*partial->major != 0 || partial->specified == 1) {
            iv.upper = Version{*partial->major + 1, 0, 0};
        } else if (partial->specified == 2 || *partial->minor != 0) {
            iv.upper = Version{0, *partial->minor + 1, 0};
        } else {
            iv.upper = Version{0, 0, *partial->patch + 1};
        }
    } else if (opname == "~") {
        if (partial->specified > 0) iv.lower = lo;
        if (partial->specified == 1) iv.upper = Version{*partial->major + 1, 0, 0};
        else if (partial->specified >= 2) iv.upper = Version{*partial->major, *partial->minor + 1, 0};
    }
    return iv;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

}  // namespace

std::optional<Version> Version::parse(std::string_view text) {
    const auto p = parse_partial(text);
    if (!p || p->specified != 3) return std::nullopt;
    return floor_of(*p);
}

std::string Version::to_string() const {
    return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

bool VersionInterval::empty() const {
    if (!lower || !upper) return false;
    if (*lower < *upper) return false;
    return !(*lower == *upper && lower_inclusive && upper_inclusive);
}

bool VersionInterval::contains(const Version& v) const {
    if (lower && (v < *lower || (v == *lower && !lower_inclusive))) return false;
    if (upper && (v > *upper || (v == *upper && !upper_inclusive))) return false;
    return true;
}

bool VersionInterval::admits_at_least(const Version& floor) const {
    if (empty()) return false;
    if (!upper) return true;
    return *upper > floor || (*upper == floor && upper_inclusive);
}

std::optional<VersionConstraint> VersionConstraint::parse(std::string_view text) {
    VersionConstraint out;
    std::size_t pos = 0;
    while (true) {
        const auto bar = text.find("||", pos);
        const auto alt = text.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos);

        // Re-join operators separated from their version (">= 0.4.0").
        std::vector<std::string> tokens;
        for (auto t : split_ws(alt)) {
            if (!tokens.empty() && !tokens.back().empty() &&
                std::string_view("<>=^~").find(tokens.back().back()) != std::string_view::npos &&
                tokens.back().find_first_of("0123456789*xX") == std::string::npos)
                tokens.back() += std::string(t);
            else
                tokens.emplace_back(t);
        }
        if (tokens.empty()) return std::nullopt;

        VersionInterval acc;
        if (tokens.size() == 3 && tokens[1] == "-") {
            const auto lo = parse_partial(tokens[0]);
            const auto hi = parse_partial(tokens[2]);
            if (!lo || !hi) return std::nullopt;
            acc.lower = floor_of(*lo);
            acc.upper = ceiling_of(*hi);
        } else {
            for (const auto& t : tokens) {
                const auto iv = parse_comparator(t);
                if (!iv) return std::nullopt;
                intersect(acc, *iv);
            }
        }
        out.alternatives_.push_back(acc);
        if (bar == std::string_view::npos) break;
        pos = bar + 2;
    }
    return out;
}

bool VersionConstraint::satisfiable() const {
    for (const auto& iv : alternatives_)
        if (!iv.empty()) return true;
    return false;
}

bool VersionConstraint::contains(const Version& v) const {
    for (const auto& iv : alternatives_)
        if (iv.contains(v)) return true;
    return false;
}

bool VersionConstraint::admits_at_least(const Version& floor) const {
    for (const auto& iv : alternatives_)
        if (iv.admits_at_least(floor)) return true;
    return false;
}

std::vector<std::string> solidity_pragmas(std::string_view source) {
    std::string stripped;
    stripped.reserve(source.size());
    for (std::size_t i = 0; i < source.size();) {
        if (source.compare(i, 2, "//") == 0) {
            const auto nl = source.find('\n', i);
            i = nl == std::string_view::npos ? source.size() : nl;
        } else if (source.compare(i, 2, "/*") == 0) {
            const auto close = source.find("*/", i + 2);
            i = close == std::string_view::npos ? source.size() : close + 2;
            stripped.push_back(' ');
        } else {
            stripped.push_back(source[i++]);
        }
    }
    static const std::regex kPragma(R"(\bpragma\s+solidity\b([^;]*)(;|$))");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(stripped.begin(), stripped.end(), kPragma); it != std::sregex_iterator(); ++it)
        out.push_back((*it)[1].str());
    return out;
}

}  // namespace vigil::detect
