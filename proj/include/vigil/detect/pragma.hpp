#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vigil::detect {

struct Version {
    int major = 0;
    int minor = 0;
    int patch = 0;

    static std::optional<Version> parse(std::string_view text);
    std::string to_string() const;

    friend constexpr auto operator<=>(const Version&, const Version&) = default;
};

/// A half-open-or-closed interval of versions; an absent bound is unbounded.
struct VersionInterval {
    std::optional<Version> lower;
    bool lower_inclusive = true;
    std::optional<Version> upper;
    bool upper_inclusive = false;

    bool empty() const;
    bool contains(const Version& v) const;
    bool admits_at_least(const Version& floor) const;
};

/// Union of intersections, as written with "||" and whitespace-separated comparators.
class VersionConstraint {
public:
    /// Accepts exact ("0.4.24", "=0.4.24"), comparison (">=", ">", "<", "<="),
    /// caret, tilde, wildcard ("*", "x", "0.4.x"), partial ("0.4") and
    /// hyphen range ("0.4.0 - 0.5.0") forms. nullopt on malformed input.
    static std::optional<VersionConstraint> parse(std::string_view text);

    bool satisfiable() const;
    bool contains(const Version& v) const;
    /// True when at least one version >= floor satisfies the constraint.
    bool admits_at_least(const Version& floor) const;

    const std::vector<VersionInterval>& alternatives() const { return alternatives_; }

private:
    std::vector<VersionInterval> alternatives_;
};

/// Every `pragma solidity ...;` constraint text in the source, comments stripped.
std::vector<std::string> solidity_pragmas(std::string_view source);

}  // namespace vigil::detect
