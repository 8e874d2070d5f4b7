#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace vigil {

/// Vulnerability taxonomy. The first eleven members are the classic
/// smart-contract vulnerability families; the rest are usage/extension
/// classes needed by corpus statistics.
enum class VulnClass {
    Reentrancy,
    ExceptionDisorder,
    CallsToUnknown,
    TypeConversion,
    Secrets,
    UnpredictableState,
    RandomNumbers,
    TimeRestrictions,
    ImmutableBugs,
    LossOfEther,
    StackSize,
    SelfDestructUse,
    DelegateCallUse,
    TxOriginAuth,
    UncheckedCall,
    OutdatedCompiler,
};

inline constexpr std::array kAllVulnClasses = {
    VulnClass::Reentrancy,       VulnClass::ExceptionDisorder, VulnClass::CallsToUnknown,
    VulnClass::TypeConversion,   VulnClass::Secrets,           VulnClass::UnpredictableState,
    VulnClass::RandomNumbers,    VulnClass::TimeRestrictions,  VulnClass::ImmutableBugs,
    VulnClass::LossOfEther,      VulnClass::StackSize,         VulnClass::SelfDestructUse,
    VulnClass::DelegateCallUse,  VulnClass::TxOriginAuth,      VulnClass::UncheckedCall,
    VulnClass::OutdatedCompiler,
};

/// Stable snake_case name used in every serialized form.
std::string_view to_string(VulnClass c);
/// Exact snake_case name only.
std::optional<VulnClass> vuln_class_from_string(std::string_view name);
/// Tolerant lookup for tool output: ignores case, '_', '-', and spaces, and
/// knows a few common aliases ("reentrance", "tx.origin", "suicide", ...).
std::optional<VulnClass> match_vuln_class(std::string_view loose);

enum class Severity { info, low, medium, high };

std::string_view to_string(Severity s);
std::optional<Severity> severity_from_string(std::string_view name);

struct Finding {
    VulnClass vuln_class = VulnClass::Reentrancy;
    Severity severity = Severity::info;
    std::string detector;
    std::optional<std::size_t> location;  // program counter
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

using FindingList = std::vector<Finding>;

void to_json(nlohmann::json& j, const Finding& f);
void from_json(const nlohmann::json& j, Finding& f);

}  // namespace vigil
