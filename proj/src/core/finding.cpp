#include "vigil/core/finding.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include <nlohmann/json.hpp>

#include "vigil/core/errors.hpp"

namespace vigil {

namespace {

constexpr std::pair<VulnClass, std::string_view> kClassNames[] = {
    {VulnClass::Reentrancy, "reentrancy"},
    {VulnClass::ExceptionDisorder, "exception_disorder"},
    {VulnClass::CallsToUnknown, "calls_to_unknown"},
    {VulnClass::TypeConversion, "type_conversion"},
    {VulnClass::Secrets, "secrets"},
    {VulnClass::UnpredictableState, "unpredictable_state"},
    {VulnClass::RandomNumbers, "random_numbers"},
    {VulnClass::TimeRestrictions, "time_restrictions"},
    {VulnClass::ImmutableBugs, "immutable_bugs"},
    {VulnClass::LossOfEther, "loss_of_ether"},
    {VulnClass::StackSize, "stack_size"},
    {VulnClass::SelfDestructUse, "self_destruct_use"},
    {VulnClass::DelegateCallUse, "delegate_call_use"},
    {VulnClass::TxOriginAuth, "tx_origin_auth"},
    {VulnClass::UncheckedCall, "unchecked_call"},
    {VulnClass::OutdatedCompiler, "outdated_compiler"},
};

// Keys are already squashed (lowercase alphanumerics only).
constexpr std::pair<std::string_view, VulnClass> kAliases[] = {
    {"reentrance", VulnClass::Reentrancy},
    {"reentrant", VulnClass::Reentrancy},
    {"dao", VulnClass::Reentrancy},
    {"exceptiondisorders", VulnClass::ExceptionDisorder},
    {"mishandledexceptions", VulnClass::ExceptionDisorder},
    {"mishandledexception", VulnClass::ExceptionDisorder},
    {"uncheckedlowlevelcall", VulnClass::UncheckedCall},
    {"uncheckedcalls", VulnClass::UncheckedCall},
    {"uncheckedsend", VulnClass::UncheckedCall},
    {"uncheckedreturnvalue", VulnClass::UncheckedCall},
    {"externalcall", VulnClass::CallsToUnknown},
    {"integeroverflow", VulnClass::TypeConversion},
    {"integerunderflow", VulnClass::TypeConversion},
    {"arithmetic", VulnClass::TypeConversion},
    {"transactionorderingdependence", VulnClass::UnpredictableState},
    {"tod", VulnClass::UnpredictableState},
    {"frontrunning", VulnClass::UnpredictableState},
    {"badrandomness", VulnClass::RandomNumbers},
    {"weakrandomness", VulnClass::RandomNumbers},
    {"randomness", VulnClass::RandomNumbers},
    {"timestampdependence", VulnClass::TimeRestrictions},
    {"timestampdependency", VulnClass::TimeRestrictions},
    {"timedependence", VulnClass::TimeRestrictions},
    {"timestamp", VulnClass::TimeRestrictions},
    {"etherlock", VulnClass::LossOfEther},
    {"lockedether", VulnClass::LossOfEther},
    {"greedy", VulnClass::LossOfEther},
    {"prodigal", VulnClass::LossOfEther},
    {"callstackdepth", VulnClass::StackSize},
    {"callstack", VulnClass::StackSize},
    {"stackdepth", VulnClass::StackSize},
    {"selfdestruct", VulnClass::SelfDestructUse},
    {"suicide", VulnClass::SelfDestructUse},
    {"suicidal", VulnClass::SelfDestructUse},
    {"unprotectedselfdestruct", VulnClass::SelfDestructUse},
    {"delegatecall", VulnClass::DelegateCallUse},
    {"controlleddelegatecall", VulnClass::DelegateCallUse},
    {"txorigin", VulnClass::TxOriginAuth},
    {"outdatedcompiler", VulnClass::OutdatedCompiler},
    {"solcversion", VulnClass::OutdatedCompiler},
    {"compilerversion", VulnClass::OutdatedCompiler},
};

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
    }
    return out;
}

constexpr std::pair<Severity, std::string_view> kSeverityNames[] = {
    {Severity::info, "info"},
    {Severity::low, "low"},
    {Severity::medium, "medium"},
    {Severity::high, "high"},
};

}  // namespace

std::string_view to_string(VulnClass c) {
    for (const auto& [cls, name] : kClassNames)
        if (cls == c) return name;
    return "unknown";
}

std::optional<VulnClass> vuln_class_from_string(std::string_view name) {
    for (const auto& [cls, n] : kClassNames)
        if (n == name) return cls;
    return std::nullopt;
}

std::optional<VulnClass> match_vuln_class(std::string_view loose) {
    const auto key = squash(loose);
    if (key.empty()) return std::nullopt;
    for (const auto& [cls, name] : kClassNames)
        if (squash(name) == key) return cls;
    for (const auto& [alias, cls] : kAliases)
        if (squash(alias) == key) return cls;
    return std::nullopt;
}

std::string_view to_string(Severity s) {
    for (const auto& [sev, name] : kSeverityNames)
        if (sev == s) return name;
    return "info";
}

std::optional<Severity> severity_from_string(std::string_view name) {
    const auto key = squash(name);
    for (const auto& [sev, n] : kSeverityNames)
        if (n == key) return sev;
    if (key == "warning" || key == "warn") return Severity::medium;
    if (key == "critical" || key == "error") return Severity::high;
    if (key == "informational" || key == "note" || key == "optimization") return Severity::info;
    return std::nullopt;
}

void to_json(nlohmann::json& j, const Finding& f) {
    j = nlohmann::json{{"vuln_class", to_string(f.vuln_class)},
                       {"severity", to_string(f.severity)},
                       {"detector", f.detector},
                       {"message", f.message}};
    j["location"] = f.location ? nlohmann::json(*f.location) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, Finding& f) {
    const auto cls = vuln_class_from_string(j.at("vuln_class").get<std::string>());
    if (!cls) throw Error("unknown vuln_class '" + j.at("vuln_class").get<std::string>() + "'");
    const auto sev = severity_from_string(j.at("severity").get<std::string>());
    if (!sev) throw Error("unknown severity '" + j.at("severity").get<std::string>() + "'");
    f.vuln_class = *cls;
    f.severity = *sev;
    f.detector = j.at("detector").get<std::string>();
    f.message = j.at("message").get<std::string>();
    const auto& loc = j.at("location");
    f.location = loc.is_null() ? std::nullopt : std::optional<std::size_t>(loc.get<std::size_t>());
}

}  // namespace vigil
