#include "vigil/detect/registry.hpp"

#include <algorithm>

#include "vigil/core/errors.hpp"

namespace vigil::detect {

DetectorRegistry DetectorRegistry::defaults() {
    DetectorRegistry r;
    r.entries_ = {
        {std::string(ids::bad_randomness), VulnClass::RandomNumbers, true},
        {std::string(ids::call_depth), VulnClass::StackSize, false},
        {std::string(ids::delegatecall_use), VulnClass::DelegateCallUse, true},
        {std::string(ids::outdated_pragma), VulnClass::OutdatedCompiler, true},
        {std::string(ids::reentrancy), VulnClass::Reentrancy, true},
        {std::string(ids::selfdestruct_use), VulnClass::SelfDestructUse, true},
        {std::string(ids::time_dependence), VulnClass::TimeRestrictions, true},
        {std::string(ids::tx_origin), VulnClass::TxOriginAuth, true},
        {std::string(ids::unchecked_call), VulnClass::ExceptionDisorder, true},
    };
    return r;
}

bool DetectorRegistry::contains(std::string_view id) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.id == id; });
}

bool DetectorRegistry::enabled(std::string_view id) const {
    for (const auto& e : entries_)
        if (e.id == id) return e.enabled;
    return false;
}

void DetectorRegistry::set_enabled(std::string_view id, bool on) {
    for (auto& e : entries_) {
        if (e.id != id) continue;
        if (e.enabled != on) {
            e.enabled = on;
            ++version_;
        }
        return;
    }
    throw Error("unknown detector '" + std::string(id) + "'");
}

void DetectorRegistry::set_all_enabled(bool on) {
    for (auto& e : entries_) set_enabled(e.id, on);
}

void DetectorRegistry::set_config(const DetectorConfig& config) {
    if (config.call_chain_depth < 1) throw Error("call_chain_depth must be >= 1");
    if (config == config_) return;
    config_ = config;
    ++version_;
}

}  // namespace vigil::detect
