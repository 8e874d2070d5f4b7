#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace vigil {

using Json = nlohmann::json;

/// Compact single-line form with sorted keys; the one serialization used for
/// stored documents, exports and machine-readable CLI output.
inline std::string canonical_dump(const Json& j) {
    return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

/// Replaces every invalid UTF-8 sequence with U+FFFD so arbitrary tool
/// output survives a JSON round trip unchanged.
std::string sanitize_utf8(std::string_view bytes);

}  // namespace vigil
