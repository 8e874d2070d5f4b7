#pragma once

#include <functional>
#include <optional>
#include <string>

#include "vigil/core/contract.hpp"
#include "vigil/ingest/rate_limiter.hpp"

namespace vigil::ingest {

/// "http://host:port/path" split into what the HTTP client needs.
struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // at least "/"
};
Url split_url(const std::string& url);

/// eth_getCode(address, "latest"). Throws RpcTransport, RpcError, or
/// NotAContract when the address holds no code.
Contract fetch_code_rpc(const std::string& endpoint, const Address& address, Seconds timeout = Seconds{30});

struct ExplorerClient {
    std::string api_base;
    std::string api_key;
    RateLimiter* limiter = nullptr;  // shared, optional
    Seconds timeout{30};
    int attempts = 3;
    Seconds first_backoff{1};
    std::function<void(Seconds)> sleep;  // defaults to a real sleep
};

/// Best effort: verified source text, or nullopt on any failure.
std::optional<std::string> fetch_source_explorer(const ExplorerClient& client, const Address& address);

}  // namespace vigil::ingest
