#include "vigil/ingest/remote.hpp"

#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"

#include "vigil/core/errors.hpp"
#include "vigil/core/json_util.hpp"

namespace vigil::ingest {

namespace {

httplib::Client make_client(const Url& url, Seconds timeout) {
    httplib::Client cli(url.origin);
    const auto us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
    const auto sec = static_cast<time_t>(us.count() / 1000000);
    const auto usec = static_cast<time_t>(us.count() % 1000000);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    cli.set_follow_location(true);
    return cli;
}

}  // namespace

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

Contract fetch_code_rpc(const std::string& endpoint, const Address& address, Seconds timeout) {
    const auto url = split_url(endpoint);
    auto cli = make_client(url, timeout);
    const Json request = {{"jsonrpc", "2.0"},
                          {"id", 1},
                          {"method", "eth_getCode"},
                          {"params", {address.to_string(), "latest"}}};
    const auto res = cli.Post(url.path, request.dump(), "application/json");
    if (!res) throw RpcTransport("cannot reach " + endpoint + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw RpcTransport("HTTP " + std::to_string(res->status) + " from " + endpoint);

    const auto body = Json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw RpcTransport("malformed JSON-RPC response from " + endpoint);
    if (const auto err = body.find("error"); err != body.end() && !err->is_null()) {
        const auto msg = err->is_object() ? err->value("message", err->dump()) : err->dump();
        throw RpcError("eth_getCode failed: " + msg);
    }
    const auto result = body.find("result");
    if (result == body.end() || !result->is_string()) throw RpcTransport("JSON-RPC response has no result string");

    Contract c;
    c.address = address;
    c.origin = Origin::rpc;
    try {
        c.bytecode = decode_hex(result->get<std::string>());
    } catch (const InvalidHex& e) {
        throw RpcError(std::string("eth_getCode returned invalid hex: ") + e.what());
    }
    if (c.bytecode.empty()) throw NotAContract(address.to_string() + " holds no code (user account)");
    c.timestamp = now_utc();
    return c;
}

std::optional<std::string> fetch_source_explorer(const ExplorerClient& client, const Address& address) {
    const auto url = split_url(client.api_base);
    auto sleep = client.sleep;
    if (!sleep) sleep = [](Seconds s) { std::this_thread::sleep_for(s); };
    const httplib::Params params = {{"module", "contract"},
                                    {"action", "getsourcecode"},
                                    {"address", address.to_string()},
                                    {"apikey", client.api_key}};
    auto backoff = client.first_backoff;
    for (int attempt = 1; attempt <= client.attempts; ++attempt) {
        if (attempt > 1) {
            sleep(backoff);
            backoff *= 2;
        }
        if (client.limiter) client.limiter->acquire();
        auto cli = make_client(url, client.timeout);
        const auto res = cli.Get(url.path, params, httplib::Headers{});
        if (!res) {
            spdlog::warn("explorer: {} unreachable ({}), attempt {}", client.api_base, httplib::to_string(res.error()),
                         attempt);
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            spdlog::warn("explorer: HTTP {} for {}, attempt {}", res->status, address.to_string(), attempt);
            continue;
        }
        if (res->status != 200) {
            spdlog::warn("explorer: HTTP {} for {}", res->status, address.to_string());
            return std::nullopt;
        }
        const auto body = Json::parse(res->body, nullptr, false);
        if (body.is_discarded() || !body.is_object()) {
            spdlog::warn("explorer: malformed response for {}", address.to_string());
            return std::nullopt;
        }
        const auto result = body.find("result");
        if (result != body.end() && result->is_string()) {
            // Throttling is reported in-band by some explorers.
            if (result->get<std::string>().find("rate limit") != std::string::npos) {
                spdlog::warn("explorer: rate limited for {}, attempt {}", address.to_string(), attempt);
                continue;
            }
            return std::nullopt;
        }
        if (result == body.end() || !result->is_array() || result->empty() || !(*result)[0].is_object())
            return std::nullopt;
        const auto& entry = (*result)[0];
        const auto src = entry.find("SourceCode");
        if (src == entry.end() || !src->is_string() || src->get<std::string>().empty()) return std::nullopt;
        return src->get<std::string>();
    }
    spdlog::warn("explorer: giving up on {} after {} attempts", address.to_string(), client.attempts);
    return std::nullopt;
}

}  // namespace vigil::ingest
