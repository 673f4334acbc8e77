#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "rvkit/common/dates.hpp"
#include "rvkit/service/measure_store.hpp"

namespace rvkit {

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

using QueryParams = std::map<std::string, std::string>;

struct ApiOptions {
    std::chrono::milliseconds estimate_timeout{60'000};
    /// Clock for the default date window.
    std::function<Date()> today = today_utc;
};

/// HTTP+JSON front end over a measure store. Every route goes through `handle`, so tests do not
/// need sockets. Errors are {"error": {"code", "message"}} with a matching status.
///
///   GET  /health
///   GET  /defaults
///   GET  /assets, /assets/{class}
///   GET  /measures/{symbol}?from&to&names=rv5,bv5
///   GET  /summary/{symbol}?from&to&measure=rv5
///   POST /models/estimate  {"symbol","measure","family","from","to"}
///   GET  /download/{class}/{variance|covariance}
class Api {
public:
    explicit Api(std::shared_ptr<MeasureStore> store, ApiOptions options = {});

    [[nodiscard]] HttpResponse handle(std::string_view method, std::string_view path, const QueryParams& query,
                                      std::string_view body) const;

    [[nodiscard]] const MeasureStore& store() const { return *store_; }

private:
    std::shared_ptr<MeasureStore> store_;
    ApiOptions options_;
};

HttpResponse error_response(int status, std::string_view code, std::string_view message);

/// Blocking HTTP server. Returns when the server stops; throws std::runtime_error if binding fails.
void serve(const Api& api, const std::string& host, int port);

}  // namespace rvkit
