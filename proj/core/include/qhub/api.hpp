#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>

namespace qhub::api {

struct Response {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Read-only JSON views of a hub store. Every call re-reads the store, so an update published
/// by a writer becomes visible on the next request.
class Api {
public:
    /// Throws hub::StoreError when the store is missing or corrupt.
    explicit Api(std::filesystem::path root);

    Response handle(const std::string& path, const std::map<std::string, std::string>& params) const;

private:
    std::filesystem::path root_;
};

/// Serves Api over HTTP until the process is stopped. Throws on port binding failure;
/// `on_ready` runs once the port is bound.
void serve(const std::filesystem::path& root, const std::string& host, int port,
           const std::function<void()>& on_ready = {});

} // namespace qhub::api
