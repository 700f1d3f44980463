#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "livedata/formats.hpp"
#include "livedata/repository.hpp"

namespace livedata {

struct HttpRequest {
    std::string method = "GET";
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::map<std::string, std::string> headers;
    std::string body;
};

struct SearchQuery {
    std::optional<std::string> text;
    std::set<ContentKind> kinds;
    std::set<std::string> categories;
    std::optional<std::string> language_tag;
    std::size_t page = 1;
    std::size_t page_size = 20;
};

/// Throws Error(InvalidArgument) whose message starts with the offending field.
SearchQuery parse_search_query(const std::multimap<std::string, std::string>& params);
/// Inverse of parse_search_query, for building peer URLs.
std::string to_query_string(const SearchQuery& query);

/// Lower-cased tokens of `text`; ASCII alphanumerics and non-ASCII bytes form
/// tokens, everything else separates them.
std::vector<std::string> tokenize(std::string_view text);

enum class RequestStatus { Pending, Approved, Denied };
std::string_view to_string(RequestStatus status) noexcept;

inline constexpr std::string_view kRequestsFile = "requests.json";

/// The node's public HTTP API over DREP. Framework independent: the server
/// adapter and the in-process transport both call handle().
class CatalogueService {
  public:
    explicit CatalogueService(Repository& repo) : repo_(repo) {}

    HttpResponse handle(const HttpRequest& request);

    // Administrator side of the access-request flow.
    Json list_requests() const;
    Json approve(const std::string& request_id);
    Json deny(const std::string& request_id);

    [[nodiscard]] Repository& repository() noexcept { return repo_; }

  private:
    Json node_summary() const;
    Json search(const SearchQuery& query) const;
    Json detail(const DatasetRef& ref) const;
    HttpResponse download(const DatasetRef& ref, const std::optional<std::string>& token);
    HttpResponse create_request(const DatasetRef& ref, const std::string& body);
    Json request_status(const std::string& request_id) const;
    Json decide(const std::string& request_id, RequestStatus decision);

    Repository& repo_;
};

/// Serves a CatalogueService over HTTP/1.1 on a background thread.
class CatalogueServer {
  public:
    explicit CatalogueServer(CatalogueService& service);
    ~CatalogueServer();
    CatalogueServer(const CatalogueServer&) = delete;
    CatalogueServer& operator=(const CatalogueServer&) = delete;

    /// Binds and starts serving; port 0 picks a free port. Returns the port.
    int start(const std::string& host, int port);
    void stop();
    /// Blocks until stop() is called from another thread.
    void wait();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace livedata
