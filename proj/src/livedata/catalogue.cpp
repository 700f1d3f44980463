#include "livedata/catalogue.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <tuple>

#include "httplib.h"
#include "livedata/error.hpp"
#include "livedata/peers.hpp"

namespace livedata {

namespace {

constexpr std::string_view kApi = "/api/v1";

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation:
        case ErrorCode::Parse:
        case ErrorCode::InvalidArgument: return 400;
        case ErrorCode::Policy: return 403;
        case ErrorCode::NotFound:
        case ErrorCode::UnknownPeer: return 404;
        case ErrorCode::Conflict: return 409;
        case ErrorCode::Transient: return 502;
        case ErrorCode::Integrity:
        case ErrorCode::Io:
        case ErrorCode::Internal: return 500;
    }
    return 500;
}

Json error_body(std::string_view code, const std::string& message) {
    return Json{{"error", {{"code", std::string(code)}, {"message", message}}}};
}

HttpResponse json_response(int status, const Json& body) {
    HttpResponse r;
    r.status = status;
    r.body = body.dump() + "\n";
    return r;
}

HttpResponse error_response(const Error& e) {
    return json_response(status_for(e.code()), error_body(to_string(e.code()), e.what()));
}

std::size_t parse_count(const std::string& field, const std::string& value, std::size_t low, std::size_t high) {
    if (value.empty() || value.size() > 9 ||
        !std::all_of(value.begin(), value.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(ErrorCode::InvalidArgument, field + ": '" + value + "' is not a positive integer");
    }
    const std::size_t n = std::stoul(value);
    if (n < low || n > high) {
        throw Error(ErrorCode::InvalidArgument,
                    field + ": must be between " + std::to_string(low) + " and " + std::to_string(high));
    }
    return n;
}

DatasetRef path_ref(const std::vector<std::string>& parts, std::size_t at) {
    DatasetRef ref;
    ref.node_id = percent_decode(parts[at]);
    ref.local_id = percent_decode(parts[at + 1]);
    ref.version = static_cast<std::uint32_t>(parse_count("version", parts[at + 2], 1, 999999999));
    if (!is_node_id(ref.node_id) || !is_local_id(ref.local_id)) {
        throw Error(ErrorCode::NotFound, "no dataset " + ref.path());
    }
    return ref;
}

bool matches_token(const std::vector<std::string>& haystack, const std::string& needle) {
    return std::any_of(haystack.begin(), haystack.end(), [&](const std::string& t) { return starts_with(t, needle); });
}

Json request_view(const Json& r, bool reveal_token) {
    Json out;
    for (const char* key : {"request_id", "ref", "contact", "justification", "status", "created_at"}) {
        out[key] = r.at(key);
    }
    if (r.contains("decided_at")) out["decided_at"] = r.at("decided_at");
    if (r.at("status") == "approved") {
        const bool used = r.value("token_used", false);
        out["token_used"] = used;
        if (reveal_token && !used) out["token"] = r.at("token");
    }
    return out;
}

Json empty_requests() { return Json{{"requests", Json::array()}}; }

}  // namespace

std::string_view to_string(RequestStatus status) noexcept {
    switch (status) {
        case RequestStatus::Pending: return "pending";
        case RequestStatus::Approved: return "approved";
        case RequestStatus::Denied: return "denied";
    }
    return "pending";
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

SearchQuery parse_search_query(const std::multimap<std::string, std::string>& params) {
    SearchQuery q;
    for (const auto& [key, value] : params) {
        if (key == "text") {
            if (!value.empty()) q.text = value;
        } else if (key == "kinds" || key == "kind") {
            for (const auto& item : split(value, ',')) {
                if (item.empty()) continue;
                try {
                    const ContentKind kind = parse_content_kind(to_lower_ascii(item));
                    if (!is_stratified(kind)) throw Error(ErrorCode::InvalidArgument, "");
                    q.kinds.insert(kind);
                } catch (const Error&) {
                    throw Error(ErrorCode::InvalidArgument, "kinds: unknown kind '" + item + "'");
                }
            }
        } else if (key == "categories" || key == "category") {
            for (const auto& item : split(value, ',')) {
                if (item.empty()) continue;
                if (!is_slug(item)) throw Error(ErrorCode::InvalidArgument, "categories: '" + item + "' is not a slug");
                q.categories.insert(item);
            }
        } else if (key == "language_tag") {
            if (!is_language_tag(value)) {
                throw Error(ErrorCode::InvalidArgument, "language_tag: '" + value + "' is not a language tag");
            }
            q.language_tag = value;
        } else if (key == "page") {
            q.page = parse_count("page", value, 1, 1000000);
        } else if (key == "page_size") {
            q.page_size = parse_count("page_size", value, 1, 100);
        } else {
            throw Error(ErrorCode::InvalidArgument, key + ": unknown query parameter");
        }
    }
    return q;
}

std::string to_query_string(const SearchQuery& q) {
    std::vector<std::string> parts;
    if (q.text) parts.push_back("text=" + percent_encode(*q.text));
    auto list = [](const auto& items, auto name) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += ",";
            out += std::string(name(item));
        }
        return out;
    };
    if (!q.kinds.empty()) {
        parts.push_back("kinds=" + list(q.kinds, [](ContentKind k) { return to_string(k); }));
    }
    if (!q.categories.empty()) {
        parts.push_back("categories=" + list(q.categories, [](const std::string& c) { return c; }));
    }
    if (q.language_tag) parts.push_back("language_tag=" + percent_encode(*q.language_tag));
    parts.push_back("page=" + std::to_string(q.page));
    parts.push_back("page_size=" + std::to_string(q.page_size));
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "&") + p;
    return out;
}

// ---------------------------------------------------------------------------

HttpResponse CatalogueService::handle(const HttpRequest& request) {
    try {
        if (!starts_with(request.path, kApi)) throw Error(ErrorCode::NotFound, "no route " + request.path);
        std::vector<std::string> parts = split(std::string_view(request.path).substr(kApi.size()), '/');
        parts.erase(std::remove(parts.begin(), parts.end(), std::string()), parts.end());
        const bool get = request.method == "GET";
        const bool post = request.method == "POST";
        auto param = [&](const char* key) -> std::optional<std::string> {
            const auto it = request.query.find(key);
            if (it == request.query.end()) return std::nullopt;
            return it->second;
        };

        if (parts.size() == 1 && parts[0] == "node" && get) return json_response(200, node_summary());
        if (parts.size() == 1 && parts[0] == "datasets" && get) {
            return json_response(200, search(parse_search_query(request.query)));
        }
        if (parts.size() == 4 && parts[0] == "datasets" && get) return json_response(200, detail(path_ref(parts, 1)));
        if (parts.size() == 5 && parts[0] == "datasets" && parts[4] == "download" && get) {
            return download(path_ref(parts, 1), param("token"));
        }
        if (parts.size() == 5 && parts[0] == "datasets" && parts[4] == "requests" && post) {
            return create_request(path_ref(parts, 1), request.body);
        }
        if (parts.size() == 2 && parts[0] == "requests" && get) {
            return json_response(200, request_status(percent_decode(parts[1])));
        }
        throw Error(ErrorCode::NotFound, "no route " + request.method + " " + request.path);
    } catch (const Error& e) {
        return error_response(e);
    } catch (const std::exception& e) {
        return json_response(500, error_body("internal", e.what()));
    }
}

Json CatalogueService::node_summary() const {
    Json counts;
    std::size_t total = 0;
    for (auto kind : {ContentKind::Standardised, ContentKind::Language, ContentKind::Knowledge, ContentKind::Graph}) {
        const std::size_t n = repo_.list(Partition::Drep, {kind, std::nullopt}).size();
        counts[std::string(to_string(kind))] = n;
        total += n;
    }
    return Json{{"node", to_json(repo_.node())}, {"counts", counts}, {"total", total}};
}

Json CatalogueService::search(const SearchQuery& query) const {
    struct Hit {
        const RepositoryEntry* entry;
        std::size_t matches;
    };
    const auto entries = repo_.list(Partition::Drep);
    const auto needles = query.text ? tokenize(*query.text) : std::vector<std::string>{};
    std::vector<Hit> hits;
    for (const auto& e : entries) {
        const MetadataRecord& m = *e.metadata;
        if (!query.kinds.empty() && !query.kinds.count(e.ref.kind)) continue;
        if (!std::all_of(query.categories.begin(), query.categories.end(),
                         [&](const std::string& c) { return m.categories.count(c) > 0; })) {
            continue;
        }
        if (query.language_tag && !m.title.count(*query.language_tag) && !m.description.count(*query.language_tag)) {
            continue;
        }
        std::size_t matches = 0;
        if (query.text) {
            std::vector<std::string> haystack;
            for (const auto* text : {&m.title, &m.description}) {
                for (const auto& [tag, value] : *text) {
                    for (auto& t : tokenize(value)) haystack.push_back(std::move(t));
                }
            }
            for (const auto& c : m.categories) {
                for (auto& t : tokenize(c)) haystack.push_back(std::move(t));
            }
            const std::set<std::string> distinct(needles.begin(), needles.end());
            for (const auto& n : distinct) matches += matches_token(haystack, n) ? 1 : 0;
            if (matches == 0) continue;
        }
        hits.push_back({&e, matches});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.matches != b.matches) return a.matches > b.matches;
        if (a.entry->ref.local_id != b.entry->ref.local_id) return a.entry->ref.local_id < b.entry->ref.local_id;
        if (a.entry->ref.version != b.entry->ref.version) return a.entry->ref.version > b.entry->ref.version;
        return a.entry->ref < b.entry->ref;
    });

    Json results = Json::array();
    const std::size_t first = (query.page - 1) * query.page_size;
    for (std::size_t i = first; i < hits.size() && i < first + query.page_size; ++i) {
        const auto& e = *hits[i].entry;
        Json r;
        r["ref"] = to_json(e.ref);
        r["title"] = to_json(e.metadata->title);
        r["kind"] = std::string(to_string(e.ref.kind));
        r["categories"] = Json(std::vector<std::string>(e.metadata->categories.begin(), e.metadata->categories.end()));
        r["catalogue_url"] = catalogue_url(repo_.node().base_url, e.ref);
        if (query.text) r["matches"] = hits[i].matches;
        results.push_back(r);
    }
    return Json{{"page", query.page}, {"page_size", query.page_size}, {"total", hits.size()}, {"results", results}};
}

Json CatalogueService::detail(const DatasetRef& ref) const {
    const auto entry = repo_.find(ref, Partition::Drep);
    if (!entry || ref.node_id != repo_.node().node_id) throw Error(ErrorCode::NotFound, "no dataset " + ref.path());
    const PeerRegistry peers = load_peers(repo_);
    const std::string& own = repo_.node().node_id;

    auto link = [&](const DatasetRef& target, bool published) {
        Json j;
        j["ref"] = to_json(target);
        j["node_id"] = target.node_id;
        j["remote"] = target.node_id != own;
        if (!published) {
            j["catalogue_url"] = nullptr;
        } else if (target.node_id == own) {
            j["catalogue_url"] = catalogue_url(repo_.node().base_url, target);
        } else if (const auto peer = peers.get(target.node_id)) {
            j["catalogue_url"] = catalogue_url(peer->base_url, target);
        } else {
            j["catalogue_url"] = nullptr;
        }
        return j;
    };
    const MetadataRecord& m = *entry->metadata;
    Json links;
    for (const auto& [name, refs, published] :
         {std::tuple{"composed_of", &m.links.composed_of, true}, std::tuple{"uses_language", &m.links.uses_language, true},
          std::tuple{"derived_from", &m.links.derived_from, false}}) {
        Json list = Json::array();
        for (const auto& r : *refs) list.push_back(link(r, published));
        links[name] = list;
    }
    const std::string url = catalogue_url(repo_.node().base_url, entry->ref);
    return Json{{"metadata", to_json(m)},
                {"catalogue_url", url},
                {"download_url", url + "/download"},
                {"links", links}};
}

HttpResponse CatalogueService::download(const DatasetRef& ref, const std::optional<std::string>& token) {
    const auto entry = repo_.find(ref, Partition::Drep);
    if (!entry || ref.node_id != repo_.node().node_id) throw Error(ErrorCode::NotFound, "no dataset " + ref.path());
    std::string bytes = repo_.get_bytes(entry->ref, Partition::Drep);

    if (entry->metadata->download_policy == DownloadPolicy::Request) {
        bool granted = false;
        if (token && !token->empty()) {
            repo_.update_state(kRequestsFile, empty_requests(), [&](Json state) {
                for (auto& r : state["requests"]) {
                    if (r.at("status") == "approved" && r.value("token", "") == *token &&
                        !r.value("token_used", false) && ref_from_json(r.at("ref")).same_identity(entry->ref)) {
                        r["token_used"] = true;
                        granted = true;
                    }
                }
                return state;
            });
        }
        if (!granted) {
            const std::string endpoint = catalogue_url(repo_.node().base_url, entry->ref) + "/requests";
            Json body = error_body("policy", token ? "download token is invalid or already used"
                                                   : "this dataset is distributed on request");
            body["error"]["request_endpoint"] = endpoint;
            body["error"]["instructions"] =
                "POST {\"contact\": ..., \"justification\": ...} to the request endpoint; once the owner "
                "approves, GET /api/v1/requests/<request_id> returns a single-use download token";
            return json_response(403, body);
        }
    }
    HttpResponse r;
    r.content_type = std::string(media_type(entry->ref.kind));
    r.headers["X-Content-SHA256"] = entry->content_hash;
    r.headers["Content-Disposition"] = "attachment; filename=\"" + file_name(entry->ref) + "\"";
    r.body = std::move(bytes);
    return r;
}

HttpResponse CatalogueService::create_request(const DatasetRef& ref, const std::string& body) {
    const auto entry = repo_.find(ref, Partition::Drep);
    if (!entry || ref.node_id != repo_.node().node_id) throw Error(ErrorCode::NotFound, "no dataset " + ref.path());
    if (entry->metadata->download_policy != DownloadPolicy::Request) {
        throw Error(ErrorCode::Conflict, ref.path() + " is downloadable without a request");
    }
    const Json json = parse_json(body, "access request");
    auto field = [&](const char* key) {
        if (!json.is_object() || !json.contains(key) || !json.at(key).is_string() ||
            json.at(key).get<std::string>().empty()) {
            throw Error(ErrorCode::InvalidArgument, std::string(key) + ": required non-empty string");
        }
        return json.at(key).get<std::string>();
    };
    Json request;
    request["request_id"] = "req-" + random_hex(8);
    request["ref"] = to_json(entry->ref);
    request["contact"] = field("contact");
    request["justification"] = field("justification");
    request["status"] = std::string(to_string(RequestStatus::Pending));
    request["created_at"] = format_timestamp(now_utc());
    repo_.update_state(kRequestsFile, empty_requests(), [&](Json state) {
        state["requests"].push_back(request);
        return state;
    });
    return json_response(201, Json{{"request", request_view(request, false)}});
}

Json CatalogueService::request_status(const std::string& request_id) const {
    const Json state = repo_.load_state(kRequestsFile, empty_requests());
    for (const auto& r : state.at("requests")) {
        if (r.at("request_id") == request_id) return Json{{"request", request_view(r, true)}};
    }
    throw Error(ErrorCode::NotFound, "no request '" + request_id + "'");
}

Json CatalogueService::list_requests() const {
    const Json state = repo_.load_state(kRequestsFile, empty_requests());
    Json out = Json::array();
    for (const auto& r : state.at("requests")) out.push_back(request_view(r, false));
    return out;
}

Json CatalogueService::approve(const std::string& request_id) { return decide(request_id, RequestStatus::Approved); }
Json CatalogueService::deny(const std::string& request_id) { return decide(request_id, RequestStatus::Denied); }

Json CatalogueService::decide(const std::string& request_id, RequestStatus decision) {
    Json result;
    repo_.update_state(kRequestsFile, empty_requests(), [&](Json state) {
        for (auto& r : state["requests"]) {
            if (r.at("request_id") != request_id) continue;
            if (r.at("status") != "pending") {
                throw Error(ErrorCode::Conflict,
                            "request " + request_id + " is already " + r.at("status").get<std::string>());
            }
            r["status"] = std::string(to_string(decision));
            r["decided_at"] = format_timestamp(now_utc());
            if (decision == RequestStatus::Approved) {
                r["token"] = random_hex(16);
                r["token_used"] = false;
            }
            result = request_view(r, true);
            return state;
        }
        throw Error(ErrorCode::NotFound, "no request '" + request_id + "'");
    });
    return result;
}

// ---------------------------------------------------------------------------
// HTTP adapter
// ---------------------------------------------------------------------------

struct CatalogueServer::Impl {
    CatalogueService& service;
    httplib::Server server;
    std::thread thread;
    std::mutex mutex;
    std::condition_variable stopped_cv;
    bool stopped = false;

    explicit Impl(CatalogueService& s) : service(s) {
        auto route = [this](const httplib::Request& req, httplib::Response& res) {
            HttpRequest request;
            request.method = req.method;
            request.path = req.path;
            for (const auto& [k, v] : req.params) request.query.emplace(k, v);
            request.body = req.body;
            HttpResponse response = service.handle(request);
            res.status = response.status;
            for (const auto& [k, v] : response.headers) res.set_header(k, v);
            res.set_content(std::move(response.body), response.content_type);
        };
        server.Get(".*", route);
        server.Post(".*", route);
    }
};

CatalogueServer::CatalogueServer(CatalogueService& service) : impl_(std::make_unique<Impl>(service)) {}

CatalogueServer::~CatalogueServer() { stop(); }

int CatalogueServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void CatalogueServer::stop() {
    std::lock_guard lock(impl_->mutex);
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
    impl_->stopped = true;
    impl_->stopped_cv.notify_all();
}

void CatalogueServer::wait() {
    std::unique_lock lock(impl_->mutex);
    impl_->stopped_cv.wait(lock, [this] { return impl_->stopped || !impl_->thread.joinable(); });
}

}  // namespace livedata
