#include "livedata/federation.hpp"

#include <algorithm>

#include "httplib.h"
#include "livedata/error.hpp"

namespace livedata {

namespace {

std::multimap<std::string, std::string> parse_query(std::string_view text) {
    std::multimap<std::string, std::string> out;
    for (const auto& pair : split(text, '&')) {
        if (pair.empty()) continue;
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            out.emplace(percent_decode(pair), "");
        } else {
            out.emplace(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
        }
    }
    return out;
}

std::string remote_error(const TransportResponse& response) {
    try {
        const Json body = parse_json(response.body, "peer response");
        return body.at("error").at("message").get<std::string>();
    } catch (const std::exception&) {
        return "HTTP " + std::to_string(response.status);
    }
}

std::string base_of(const std::string& local_id) {
    if (local_id.size() > 2 && local_id.compare(local_id.size() - 2, 2, "-s") == 0) {
        return local_id.substr(0, local_id.size() - 2);
    }
    return local_id;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

void InProcessTransport::attach(std::string base_url, CatalogueService* service) {
    std::lock_guard lock(mutex_);
    services_[std::move(base_url)] = service;
}

void InProcessTransport::detach(const std::string& base_url) {
    std::lock_guard lock(mutex_);
    services_.erase(base_url);
}

TransportResponse InProcessTransport::get(const std::string& url) {
    CatalogueService* service = nullptr;
    std::string rest;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        std::size_t best = 0;
        for (const auto& [base, s] : services_) {
            if (base.size() > best && starts_with(url, base) &&
                (url.size() == base.size() || url[base.size()] == '/' || url[base.size()] == '?')) {
                service = s;
                best = base.size();
                rest = url.substr(base.size());
            }
        }
    }
    if (service == nullptr) throw Error(ErrorCode::Transient, "no route to " + url);
    HttpRequest request;
    const auto q = rest.find('?');
    request.path = rest.substr(0, q);
    if (q != std::string::npos) request.query = parse_query(std::string_view(rest).substr(q + 1));
    HttpResponse response = service->handle(request);
    TransportResponse out;
    out.status = response.status;
    out.body = std::move(response.body);
    out.headers = std::move(response.headers);
    out.headers["Content-Type"] = response.content_type;
    return out;
}

TransportResponse HttpTransport::get(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (!starts_with(url, scheme)) throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme in " + url);
    const auto slash = url.find('/', scheme.size());
    const std::string origin = url.substr(0, slash);
    const std::string target = slash == std::string::npos ? "/" : url.substr(slash);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    const auto result = client.Get(target);
    if (!result) {
        throw Error(ErrorCode::Transient, "peer unreachable at " + origin + ": " + httplib::to_string(result.error()));
    }
    TransportResponse out;
    out.status = result->status;
    out.body = result->body;
    for (const auto& [k, v] : result->headers) out.headers[k] = v;
    return out;
}

// ---------------------------------------------------------------------------
// Federation
// ---------------------------------------------------------------------------

Federation::Federation(Repository& repo, Transport& transport, Clock clock, std::chrono::seconds ttl)
    : repo_(repo), transport_(transport), clock_(std::move(clock)), ttl_(ttl) {}

ContentKind Federation::section_for(ContentKind kind) noexcept {
    switch (kind) {
        case ContentKind::Language: return ContentKind::ExternalLanguage;
        case ContentKind::Knowledge: return ContentKind::ExternalReference;
        default: return ContentKind::LowQuality;
    }
}

void Federation::add_peer(const NodeDescriptor& peer) {
    repo_.update_state(kPeersFile, Json{{"peers", Json::array()}}, [&](Json state) {
        PeerRegistry registry = PeerRegistry::from_json(repo_.node().node_id, state);
        registry.add(peer);
        return registry.to_json();
    });
}

void Federation::remove_peer(const std::string& node_id) {
    repo_.update_state(kPeersFile, Json{{"peers", Json::array()}}, [&](Json state) {
        PeerRegistry registry = PeerRegistry::from_json(repo_.node().node_id, state);
        registry.remove(node_id);
        return registry.to_json();
    });
    std::lock_guard lock(mutex_);
    std::erase_if(cache_, [&](const auto& item) { return starts_with(item.first, node_id + "/"); });
}

std::vector<NodeDescriptor> Federation::peers() const { return load_peers(repo_).list(); }

std::optional<NodeDescriptor> Federation::peer(const std::string& node_id) const {
    return load_peers(repo_).get(node_id);
}

NodeDescriptor Federation::require_peer(const std::string& node_id) const {
    auto p = peer(node_id);
    if (!p) throw Error(ErrorCode::UnknownPeer, "node '" + node_id + "' is not a registered peer");
    return *p;
}

MetadataRecord Federation::resolve_link(const DatasetRef& ref) {
    if (ref.node_id == repo_.node().node_id) {
        const auto entry = repo_.find(ref, Partition::Drep);
        if (!entry) throw Error(ErrorCode::NotFound, "no distributed dataset " + ref.path());
        return *entry->metadata;
    }
    const NodeDescriptor p = require_peer(ref.node_id);
    const std::string key = ref.path();
    {
        std::lock_guard lock(mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end() && clock_() - it->second.cached_at < ttl_) return it->second.record;
    }
    const TransportResponse response = transport_.get(catalogue_url(p.base_url, ref));
    if (response.status == 404) {
        throw Error(ErrorCode::NotFound, "peer " + p.node_id + " has no dataset " + ref.path());
    }
    if (response.status != 200) {
        throw Error(ErrorCode::Transient, "peer " + p.node_id + " answered: " + remote_error(response));
    }
    MetadataRecord record;
    try {
        record = metadata_from_json(parse_json(response.body, "peer detail").at("metadata"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("peer detail: ") + e.what());
    }
    require_valid(validate(record), "metadata from peer " + p.node_id);
    if (!record.ref.same_identity(ref)) {
        throw Error(ErrorCode::Integrity, "peer " + p.node_id + " answered for " + record.ref.path());
    }
    std::lock_guard lock(mutex_);
    cache_[key] = {record, clock_()};
    return record;
}

FetchedDataset Federation::fetch_remote_dataset(const DatasetRef& ref, const std::optional<std::string>& token,
                                                bool store) {
    if (ref.node_id == repo_.node().node_id) {
        throw Error(ErrorCode::InvalidArgument, ref.path() + " is local; nothing to fetch");
    }
    const NodeDescriptor p = require_peer(ref.node_id);
    FetchedDataset out;
    out.metadata = resolve_link(ref);
    out.ref = out.metadata.ref;
    const std::string url = catalogue_url(p.base_url, out.ref);
    if (out.metadata.download_policy == DownloadPolicy::Request && !token) {
        throw Error(ErrorCode::Policy, out.ref.path() + " is distributed on request: POST a request to " + url +
                                           "/requests and fetch again with the issued token");
    }
    const TransportResponse response =
        transport_.get(url + "/download" + (token ? "?token=" + percent_encode(*token) : std::string()));
    if (response.status == 403) {
        throw Error(ErrorCode::Policy, "peer " + p.node_id + " refused the download: " + remote_error(response) +
                                           " (request endpoint " + url + "/requests)");
    }
    if (response.status == 404) throw Error(ErrorCode::NotFound, "peer " + p.node_id + " has no " + out.ref.path());
    if (response.status != 200) {
        throw Error(ErrorCode::Transient, "peer " + p.node_id + " answered: " + remote_error(response));
    }
    if (sha256_hex(response.body) != out.metadata.content_hash) {
        throw Error(ErrorCode::Integrity,
                    "bytes of " + out.ref.path() + " do not hash to the advertised content_hash; discarded");
    }
    out.bytes = response.body;
    if (store) {
        const ContentKind section = section_for(out.ref.kind);
        const DatasetRef srep_ref{out.ref.node_id, out.ref.local_id, out.ref.version, section};
        const auto existing = repo_.find(srep_ref, Partition::Srep);
        if (existing && existing->content_hash == out.metadata.content_hash) {
            out.stored = existing;
        } else {
            out.stored = repo_.ingest_source(out.bytes, srep_ref, section,
                                             "fetched from " + catalogue_url(p.base_url, out.ref));
        }
    }
    return out;
}

Json Federation::search_peer(const std::string& node_id, const SearchQuery& query) {
    const NodeDescriptor p = require_peer(node_id);
    const TransportResponse response = transport_.get(p.base_url + "/api/v1/datasets?" + to_query_string(query));
    if (response.status == 400) throw Error(ErrorCode::InvalidArgument, remote_error(response));
    if (response.status != 200) {
        throw Error(ErrorCode::Transient, "peer " + node_id + " answered: " + remote_error(response));
    }
    return parse_json(response.body, "peer search");
}

std::string Federation::fetched_bytes(const DatasetRef& ref) {
    if (ref.node_id == repo_.node().node_id) return repo_.get_bytes(ref, Partition::Crep);
    require_peer(ref.node_id);
    const DatasetRef srep_ref{ref.node_id, ref.local_id, ref.version, section_for(ref.kind)};
    if (repo_.find(srep_ref, Partition::Srep)) return repo_.get_bytes(srep_ref, Partition::Srep);
    return fetch_remote_dataset(ref).bytes;
}

CrossComposition Federation::cross_node_compose(const DatasetRef& standardised, const DatasetRef& knowledge,
                                                const DatasetRef& language, const DescriptiveFields& fields,
                                                DownloadPolicy policy, std::optional<std::string> graph_local_id) {
    const NodeDescriptor& node = repo_.node();
    if (standardised.node_id != node.node_id) {
        throw Error(ErrorCode::InvalidArgument, "the standardised input must be local: " + standardised.path());
    }
    const auto s_entry = repo_.find(standardised, Partition::Crep);
    if (!s_entry || s_entry->ref.kind != ContentKind::Standardised) {
        throw Error(ErrorCode::NotFound, "CREP has no standardised dataset " + standardised.path());
    }
    const StandardisedDataset s = parse_standardised(repo_.get_bytes(s_entry->ref, Partition::Crep));

    DatasetRef k_ref = knowledge;
    k_ref.kind = ContentKind::Knowledge;
    DatasetRef l_ref = language;
    l_ref.kind = ContentKind::Language;
    const KnowledgeDataset k = parse_knowledge(fetched_bytes(k_ref));
    if (!k.ref.same_identity(k_ref)) {
        throw Error(ErrorCode::Integrity, "fetched knowledge describes " + k.ref.path() + ", not " + k_ref.path());
    }
    const LanguageDataset l = parse_language(fetched_bytes(l_ref), l_ref);
    const bool listed = std::any_of(k.language_refs.begin(), k.language_refs.end(),
                                    [&](const DatasetRef& r) { return r.same_identity(l_ref); });
    if (!listed) {
        throw Error(ErrorCode::Validation, "knowledge " + k_ref.path() + " does not use language " + l_ref.path());
    }

    DatasetRef g_ref{node.node_id,
                     graph_local_id.value_or(base_of(s.ref.local_id) + "-g-" + k_ref.node_id),
                     s.ref.version, ContentKind::Graph};
    require_valid(validate(g_ref), "graph ref");

    CrossComposition out;
    out.graph = compose_graph(s, l, k, node, g_ref);

    std::vector<DatasetRef> derived = s_entry->derived_from;
    for (const auto& r : {k_ref, l_ref}) {
        if (r.node_id != node.node_id) derived.push_back({r.node_id, r.local_id, r.version, section_for(r.kind)});
    }
    out.entry = repo_.store_core(out.graph, serialize_graph(out.graph), derived);
    out.metadata = generate_metadata(out.graph, node, policy, fields, derived, clock_());
    return out;
}

}  // namespace livedata
