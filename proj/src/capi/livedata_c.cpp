#include "livedata/livedata.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>

#include "httplib.h"
#include "livedata/error.hpp"
#include "livedata/node.hpp"

using namespace livedata;

struct ld_node {
    std::unique_ptr<Node> node;
    std::unique_ptr<CatalogueServer> server;
};

namespace {

thread_local std::string last_error;

ld_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation: return LD_ERR_VALIDATION;
        case ErrorCode::Parse: return LD_ERR_PARSE;
        case ErrorCode::InvalidArgument: return LD_ERR_INVALID_ARGUMENT;
        case ErrorCode::NotFound: return LD_ERR_NOT_FOUND;
        case ErrorCode::Conflict: return LD_ERR_CONFLICT;
        case ErrorCode::Policy: return LD_ERR_POLICY;
        case ErrorCode::UnknownPeer: return LD_ERR_UNKNOWN_PEER;
        case ErrorCode::Integrity: return LD_ERR_INTEGRITY;
        case ErrorCode::Transient: return LD_ERR_TRANSIENT;
        case ErrorCode::Io: return LD_ERR_IO;
        case ErrorCode::Internal: return LD_ERR_INTERNAL;
    }
    return LD_ERR_INTERNAL;
}

/// Runs `body`, translating exceptions into a status and the thread's last
/// error message.
template <typename F>
ld_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return LD_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        last_error = e.what();
        return LD_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return LD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return LD_ERR_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

char* copy_out(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

void emit(char** out, const Json& json) {
    require(out, "output pointer");
    *out = copy_out(json.dump(2));
}

Node& node_of(ld_node* handle) {
    require(handle, "node");
    return *handle->node;
}

Json entry_json(const RepositoryEntry& e) {
    Json j;
    j["partition"] = std::string(to_string(e.partition));
    j["ref"] = to_json(e.ref);
    j["path"] = e.ref.path();
    if (e.srep_section) j["section"] = std::string(to_string(*e.srep_section));
    j["stored_at"] = format_timestamp(e.stored_at);
    j["content_hash"] = e.content_hash;
    j["file"] = e.file;
    if (!e.provenance.empty()) j["provenance"] = e.provenance;
    Json derived = Json::array();
    for (const auto& r : e.derived_from) derived.push_back(to_json(r));
    j["derived_from"] = derived;
    if (e.metadata) j["metadata"] = to_json(*e.metadata);
    return j;
}

DescriptiveFields fields_from_json(const char* text) {
    DescriptiveFields fields;
    if (text == nullptr) return fields;
    const Json j = parse_json(text, "descriptive fields");
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "descriptive fields must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "title") {
            fields.title = text_from_json(value);
        } else if (key == "description") {
            fields.description = text_from_json(value);
        } else if (key == "categories") {
            fields.categories = value.get<std::set<std::string>>();
        } else if (key == "license") {
            fields.license = value.get<std::string>();
        } else {
            throw Error(ErrorCode::InvalidArgument, "descriptive fields: unknown key '" + key + "'");
        }
    }
    return fields;
}

DownloadPolicy policy_of(const char* text) {
    return text == nullptr ? DownloadPolicy::Automatic : parse_download_policy(text);
}

DatasetRef any_ref(Node& node, const char* text) {
    require(text, "ref");
    return parse_ref_path(text, node.descriptor().node_id);
}

}  // namespace

extern "C" {

const char* ld_last_error(void) { return last_error.c_str(); }

const char* ld_status_name(ld_status status) {
    switch (status) {
        case LD_OK: return "ok";
        case LD_ERR_VALIDATION: return "validation";
        case LD_ERR_PARSE: return "parse";
        case LD_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case LD_ERR_NOT_FOUND: return "not_found";
        case LD_ERR_CONFLICT: return "conflict";
        case LD_ERR_POLICY: return "policy";
        case LD_ERR_UNKNOWN_PEER: return "unknown_peer";
        case LD_ERR_INTEGRITY: return "integrity";
        case LD_ERR_TRANSIENT: return "transient";
        case LD_ERR_IO: return "io";
        case LD_ERR_INTERNAL: return "internal";
    }
    return "internal";
}

const char* ld_version(void) { return "0.1.0"; }

void ld_string_free(char* text) { std::free(text); }

ld_status ld_node_init(const char* root, const char* descriptor_json, ld_node** out) {
    return guarded([&] {
        require(root, "root");
        require(descriptor_json, "descriptor");
        require(out, "output pointer");
        *out = nullptr;
        const NodeDescriptor descriptor = node_from_json(parse_json(descriptor_json, "node descriptor"));
        auto handle = std::make_unique<ld_node>();
        handle->node = Node::init(root, descriptor);
        *out = handle.release();
    });
}

ld_status ld_node_open(const char* root, ld_node** out) {
    return guarded([&] {
        require(root, "root");
        require(out, "output pointer");
        *out = nullptr;
        auto handle = std::make_unique<ld_node>();
        handle->node = Node::open(root);
        *out = handle.release();
    });
}

void ld_node_close(ld_node* node) {
    if (node == nullptr) return;
    if (node->server) node->server->stop();
    delete node;
}

ld_status ld_node_descriptor(ld_node* node, char** out_json) {
    return guarded([&] { emit(out_json, to_json(node_of(node).descriptor())); });
}

ld_status ld_collect(ld_node* node, const char* bytes, size_t length, const char* section, const char* local_id,
                     unsigned version, const char* provenance, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(bytes, "bytes");
        require(local_id, "local_id");
        const ContentKind kind = section == nullptr ? ContentKind::LowQuality : parse_content_kind(section);
        if (!is_source(kind)) {
            throw Error(ErrorCode::InvalidArgument, "'" + std::string(section) + "' is not an SREP section");
        }
        emit(out_json, entry_json(n.collect(std::string_view(bytes, length), kind, local_id, version,
                                            provenance == nullptr ? "" : provenance)));
    });
}

ld_status ld_transform(ld_node* node, const char* sources_json, const char* config_json, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(sources_json, "sources");
        require(config_json, "config");
        std::vector<DatasetRef> sources;
        const Json list = parse_json(sources_json, "source list");
        if (!list.is_array()) throw Error(ErrorCode::InvalidArgument, "sources must be a JSON array of refs");
        for (const auto& item : list) sources.push_back(n.resolve_ref(item.get<std::string>(), Partition::Srep));
        const TransformResult result = n.transform(sources, config_from_json(parse_json(config_json, "config")));
        Json entries = Json::array();
        for (const auto& e : result.entries) entries.push_back(entry_json(e));
        emit(out_json, entries);
    });
}

ld_status ld_distribute(ld_node* node, const char* ref, const char* fields_json, const char* policy,
                        char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(ref, "ref");
        const Promotion p = n.distribute(n.resolve_ref(ref, Partition::Crep), fields_from_json(fields_json),
                                         policy_of(policy));
        emit(out_json, Json{{"entry", entry_json(p.entry)}, {"warnings", p.warnings}});
    });
}

ld_status ld_list(ld_node* node, const char* partition, const char* kind, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(partition, "partition");
        ListFilter filter;
        if (kind != nullptr) filter.kind = parse_content_kind(kind);
        Json entries = Json::array();
        for (const auto& e : n.repository().list(parse_partition(partition), filter)) entries.push_back(entry_json(e));
        emit(out_json, entries);
    });
}

ld_status ld_check(ld_node* node, char** out_json) {
    return guarded([&] {
        Json violations = Json::array();
        for (const auto& v : node_of(node).repository().integrity_check()) {
            violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
        }
        emit(out_json, violations);
    });
}

ld_status ld_catalogue_request(ld_node* node, const char* method, const char* path, const char* body,
                               size_t body_length, int* out_status, char** out_body, size_t* out_length) {
    return guarded([&] {
        Node& n = node_of(node);
        require(method, "method");
        require(path, "path");
        require(out_status, "status pointer");
        require(out_body, "output pointer");
        HttpRequest request;
        request.method = method;
        if (request.method != "GET" && request.method != "POST") {
            throw Error(ErrorCode::InvalidArgument, "method must be GET or POST");
        }
        if (body != nullptr) request.body.assign(body, body_length);
        const std::string target(path);
        const auto q = target.find('?');
        request.path = target.substr(0, q);
        if (q != std::string::npos) {
            httplib::Params params;
            httplib::detail::parse_query_text(target.substr(q + 1), params);
            for (const auto& [k, v] : params) request.query.emplace(k, v);
        }
        const HttpResponse response = n.catalogue().handle(request);
        *out_status = response.status;
        *out_body = copy_out(response.body);
        if (out_length != nullptr) *out_length = response.body.size();
    });
}

ld_status ld_catalogue_get(ld_node* node, const char* path, int* out_status, char** out_body) {
    return ld_catalogue_request(node, "GET", path, nullptr, 0, out_status, out_body, nullptr);
}

ld_status ld_search_peer(ld_node* node, const char* peer_id, const char* query, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(peer_id, "peer id");
        httplib::Params params;
        if (query != nullptr) httplib::detail::parse_query_text(query, params);
        const SearchQuery q = parse_search_query({params.begin(), params.end()});
        emit(out_json, n.federation().search_peer(peer_id, q));
    });
}

ld_status ld_fetch(ld_node* node, const char* ref, const char* token, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        const auto fetched = n.federation().fetch_remote_dataset(
            any_ref(n, ref), token == nullptr ? std::nullopt : std::optional<std::string>(token));
        Json j{{"ref", to_json(fetched.ref)}, {"content_hash", fetched.metadata.content_hash}};
        j["stored"] = fetched.stored ? entry_json(*fetched.stored) : Json(nullptr);
        emit(out_json, j);
    });
}

ld_status ld_cross_compose(ld_node* node, const char* standardised, const char* knowledge, const char* language,
                           const char* fields_json, const char* policy, const char* graph_local_id,
                           char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        const auto result = n.federation().cross_node_compose(
            n.resolve_ref(standardised == nullptr ? "" : standardised, Partition::Crep), any_ref(n, knowledge),
            any_ref(n, language), fields_from_json(fields_json), policy_of(policy),
            graph_local_id == nullptr ? std::nullopt : std::optional<std::string>(graph_local_id));
        emit(out_json, entry_json(result.entry));
    });
}

ld_status ld_peer_add(ld_node* node, const char* descriptor_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(descriptor_json, "descriptor");
        n.federation().add_peer(node_from_json(parse_json(descriptor_json, "peer descriptor")));
    });
}

ld_status ld_peer_remove(ld_node* node, const char* node_id) {
    return guarded([&] {
        require(node_id, "node id");
        node_of(node).federation().remove_peer(node_id);
    });
}

ld_status ld_peer_list(ld_node* node, char** out_json) {
    return guarded([&] {
        Json peers = Json::array();
        for (const auto& p : node_of(node).federation().peers()) peers.push_back(to_json(p));
        emit(out_json, peers);
    });
}

ld_status ld_request_list(ld_node* node, char** out_json) {
    return guarded([&] { emit(out_json, node_of(node).catalogue().list_requests()); });
}

ld_status ld_request_decide(ld_node* node, const char* request_id, int approve, char** out_json) {
    return guarded([&] {
        Node& n = node_of(node);
        require(request_id, "request id");
        emit(out_json, approve != 0 ? n.catalogue().approve(request_id) : n.catalogue().deny(request_id));
    });
}

ld_status ld_serve_start(ld_node* node, const char* host, int port, int* out_port) {
    return guarded([&] {
        Node& n = node_of(node);
        if (node->server) throw Error(ErrorCode::Conflict, "the catalogue is already being served");
        auto server = std::make_unique<CatalogueServer>(n.catalogue());
        const int bound = server->start(host == nullptr ? "127.0.0.1" : host, port);
        node->server = std::move(server);
        if (out_port != nullptr) *out_port = bound;
    });
}

ld_status ld_serve_stop(ld_node* node) {
    return guarded([&] {
        require(node, "node");
        if (!node->server) throw Error(ErrorCode::Conflict, "the catalogue is not being served");
        node->server->stop();
        node->server.reset();
    });
}

}  // extern "C"
