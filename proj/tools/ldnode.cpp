// Command-line administration of a LiveData node. Talks to the node only
// through the C API.

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "livedata/livedata.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Thrown after a C API failure; carries the status for the exit message.
struct ApiFailure {
    ld_status status;
    std::string message;
};

void check(ld_status status) {
    if (status != LD_OK) throw ApiFailure{status, ld_last_error()};
}

/// Takes ownership of a string returned by the C API.
std::string take(char* text) {
    std::string out = text == nullptr ? "" : text;
    ld_string_free(text);
    return out;
}

std::string read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ApiFailure{LD_ERR_IO, "cannot read " + path};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string root_or_env(const std::string& root) {
    if (!root.empty()) return root;
    if (const char* env = std::getenv("LIVEDATA_ROOT"); env != nullptr && *env != '\0') return env;
    throw ApiFailure{LD_ERR_INVALID_ARGUMENT, "no repository: pass --root or set LIVEDATA_ROOT"};
}

class NodeHandle {
  public:
    explicit NodeHandle(const std::string& root) { check(ld_node_open(root.c_str(), &node_)); }
    NodeHandle(const std::string& root, const std::string& descriptor) {
        check(ld_node_init(root.c_str(), descriptor.c_str(), &node_));
    }
    ~NodeHandle() { ld_node_close(node_); }
    NodeHandle(const NodeHandle&) = delete;
    NodeHandle& operator=(const NodeHandle&) = delete;
    ld_node* get() const noexcept { return node_; }

  private:
    ld_node* node_ = nullptr;
};

/// "en=Some title" pairs to a language map.
Json text_map(const std::vector<std::string>& pairs, const char* option) {
    Json out = Json::object();
    for (const auto& p : pairs) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ApiFailure{LD_ERR_INVALID_ARGUMENT, std::string(option) + " expects TAG=TEXT, got '" + p + "'"};
        }
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

struct Describe {
    std::vector<std::string> title;
    std::vector<std::string> description;
    std::vector<std::string> categories;
    std::string license;
    std::string policy = "automatic";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--title", title, "Title as TAG=TEXT; repeat per language")->required();
        cmd->add_option("--description", description, "Description as TAG=TEXT; repeat per language");
        cmd->add_option("--category", categories, "Category slug; repeatable");
        cmd->add_option("--license", license, "License identifier (default CC-BY-4.0)");
        cmd->add_option("--policy", policy, "Download policy")->check(CLI::IsMember({"automatic", "request"}));
    }
    std::string fields() const {
        Json j;
        j["title"] = text_map(title, "--title");
        if (!description.empty()) j["description"] = text_map(description, "--description");
        j["categories"] = categories;
        if (!license.empty()) j["license"] = license;
        return j.dump();
    }
};

std::string encode(const std::string& value) { return httplib::detail::encode_query_param(value); }

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (const auto& item : items) out += (out.empty() ? "" : sep) + item;
    return out;
}

void print_entry(const Json& e) {
    std::cout << e.at("partition").get<std::string>() << "  " << e.at("ref").at("kind").get<std::string>() << "  "
              << e.at("path").get<std::string>() << "  " << e.at("content_hash").get<std::string>() << "\n";
}

std::string title_of(const Json& title) {
    if (title.contains("en")) return title.at("en");
    return title.empty() ? "" : title.begin().value().get<std::string>();
}

/// Runs a catalogue API call in-process; error responses become ApiFailure.
std::string catalogue(ld_node* node, const char* method, const std::string& path, const std::string& body = {}) {
    int status = 0;
    char* out = nullptr;
    std::size_t length = 0;
    check(ld_catalogue_request(node, method, path.c_str(), body.empty() ? nullptr : body.data(), body.size(),
                               &status, &out, &length));
    std::string text(out, length);
    ld_string_free(out);
    if (status < 400) return text;
    const Json error = Json::parse(text, nullptr, false);
    std::string code = "internal", message = text;
    if (error.is_object() && error.contains("error")) {
        code = error["error"].value("code", code);
        message = error["error"].value("message", message);
        if (error["error"].contains("request_endpoint")) {
            message += "; file a request with: ldnode request file <ref> --contact ... --justification ...";
        }
    }
    for (int s = LD_ERR_VALIDATION; s <= LD_ERR_INTERNAL; ++s) {
        if (code == ld_status_name(static_cast<ld_status>(s))) throw ApiFailure{static_cast<ld_status>(s), message};
    }
    throw ApiFailure{LD_ERR_INTERNAL, message};
}

std::string own_node_id(ld_node* node) {
    char* desc = nullptr;
    check(ld_node_descriptor(node, &desc));
    return Json::parse(take(desc)).at("node_id");
}

/// Accepts local/version for this node's datasets as well as node/local/version.
std::string qualified(ld_node* node, const std::string& ref) {
    return std::count(ref.begin(), ref.end(), '/') == 1 ? own_node_id(node) + "/" + ref : ref;
}

std::string ref_path(const Json& ref) {
    return ref.at("node_id").get<std::string>() + "/" + ref.at("local_id").get<std::string>() + "/" +
           std::to_string(ref.at("version").get<unsigned>());
}

void print_search(const Json& page) {
    for (const auto& r : page.at("results")) {
        std::cout << ref_path(r.at("ref")) << "  " << r.at("kind").get<std::string>() << "  " << title_of(r.at("title")) << "\n";
    }
    std::cout << page.at("total").get<std::size_t>() << " result(s), page " << page.at("page").get<std::size_t>()
              << "\n";
}


int wait_for_signal() {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    int received = 0;
    sigwait(&signals, &received);
    return received;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Administer a LiveData node: collect, transform, distribute and federate datasets."};
    app.require_subcommand(1);
    std::string root;
    bool json_output = false;
    app.add_option("--root", root, "Repository directory (default: $LIVEDATA_ROOT)");
    app.add_flag("--json", json_output, "Print machine-readable JSON");

    std::function<int()> action;
    auto with_node = [&](auto body) {
        return [&, body] {
            NodeHandle node(root_or_env(root));
            return body(node.get());
        };
    };
    auto print_json = [&](const std::string& text) { std::cout << text << "\n"; };

    // init
    std::string descriptor_file;
    auto* init = app.add_subcommand("init", "Create a repository for a new node");
    init->add_option("--descriptor", descriptor_file, "Node descriptor JSON file")->required();
    init->callback([&] {
        action = [&] {
            NodeHandle node(root_or_env(root), read_input(descriptor_file));
            char* out = nullptr;
            check(ld_node_descriptor(node.get(), &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                std::cout << "initialised node " << Json::parse(text).at("node_id").get<std::string>() << " in "
                          << root_or_env(root) << "\n";
            }
            return 0;
        };
    });

    // info
    auto* info = app.add_subcommand("info", "Show the node descriptor and catalogue counts");
    info->callback([&] {
        action = with_node([&](ld_node* node) {
            int status = 0;
            char* body = nullptr;
            check(ld_catalogue_get(node, "/api/v1/node", &status, &body));
            const std::string text = take(body);
            if (json_output) {
                print_json(text);
                return 0;
            }
            const Json j = Json::parse(text);
            std::cout << j.at("node").at("node_id").get<std::string>() << "  "
                      << j.at("node").at("name").get<std::string>() << "\n"
                      << "base_url  " << j.at("node").at("base_url").get<std::string>() << "\n";
            for (const auto& [kind, n] : j.at("counts").items()) std::cout << kind << "  " << n << "\n";
            return 0;
        });
    });

    // collect
    std::string collect_file, collect_id, collect_section = "low_quality", collect_provenance;
    unsigned collect_version = 1;
    auto* collect = app.add_subcommand("collect", "Store a raw file in SREP");
    collect->add_option("file", collect_file, "File to collect")->required();
    collect->add_option("--local-id", collect_id, "Local id of the source")->required();
    collect->add_option("--version", collect_version, "Version")->check(CLI::PositiveNumber);
    collect->add_option("--section", collect_section, "SREP section")
        ->check(CLI::IsMember({"low_quality", "external_language", "external_reference"}));
    collect->add_option("--provenance", collect_provenance, "Where the data came from");
    collect->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string bytes = read_input(collect_file);
            const std::string provenance = collect_provenance.empty() ? collect_file : collect_provenance;
            char* out = nullptr;
            check(ld_collect(node, bytes.data(), bytes.size(), collect_section.c_str(), collect_id.c_str(),
                             collect_version, provenance.c_str(), &out));
            const std::string text = take(out);
            json_output ? print_json(text) : print_entry(Json::parse(text));
            return 0;
        });
    });

    // transform
    std::string config_file;
    std::vector<std::string> transform_sources;
    auto* transform = app.add_subcommand("transform", "Run the pipeline over SREP sources; prints S, L, K, G");
    transform->add_option("--config", config_file, "Transformation config JSON file")->required();
    transform->add_option("sources", transform_sources, "SREP refs (local/version or node/local/version)")
        ->required();
    transform->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string config = read_input(config_file);
            const std::string sources = Json(transform_sources).dump();
            char* out = nullptr;
            check(ld_transform(node, sources.c_str(), config.c_str(), &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                for (const auto& e : Json::parse(text)) print_entry(e);
            }
            return 0;
        });
    });

    // distribute
    std::string distribute_ref;
    Describe distribute_fields;
    auto* distribute = app.add_subcommand("distribute", "Generate metadata and promote a CREP dataset to DREP");
    distribute->add_option("ref", distribute_ref, "CREP ref")->required();
    distribute_fields.add_to(distribute);
    distribute->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string fields = distribute_fields.fields();
            char* out = nullptr;
            check(ld_distribute(node, distribute_ref.c_str(), fields.c_str(), distribute_fields.policy.c_str(),
                                &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
                return 0;
            }
            const Json j = Json::parse(text);
            print_entry(j.at("entry"));
            for (const auto& w : j.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << "\n";
            return 0;
        });
    });

    // list
    std::string list_partition = "crep", list_kind;
    auto* list = app.add_subcommand("list", "List repository entries");
    list->add_option("--partition", list_partition, "srep, crep or drep")
        ->check(CLI::IsMember({"srep", "crep", "drep"}));
    list->add_option("--kind", list_kind, "Only this content kind");
    list->callback([&] {
        action = with_node([&](ld_node* node) {
            char* out = nullptr;
            check(ld_list(node, list_partition.c_str(), list_kind.empty() ? nullptr : list_kind.c_str(), &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                for (const auto& e : Json::parse(text)) print_entry(e);
            }
            return 0;
        });
    });

    // check
    auto* check_cmd = app.add_subcommand("check", "Verify stored hashes and partition invariants");
    check_cmd->callback([&] {
        action = with_node([&](ld_node* node) {
            char* out = nullptr;
            check(ld_check(node, &out));
            const std::string text = take(out);
            const Json violations = Json::parse(text);
            if (json_output) {
                print_json(text);
            } else {
                for (const auto& v : violations) {
                    std::cout << v.at("rule").get<std::string>() << ": " << v.at("detail").get<std::string>()
                              << "\n";
                }
                if (violations.empty()) std::cout << "repository is consistent\n";
            }
            return violations.empty() ? 0 : kExitFailure;
        });
    });

    // show
    std::string show_ref;
    auto* show = app.add_subcommand("show", "Show the catalogue detail of a distributed dataset");
    show->add_option("ref", show_ref, "DREP ref")->required();
    show->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string text = catalogue(node, "GET", "/api/v1/datasets/" + qualified(node, show_ref));
            if (json_output) {
                print_json(text);
                return 0;
            }
            const Json j = Json::parse(text);
            const Json& m = j.at("metadata");
            std::cout << ref_path(m.at("ref")) << "  " << m.at("ref").at("kind").get<std::string>() << "\n"
                      << "title         " << title_of(m.at("title")) << "\n"
                      << "policy        " << m.at("download_policy").get<std::string>() << "\n"
                      << "content_hash  " << m.at("content_hash").get<std::string>() << "\n"
                      << "download      " << j.at("download_url").get<std::string>() << "\n";
            for (const auto& [name, links] : j.at("links").items()) {
                for (const auto& l : links) {
                    std::cout << name << "  " << ref_path(l.at("ref")) << "  "
                              << (l.at("catalogue_url").is_null() ? "-" : l.at("catalogue_url").get<std::string>())
                              << "\n";
                }
            }
            return 0;
        });
    });

    // search
    std::string search_text, search_peer, search_lang;
    std::vector<std::string> search_kinds, search_categories;
    std::size_t search_page = 1, search_page_size = 20;
    auto* search = app.add_subcommand("search", "Search this node's catalogue or a peer's");
    search->add_option("text", search_text, "Free text");
    search->add_option("--kind", search_kinds, "Content kind; repeatable");
    search->add_option("--category", search_categories, "Category; repeatable");
    search->add_option("--lang", search_lang, "Only records with title or description in this language");
    search->add_option("--page", search_page, "Page number")->check(CLI::PositiveNumber);
    search->add_option("--page-size", search_page_size, "Results per page")->check(CLI::Range(1, 100));
    search->add_option("--peer", search_peer, "Search this registered peer instead");
    search->callback([&] {
        action = with_node([&](ld_node* node) {
            std::vector<std::string> params;
            if (!search_text.empty()) params.push_back("text=" + encode(search_text));
            if (!search_kinds.empty()) params.push_back("kinds=" + encode(join(search_kinds, ",")));
            if (!search_categories.empty()) params.push_back("categories=" + encode(join(search_categories, ",")));
            if (!search_lang.empty()) params.push_back("language_tag=" + encode(search_lang));
            params.push_back("page=" + std::to_string(search_page));
            params.push_back("page_size=" + std::to_string(search_page_size));
            const std::string query = join(params, "&");
            std::string text;
            if (search_peer.empty()) {
                text = catalogue(node, "GET", "/api/v1/datasets?" + query);
            } else {
                char* out = nullptr;
                check(ld_search_peer(node, search_peer.c_str(), query.c_str(), &out));
                text = take(out);
            }
            json_output ? print_json(text) : print_search(Json::parse(text));
            return 0;
        });
    });

    // download
    std::string download_ref, download_token, download_output;
    auto* download = app.add_subcommand("download", "Download a distributed dataset from this node's catalogue");
    download->add_option("ref", download_ref, "DREP ref")->required();
    download->add_option("--token", download_token, "Download token for request-policy datasets");
    download->add_option("--output,-o", download_output, "Write to this file instead of stdout");
    download->callback([&] {
        action = with_node([&](ld_node* node) {
            std::string path = "/api/v1/datasets/" + qualified(node, download_ref) + "/download";
            if (!download_token.empty()) path += "?token=" + encode(download_token);
            const std::string bytes = catalogue(node, "GET", path);
            if (download_output.empty()) {
                std::cout << bytes << std::flush;
                return 0;
            }
            std::ofstream out(download_output, std::ios::binary);
            out << bytes;
            if (!out.flush()) throw ApiFailure{LD_ERR_IO, "cannot write " + download_output};
            std::cerr << "wrote " << bytes.size() << " bytes to " << download_output << "\n";
            return 0;
        });
    });

    // fetch
    std::string fetch_ref, fetch_token;
    auto* fetch = app.add_subcommand("fetch", "Download a peer's dataset, verify it and store it in SREP");
    fetch->add_option("ref", fetch_ref, "Remote ref node/local/version")->required();
    fetch->add_option("--token", fetch_token, "Download token for request-policy datasets");
    fetch->callback([&] {
        action = with_node([&](ld_node* node) {
            char* out = nullptr;
            check(ld_fetch(node, fetch_ref.c_str(), fetch_token.empty() ? nullptr : fetch_token.c_str(), &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                const Json j = Json::parse(text);
                std::cout << "verified " << ref_path(j.at("ref")) << "  " << j.at("content_hash").get<std::string>()
                          << "\n";
                if (!j.at("stored").is_null()) print_entry(j.at("stored"));
            }
            return 0;
        });
    });

    // compose
    std::string compose_s, compose_k, compose_l, compose_id;
    Describe compose_fields;
    auto* compose = app.add_subcommand("compose", "Compose a local S with a peer's K and L into a new graph");
    compose->add_option("--standardised", compose_s, "Local standardised ref")->required();
    compose->add_option("--knowledge", compose_k, "Knowledge ref (usually a peer's)")->required();
    compose->add_option("--language", compose_l, "Language ref (usually a peer's)")->required();
    compose->add_option("--graph-id", compose_id, "Local id of the new graph");
    compose_fields.add_to(compose);
    compose->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string fields = compose_fields.fields();
            char* out = nullptr;
            check(ld_cross_compose(node, compose_s.c_str(), compose_k.c_str(), compose_l.c_str(), fields.c_str(),
                                   compose_fields.policy.c_str(), compose_id.empty() ? nullptr : compose_id.c_str(),
                                   &out));
            const std::string text = take(out);
            json_output ? print_json(text) : print_entry(Json::parse(text));
            return 0;
        });
    });

    // peer
    auto* peer = app.add_subcommand("peer", "Manage the peer registry");
    peer->require_subcommand(1);
    std::string peer_file, peer_id;
    auto* peer_add = peer->add_subcommand("add", "Register a peer from its descriptor file");
    peer_add->add_option("descriptor", peer_file, "Peer descriptor JSON file")->required();
    peer_add->callback([&] {
        action = with_node([&](ld_node* node) {
            check(ld_peer_add(node, read_input(peer_file).c_str()));
            if (!json_output) std::cout << "peer registered\n";
            return 0;
        });
    });
    auto* peer_remove = peer->add_subcommand("remove", "Unregister a peer");
    peer_remove->add_option("node_id", peer_id, "Peer node id")->required();
    peer_remove->callback([&] {
        action = with_node([&](ld_node* node) {
            check(ld_peer_remove(node, peer_id.c_str()));
            if (!json_output) std::cout << "peer " << peer_id << " removed\n";
            return 0;
        });
    });
    auto* peer_list = peer->add_subcommand("list", "List registered peers");
    peer_list->callback([&] {
        action = with_node([&](ld_node* node) {
            char* out = nullptr;
            check(ld_peer_list(node, &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                for (const auto& p : Json::parse(text)) {
                    std::cout << p.at("node_id").get<std::string>() << "  " << p.at("base_url").get<std::string>()
                              << "\n";
                }
            }
            return 0;
        });
    });

    // request
    auto* request = app.add_subcommand("request", "Review access requests for request-policy datasets");
    request->require_subcommand(1);
    std::string request_id;
    std::string file_ref, file_contact, file_justification;
    auto* request_file = request->add_subcommand("file", "File an access request for a request-policy dataset");
    request_file->add_option("ref", file_ref, "DREP ref")->required();
    request_file->add_option("--contact", file_contact, "Requester contact")->required();
    request_file->add_option("--justification", file_justification, "Why access is needed")->required();
    request_file->callback([&] {
        action = with_node([&](ld_node* node) {
            const Json body{{"contact", file_contact}, {"justification", file_justification}};
            const std::string text =
                catalogue(node, "POST", "/api/v1/datasets/" + qualified(node, file_ref) + "/requests", body.dump());
            if (json_output) {
                print_json(text);
            } else {
                const Json r = Json::parse(text).at("request");
                std::cout << r.at("request_id").get<std::string>() << "  " << r.at("status").get<std::string>()
                          << "\n";
            }
            return 0;
        });
    });
    std::string status_id;
    auto* request_status = request->add_subcommand("status", "Show a request as the requester sees it");
    request_status->add_option("request_id", status_id, "Request id")->required();
    request_status->callback([&] {
        action = with_node([&](ld_node* node) {
            const std::string text = catalogue(node, "GET", "/api/v1/requests/" + encode(status_id));
            if (json_output) {
                print_json(text);
            } else {
                const Json r = Json::parse(text).at("request");
                std::cout << r.at("request_id").get<std::string>() << "  " << r.at("status").get<std::string>()
                          << (r.contains("token") ? "  token " + r.at("token").get<std::string>() : "") << "\n";
            }
            return 0;
        });
    });
    auto* request_list = request->add_subcommand("list", "List access requests");
    request_list->callback([&] {
        action = with_node([&](ld_node* node) {
            char* out = nullptr;
            check(ld_request_list(node, &out));
            const std::string text = take(out);
            if (json_output) {
                print_json(text);
            } else {
                for (const auto& r : Json::parse(text)) {
                    std::cout << r.at("request_id").get<std::string>() << "  " << r.at("status").get<std::string>()
                              << "  " << ref_path(r.at("ref")) << "  " << r.at("contact").get<std::string>() << "\n";
                }
            }
            return 0;
        });
    });
    for (const auto& [name, approve] : {std::pair{"approve", 1}, std::pair{"deny", 0}}) {
        auto* decide = request->add_subcommand(name, approve ? "Approve a request and issue a token"
                                                              : "Deny a request");
        decide->add_option("request_id", request_id, "Request id")->required();
        decide->callback([&, approve = approve] {
            action = with_node([&, approve](ld_node* node) {
                char* out = nullptr;
                check(ld_request_decide(node, request_id.c_str(), approve, &out));
                const std::string text = take(out);
                if (json_output) {
                    print_json(text);
                } else {
                    const Json r = Json::parse(text);
                    std::cout << r.at("request_id").get<std::string>() << "  " << r.at("status").get<std::string>()
                              << (r.contains("token") ? "  token " + r.at("token").get<std::string>() : "") << "\n";
                }
                return 0;
            });
        });
    }

    // serve
    std::string serve_host = "127.0.0.1";
    int serve_port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve the catalogue API until interrupted");
    serve->add_option("--host", serve_host, "Address to bind");
    serve->add_option("--port", serve_port, "Port to bind; 0 picks a free one")->check(CLI::Range(0, 65535));
    serve->callback([&] {
        action = with_node([&](ld_node* node) {
            // Block the signals before the server threads start so only sigwait sees them.
            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);
            int bound = 0;
            check(ld_serve_start(node, serve_host.c_str(), serve_port, &bound));
            std::cout << "serving on http://" << serve_host << ":" << bound << "/api/v1" << std::endl;
            const int sig = wait_for_signal();
            check(ld_serve_stop(node));
            std::cout << "stopped (signal " << sig << ")" << std::endl;
            return 0;
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const ApiFailure& f) {
        std::cerr << "error[" << ld_status_name(f.status) << "]: " << f.message << "\n";
        return f.status == LD_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
    }
    try {
        return action ? action() : kExitUsage;
    } catch (const ApiFailure& f) {
        std::cerr << "error[" << ld_status_name(f.status) << "]: " << f.message << "\n";
        return f.status == LD_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return kExitFailure;
    }
}
