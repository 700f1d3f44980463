// Exercises the shared library through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "livedata/livedata.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kPinnedStandardised = "a6005e45dd25fc908339a82cc6c49387fe3c60977e331629d35e54d50561eeda";

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string data(const std::string& name) { return slurp(fs::path(LIVEDATA_TEST_DATA) / name); }

std::string take(char* text) {
    std::string out = text == nullptr ? "" : text;
    ld_string_free(text);
    return out;
}

struct Scratch {
    fs::path path;
    Scratch() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("ld-capi-" + std::to_string(rd()));
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Handle {
    ld_node* node = nullptr;
    ~Handle() { ld_node_close(node); }
};

// The walkthrough node up to a transformed CREP.
struct Walkthrough {
    Scratch dir;
    Handle h;
    std::string transformed;

    Walkthrough() {
        const std::string descriptor = data("node-unitn.json");
        REQUIRE(ld_node_init(dir.path.c_str(), descriptor.c_str(), &h.node) == LD_OK);
        for (const char* t : {"departments", "professors", "courses"}) {
            const std::string bytes = data(std::string("university/") + t + ".csv");
            const std::string id = std::string(t) + "-raw";
            char* out = nullptr;
            REQUIRE(ld_collect(h.node, bytes.data(), bytes.size(), "low_quality", id.c_str(), 1, "registry export",
                               &out) == LD_OK);
            ld_string_free(out);
        }
        const std::string config = data("university/config.json");
        char* out = nullptr;
        REQUIRE(ld_transform(h.node, R"(["departments-raw/1", "professors-raw/1", "courses-raw/1"])", config.c_str(),
                             &out) == LD_OK);
        transformed = take(out);
    }
};

}  // namespace

TEST_CASE("status names cover every code") {
    CHECK(std::string(ld_status_name(LD_OK)) == "ok");
    CHECK(std::string(ld_status_name(LD_ERR_VALIDATION)) == "validation");
    CHECK(std::string(ld_status_name(LD_ERR_PARSE)) == "parse");
    CHECK(std::string(ld_status_name(LD_ERR_INVALID_ARGUMENT)) == "invalid_argument");
    CHECK(std::string(ld_status_name(LD_ERR_NOT_FOUND)) == "not_found");
    CHECK(std::string(ld_status_name(LD_ERR_CONFLICT)) == "conflict");
    CHECK(std::string(ld_status_name(LD_ERR_POLICY)) == "policy");
    CHECK(std::string(ld_status_name(LD_ERR_UNKNOWN_PEER)) == "unknown_peer");
    CHECK(std::string(ld_status_name(LD_ERR_INTEGRITY)) == "integrity");
    CHECK(std::string(ld_status_name(LD_ERR_TRANSIENT)) == "transient");
    CHECK(std::string(ld_status_name(LD_ERR_IO)) == "io");
    CHECK(std::string(ld_status_name(LD_ERR_INTERNAL)) == "internal");
    CHECK(std::string(ld_status_name(static_cast<ld_status>(99))) == "internal");
    CHECK(std::string(ld_version()).size() > 0);
}

TEST_CASE("NULL arguments are rejected, not dereferenced") {
    char* out = nullptr;
    int status = 0;
    CHECK(ld_node_descriptor(nullptr, &out) == LD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(ld_last_error()).find("node") != std::string::npos);
    CHECK(ld_node_open(nullptr, nullptr) == LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_list(nullptr, "crep", nullptr, &out) == LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_catalogue_get(nullptr, "/api/v1/node", &status, &out) == LD_ERR_INVALID_ARGUMENT);
    CHECK(out == nullptr);
    ld_node_close(nullptr);
    ld_string_free(nullptr);

    Scratch dir;
    Handle h;
    const std::string descriptor = data("node-num.json");
    REQUIRE(ld_node_init(dir.path.c_str(), descriptor.c_str(), &h.node) == LD_OK);
    CHECK(ld_node_descriptor(h.node, nullptr) == LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_collect(h.node, nullptr, 3, "low_quality", "x-raw", 1, "p", &out) == LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_catalogue_get(h.node, "/api/v1/node", nullptr, &out) == LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_peer_remove(h.node, nullptr) == LD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("node lifecycle errors map to distinct statuses") {
    Scratch dir;
    ld_node* node = nullptr;
    CHECK(ld_node_init(dir.path.c_str(), "{not json", &node) == LD_ERR_PARSE);
    CHECK(node == nullptr);
    CHECK(ld_node_init(dir.path.c_str(), R"({"node_id": "X"})", &node) == LD_ERR_PARSE);
    std::string bad_id = data("node-unitn.json");
    bad_id.replace(bad_id.find("\"unitn\""), 7, "\"Unitn\"");
    CHECK(ld_node_init(dir.path.c_str(), bad_id.c_str(), &node) == LD_ERR_VALIDATION);
    CHECK(ld_node_open((dir.path / "missing").c_str(), &node) == LD_ERR_NOT_FOUND);

    const std::string descriptor = data("node-unitn.json");
    REQUIRE(ld_node_init(dir.path.c_str(), descriptor.c_str(), &node) == LD_OK);
    ld_node_close(node);
    node = nullptr;
    CHECK(ld_node_init(dir.path.c_str(), descriptor.c_str(), &node) == LD_ERR_CONFLICT);

    Handle reopened;
    REQUIRE(ld_node_open(dir.path.c_str(), &reopened.node) == LD_OK);
    char* out = nullptr;
    REQUIRE(ld_node_descriptor(reopened.node, &out) == LD_OK);
    CHECK(take(out).find("\"unitn\"") != std::string::npos);
}

TEST_CASE("the last error is per thread") {
    char* out = nullptr;
    REQUIRE(ld_node_descriptor(nullptr, &out) == LD_ERR_INVALID_ARGUMENT);
    const std::string mine = ld_last_error();
    std::thread([] {
        CHECK(ld_node_open("/nonexistent/livedata/root", nullptr) == LD_ERR_INVALID_ARGUMENT);
    }).join();
    CHECK(std::string(ld_last_error()) == mine);
}

TEST_CASE("walkthrough through the C API reproduces the pinned standardised hash") {
    Walkthrough w;
    CHECK(w.transformed.find(kPinnedStandardised) != std::string::npos);
    const auto s_at = w.transformed.find("\"standardised\"");
    const auto l_at = w.transformed.find("\"language\"");
    const auto k_at = w.transformed.find("\"knowledge\"");
    const auto g_at = w.transformed.find("\"graph\"");
    CHECK(s_at < l_at);
    CHECK(l_at < k_at);
    CHECK(k_at < g_at);

    char* out = nullptr;
    REQUIRE(ld_check(w.h.node, &out) == LD_OK);
    CHECK(take(out) == "[]");
}

TEST_CASE("distribute validates fields and policy") {
    Walkthrough w;
    char* out = nullptr;
    CHECK(ld_distribute(w.h.node, "university-s/1", R"({"title": {"en": "U"}, "colour": "red"})", "automatic", &out) ==
          LD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(ld_last_error()).find("colour") != std::string::npos);
    CHECK(ld_distribute(w.h.node, "university-s/1", R"({"title": {"en": "U"}})", "sometimes", &out) ==
          LD_ERR_INVALID_ARGUMENT);
    CHECK(ld_distribute(w.h.node, "university-s/1", R"({"title": "U"})", "automatic", &out) != LD_OK);
    CHECK(ld_distribute(w.h.node, "nothing-s/1", R"({"title": {"en": "U"}})", "automatic", &out) ==
          LD_ERR_NOT_FOUND);
    REQUIRE(ld_distribute(w.h.node, "university-s/1", R"({"title": {"en": "U"}})", nullptr, &out) == LD_OK);
    CHECK(take(out).find("\"automatic\"") != std::string::npos);
    CHECK(ld_distribute(w.h.node, "university-s/1", R"({"title": {"en": "U"}})", "automatic", &out) ==
          LD_ERR_CONFLICT);
}

TEST_CASE("catalogue requests are binary safe and report HTTP status") {
    Walkthrough w;
    char* out = nullptr;
    REQUIRE(ld_distribute(w.h.node, "university-s/1", R"({"title": {"en": "U"}})", "automatic", &out) == LD_OK);
    ld_string_free(out);

    int status = 0;
    std::size_t length = 0;
    REQUIRE(ld_catalogue_request(w.h.node, "GET", "/api/v1/datasets/unitn/university-s/1/download", nullptr, 0,
                                 &status, &out, &length) == LD_OK);
    CHECK(status == 200);
    const std::string bytes(out, length);
    ld_string_free(out);
    REQUIRE(ld_list(w.h.node, "drep", "standardised", &out) == LD_OK);
    const std::string listing = take(out);
    const auto file_at = listing.find("\"file\": \"") + 9;
    const std::string file = listing.substr(file_at, listing.find('"', file_at) - file_at);
    CHECK(bytes == slurp(w.dir.path / file));

    REQUIRE(ld_catalogue_get(w.h.node, "/api/v1/datasets?text=zzz&page_size=5", &status, &out) == LD_OK);
    CHECK(status == 200);
    CHECK(take(out).find("\"total\":0") != std::string::npos);
    REQUIRE(ld_catalogue_get(w.h.node, "/api/v1/datasets?page=0", &status, &out) == LD_OK);
    CHECK(status == 400);
    ld_string_free(out);
    CHECK(ld_catalogue_request(w.h.node, "DELETE", "/api/v1/node", nullptr, 0, &status, &out, nullptr) ==
          LD_ERR_INVALID_ARGUMENT);

    const std::string body = R"({"contact": "a@b.c", "justification": "x"})";
    REQUIRE(ld_catalogue_request(w.h.node, "POST", "/api/v1/datasets/unitn/university-s/1/requests", body.data(),
                                 body.size(), &status, &out, &length) == LD_OK);
    CHECK(status == 409);
    ld_string_free(out);
}

TEST_CASE("collect stores bytes with embedded NULs unchanged") {
    Scratch dir;
    Handle h;
    const std::string descriptor = data("node-num.json");
    REQUIRE(ld_node_init(dir.path.c_str(), descriptor.c_str(), &h.node) == LD_OK);
    const std::string bytes("a\0b\0\xff", 5);
    char* out = nullptr;
    REQUIRE(ld_collect(h.node, bytes.data(), bytes.size(), "external_reference", "blob", 1, "test", &out) == LD_OK);
    const std::string entry = take(out);
    const auto file_at = entry.find("\"file\": \"") + 9;
    CHECK(slurp(dir.path / entry.substr(file_at, entry.find('"', file_at) - file_at)) == bytes);
    CHECK(ld_collect(h.node, bytes.data(), bytes.size(), "nowhere", "blob2", 1, "test", &out) ==
          LD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("peers and requests through the C API") {
    Walkthrough w;
    char* out = nullptr;
    CHECK(ld_search_peer(w.h.node, "num", "text=x", &out) == LD_ERR_UNKNOWN_PEER);
    const std::string peer = data("node-num.json");
    REQUIRE(ld_peer_add(w.h.node, peer.c_str()) == LD_OK);
    CHECK(ld_peer_add(w.h.node, peer.c_str()) == LD_OK);  // same descriptor: no-op
    std::string moved = peer;
    moved.replace(moved.find("num.example"), 11, "mn.example");
    CHECK(ld_peer_add(w.h.node, moved.c_str()) == LD_ERR_CONFLICT);
    const std::string self = data("node-unitn.json");
    CHECK(ld_peer_add(w.h.node, self.c_str()) != LD_OK);
    REQUIRE(ld_peer_list(w.h.node, &out) == LD_OK);
    CHECK(take(out).find("\"num\"") != std::string::npos);
    REQUIRE(ld_peer_remove(w.h.node, "num") == LD_OK);
    CHECK(ld_peer_remove(w.h.node, "num") == LD_ERR_NOT_FOUND);

    CHECK(ld_request_decide(w.h.node, "req-0000", 1, &out) == LD_ERR_NOT_FOUND);
    REQUIRE(ld_request_list(w.h.node, &out) == LD_OK);
    CHECK(take(out) == "[]");

    CHECK(ld_cross_compose(w.h.node, "num/x-s/1", "university-k/1", "university-l/1", R"({"title": {"en": "G"}})",
                           nullptr, nullptr, &out) == LD_ERR_NOT_FOUND);
}

TEST_CASE("serve binds an ephemeral port and stops") {
    Walkthrough w;
    int port = 0;
    REQUIRE(ld_serve_start(w.h.node, "127.0.0.1", 0, &port) == LD_OK);
    CHECK(port > 0);
    int again = 0;
    CHECK(ld_serve_start(w.h.node, "127.0.0.1", 0, &again) == LD_ERR_CONFLICT);
    CHECK(ld_serve_stop(w.h.node) == LD_OK);
    CHECK(ld_serve_stop(w.h.node) == LD_ERR_CONFLICT);
    REQUIRE(ld_serve_start(w.h.node, "127.0.0.1", 0, &port) == LD_OK);
}
