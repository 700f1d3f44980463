#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "livedata/error.hpp"
#include "livedata/node.hpp"
#include "support.hpp"

using namespace livedata;
using testsupport::TempDir;

namespace {

struct Catalogue {
    TempDir dir;
    std::unique_ptr<Node> node;
    TransformResult result;

    explicit Catalogue(DownloadPolicy graph_policy = DownloadPolicy::Automatic) {
        node = Node::init(dir / "repo", testsupport::node_descriptor("node-unitn.json"));
        result = testsupport::collect_and_transform(*node, "university");
        const char* titles[] = {"University tables", "University vocabulary", "University ontology",
                                "University knowledge graph"};
        for (std::size_t i = 0; i < 4; ++i) {
            node->distribute(result.entries[i].ref,
                             {{{"en", titles[i]}, {"it", i == 3 ? "Grafo dei professori" : "Dati universitari"}},
                              {{"en", "Teaching data of " + std::string(i == 3 ? "professors" : "the university")}},
                              {i == 3 ? "education" : "administration"}},
                             i == 3 ? graph_policy : DownloadPolicy::Automatic);
        }
    }

    HttpResponse get(const std::string& path, std::multimap<std::string, std::string> query = {}) {
        return node->catalogue().handle({"GET", path, std::move(query), ""});
    }
    HttpResponse post(const std::string& path, const std::string& body) {
        return node->catalogue().handle({"POST", path, {}, body});
    }
    Json get_json(const std::string& path, std::multimap<std::string, std::string> query = {}) {
        const auto r = get(path, std::move(query));
        INFO(r.body);
        REQUIRE(r.status == 200);
        return parse_json(r.body, "response");
    }
    std::string graph_path() const { return "/api/v1/datasets/" + result.entries[3].ref.path(); }
};

std::string path_of(const std::string& url, const std::string& base) {
    REQUIRE(starts_with(url, base));
    return url.substr(base.size());
}

std::set<std::string> result_local_ids(const Json& page) {
    std::set<std::string> out;
    for (const auto& r : page.at("results")) out.insert(r.at("ref").at("local_id").get<std::string>());
    return out;
}

}  // namespace

TEST_CASE("landing counts agree with the unfiltered listing") {
    Catalogue c;
    const Json node = c.get_json("/api/v1/node");
    CHECK(node.at("node").at("node_id") == "unitn");
    CHECK(node.at("counts").at("graph") == 1);
    const Json list = c.get_json("/api/v1/datasets");
    CHECK(node.at("total") == list.at("total"));
    CHECK(list.at("results").size() == 4);
}

TEST_CASE("detail resolves links to local catalogue URLs that answer 200") {
    Catalogue c;
    const Json detail = c.get_json(c.graph_path());
    const std::string base = c.node->descriptor().base_url;
    CHECK(detail.at("metadata").at("ref").at("kind") == "graph");
    CHECK(detail.at("download_url") == base + c.graph_path() + "/download");
    const auto& composed = detail.at("links").at("composed_of");
    REQUIRE(composed.size() == 3);
    for (const auto& link : composed) {
        CHECK(link.at("remote") == false);
        CHECK(c.get(path_of(link.at("catalogue_url").get<std::string>(), base)).status == 200);
    }
    for (const auto& link : detail.at("links").at("derived_from")) CHECK(link.at("catalogue_url").is_null());
    const Json k = c.get_json("/api/v1/datasets/" + c.result.entries[2].ref.path());
    CHECK(k.at("links").at("uses_language").size() == 1);
}

TEST_CASE("unknown datasets and routes are 404 with an error body") {
    Catalogue c;
    auto r = c.get("/api/v1/datasets/unitn/nothing/1");
    CHECK(r.status == 404);
    CHECK(parse_json(r.body, "e").at("error").at("code") == "not_found");
    CHECK(c.get("/api/v1/elsewhere").status == 404);
    CHECK(c.get("/api/v1/datasets/num/university-g/1").status == 404);
}

TEST_CASE("search is sound and complete on exact title tokens") {
    Catalogue c;
    const auto all = c.get_json("/api/v1/datasets").at("results");
    for (const auto& entry : all) {
        for (const auto& [tag, title] : entry.at("title").items()) {
            for (const auto& token : tokenize(title.get<std::string>())) {
                CAPTURE(token);
                const Json page = c.get_json("/api/v1/datasets", {{"text", token}});
                // Completeness: the owner of the token is returned.
                CHECK(result_local_ids(page).count(entry.at("ref").at("local_id").get<std::string>()) == 1);
                // Soundness: everything returned contains a token with that prefix.
                for (const auto& r : page.at("results")) {
                    const Json detail =
                        c.get_json("/api/v1/datasets/" + ref_from_json(r.at("ref")).path()).at("metadata");
                    std::string text;
                    for (const auto* field : {"title", "description"}) {
                        for (const auto& [t, v] : detail.at(field).items()) text += " " + v.get<std::string>();
                    }
                    for (const auto& cat : detail.at("categories")) text += " " + cat.get<std::string>();
                    const auto tokens = tokenize(text);
                    CHECK(std::any_of(tokens.begin(), tokens.end(),
                                      [&](const std::string& t) { return starts_with(t, token); }));
                }
            }
        }
    }
}

TEST_CASE("search matches prefixes across languages and ranks by matches") {
    Catalogue c;
    CHECK(result_local_ids(c.get_json("/api/v1/datasets", {{"text", "professor"}})) ==
          std::set<std::string>{"university-g"});
    CHECK(c.get_json("/api/v1/datasets", {{"text", "grafo"}}).at("total") == 1);
    CHECK(c.get_json("/api/v1/datasets", {{"text", "zebra"}}).at("total") == 0);
    const Json ranked = c.get_json("/api/v1/datasets", {{"text", "university knowledge graph"}});
    CHECK(ranked.at("results").at(0).at("ref").at("local_id") == "university-g");
    CHECK(ranked.at("results").at(0).at("matches") == 3);
}

TEST_CASE("search filters and paginates") {
    Catalogue c;
    CHECK(c.get_json("/api/v1/datasets", {{"kinds", "knowledge,language"}}).at("total") == 2);
    CHECK(c.get_json("/api/v1/datasets", {{"categories", "education"}}).at("total") == 1);
    CHECK(c.get_json("/api/v1/datasets", {{"language_tag", "it"}}).at("total") == 4);
    CHECK(c.get_json("/api/v1/datasets", {{"language_tag", "mn"}}).at("total") == 0);
    const Json p2 = c.get_json("/api/v1/datasets", {{"page", "2"}, {"page_size", "3"}});
    CHECK(p2.at("results").size() == 1);
    CHECK(p2.at("total") == 4);
    CHECK(c.get("/api/v1/datasets", {{"page_size", "0"}}).status == 400);
    CHECK(c.get("/api/v1/datasets", {{"kinds", "low_quality"}}).status == 400);
    const auto bad = c.get("/api/v1/datasets", {{"colour", "red"}});
    CHECK(bad.status == 400);
    CHECK(parse_json(bad.body, "e").at("error").at("message").get<std::string>().rfind("colour", 0) == 0);
}

TEST_CASE("query strings round-trip") {
    SearchQuery q;
    q.text = "a b&c";
    q.kinds = {ContentKind::Graph, ContentKind::Knowledge};
    q.categories = {"education"};
    q.language_tag = "it";
    q.page = 3;
    q.page_size = 7;
    httplib::Params params;
    httplib::detail::parse_query_text(to_query_string(q), params);
    const auto back = parse_search_query({params.begin(), params.end()});
    CHECK(back.text == q.text);
    CHECK(back.kinds == q.kinds);
    CHECK(back.categories == q.categories);
    CHECK(back.language_tag == q.language_tag);
    CHECK(back.page == 3);
    CHECK(back.page_size == 7);
}

TEST_CASE("download bytes hash to the advertised content hash") {
    Catalogue c;
    for (const auto& e : c.result.entries) {
        const std::string path = "/api/v1/datasets/" + e.ref.path();
        const Json detail = c.get_json(path);
        const auto r = c.get(path + "/download");
        REQUIRE(r.status == 200);
        CHECK(sha256_hex(r.body) == detail.at("metadata").at("content_hash").get<std::string>());
        CHECK(r.headers.at("X-Content-SHA256") == detail.at("metadata").at("content_hash").get<std::string>());
        CHECK(r.content_type == media_type(e.ref.kind));
    }
}

TEST_CASE("request policy issues a single-use token") {
    Catalogue c(DownloadPolicy::Request);
    const std::string path = c.graph_path();
    auto denied = c.get(path + "/download");
    CHECK(denied.status == 403);
    const Json err = parse_json(denied.body, "e").at("error");
    CHECK(err.at("request_endpoint") == c.node->descriptor().base_url + path + "/requests");

    CHECK(c.post(path + "/requests", R"({"contact": "a@b.org"})").status == 400);
    CHECK(c.post("/api/v1/datasets/" + c.result.entries[0].ref.path() + "/requests",
                 R"({"contact": "a@b.org", "justification": "x"})")
              .status == 409);
    const auto created = c.post(path + "/requests", R"({"contact": "a@b.org", "justification": "teaching"})");
    REQUIRE(created.status == 201);
    const std::string id = parse_json(created.body, "r").at("request").at("request_id");
    CHECK(c.get_json("/api/v1/requests/" + id).at("request").at("status") == "pending");
    CHECK_FALSE(c.get_json("/api/v1/requests/" + id).at("request").contains("token"));

    c.node->catalogue().approve(id);
    CHECK_THROWS_AS(c.node->catalogue().deny(id), Error);
    const std::string token = c.get_json("/api/v1/requests/" + id).at("request").at("token");
    CHECK(c.get(path + "/download", {{"token", "wrong"}}).status == 403);
    CHECK(c.get(path + "/download", {{"token", token}}).status == 200);
    CHECK(c.get(path + "/download", {{"token", token}}).status == 403);
    CHECK_FALSE(c.get_json("/api/v1/requests/" + id).at("request").contains("token"));
}

TEST_CASE("concurrent double spend of a token has exactly one winner") {
    Catalogue c(DownloadPolicy::Request);
    const std::string path = c.graph_path();
    const auto created = c.post(path + "/requests", R"({"contact": "a@b.org", "justification": "race"})");
    const std::string id = parse_json(created.body, "r").at("request").at("request_id");
    const std::string token = c.node->catalogue().approve(id).at("token");

    std::atomic<int> ok{0};
    std::atomic<int> refused{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] {
            // Each thread opens its own handle, as separate server processes would.
            auto repo = Repository::open(c.node->repository().root());
            CatalogueService service(repo);
            const auto r = service.handle({"GET", path + "/download", {{"token", token}}, ""});
            (r.status == 200 ? ok : refused)++;
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 1);
    CHECK(refused == 7);
}

TEST_CASE("denied requests keep no token and may be filed again") {
    Catalogue c(DownloadPolicy::Request);
    const std::string path = c.graph_path();
    const auto first = c.post(path + "/requests", R"({"contact": "a@b.org", "justification": "one"})");
    const std::string id = parse_json(first.body, "r").at("request").at("request_id");
    c.node->catalogue().deny(id);
    CHECK(c.get_json("/api/v1/requests/" + id).at("request").at("status") == "denied");
    CHECK(c.post(path + "/requests", R"({"contact": "a@b.org", "justification": "two"})").status == 201);
    CHECK(c.node->catalogue().list_requests().size() == 2);
}

TEST_CASE("the HTTP server exposes the same API") {
    Catalogue c;
    CatalogueServer server(c.node->catalogue());
    const int port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client client("127.0.0.1", port);
    auto r = client.Get("/api/v1/node");
    REQUIRE(r);
    CHECK(r->status == 200);
    r = client.Get(c.graph_path() + "/download");
    REQUIRE(r);
    CHECK(r->get_header_value("X-Content-SHA256") == c.result.entries[3].content_hash);
    r = client.Get("/api/v1/datasets?text=graph&page_size=500");
    REQUIRE(r);
    CHECK(r->status == 400);

    std::thread waiter([&] { server.wait(); });
    server.stop();
    waiter.join();
}
