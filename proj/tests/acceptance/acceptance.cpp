// Acceptance suite: one PASS/FAIL line per primary criterion.
// Exit status is non-zero when any criterion fails.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generator.hpp"
#include "livedata/catalogue.hpp"
#include "livedata/error.hpp"
#include "livedata/federation.hpp"
#include "livedata/node.hpp"
#include "livedata/util.hpp"
#include "support.hpp"

using namespace livedata;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

/// Collects failed expectations for one criterion.
class Checks {
  public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failures_.size() < 8) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    [[nodiscard]] bool passed() const noexcept { return failed_ == 0; }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] std::size_t failed() const noexcept { return failed_; }
    [[nodiscard]] const std::vector<std::string>& failures() const noexcept { return failures_; }

  private:
    std::size_t count_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

struct Criterion {
    int number;
    std::string name;
    std::optional<std::chrono::seconds> limit;
    std::function<void(Checks&)> body;
};

bool run(const Criterion& c) {
    Checks checks;
    const auto start = std::chrono::steady_clock::now();
    try {
        c.body(checks);
    } catch (const std::exception& e) {
        checks.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit) {
        checks.expect(elapsed < static_cast<double>(c.limit->count()),
                      "runtime " + std::to_string(elapsed) + " s exceeds " + std::to_string(c.limit->count()) + " s");
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", elapsed);
    std::cout << (checks.passed() ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.name << " ("
              << checks.count() << " checks, " << timing << ")\n";
    for (const auto& f : checks.failures()) std::cout << "    " << f << "\n";
    if (checks.failed() > checks.failures().size()) {
        std::cout << "    ... and " << checks.failed() - checks.failures().size() << " more\n";
    }
    return checks.passed();
}

HttpResponse get(Node& node, const std::string& path, std::multimap<std::string, std::string> query = {}) {
    return node.catalogue().handle({"GET", path, std::move(query), ""});
}

Json get_json(Node& node, const std::string& path, std::multimap<std::string, std::string> query = {}) {
    const auto r = get(node, path, std::move(query));
    if (r.status != 200) throw std::runtime_error("GET " + path + " answered " + std::to_string(r.status));
    return parse_json(r.body, "response");
}

std::set<DatasetRef> as_set(const std::vector<DatasetRef>& refs) { return {refs.begin(), refs.end()}; }

DescriptiveFields fields_for(const std::string& en, const std::string& it, const std::string& category) {
    return {{{"en", en}, {"it", it}}, {{"en", en + " of the walkthrough university"}}, {category}};
}

/// The walkthrough on a fresh node with every output distributed.
struct Walkthrough {
    TempDir dir;
    std::unique_ptr<Node> node;
    TransformResult result;
    std::vector<Promotion> promotions;

    explicit Walkthrough(DownloadPolicy graph_policy = DownloadPolicy::Automatic) {
        node = Node::init(dir / "repo", testsupport::node_descriptor("node-unitn.json"));
        result = testsupport::collect_and_transform(*node, "university");
        const char* en[] = {"University tables", "University vocabulary", "University ontology",
                            "University knowledge graph"};
        const char* it[] = {"Tabelle universitarie", "Vocabolario universitario", "Ontologia universitaria",
                            "Grafo della conoscenza universitaria"};
        // L before K before G, so every link target is already distributed.
        for (std::size_t i : {0, 1, 2, 3}) {
            promotions.push_back(node->distribute(result.entries[i].ref,
                                                  fields_for(en[i], it[i], i == 3 ? "research" : "education"),
                                                  i == 3 ? graph_policy : DownloadPolicy::Automatic));
        }
    }
    Repository& repo() { return node->repository(); }
};

// 1 ---------------------------------------------------------------------------

void round_trips(Checks& checks) {
    constexpr std::uint64_t kFixtures = 250;
    for (std::uint64_t seed = 0; seed < kFixtures; ++seed) {
        const std::string at = "seed " + std::to_string(seed) + ": ";
        const auto fx = testsupport::generate_fixture(seed);
        try {
            for (const auto& raw : fx.raw) {
                const auto once = clean(raw, fx.config);
                checks.expect(clean(once, fx.config) == once, at + "clean is not idempotent on " + raw.ref.path());
                checks.expect(parse_source(serialize_source(raw), raw.ref, raw.provenance, raw.retrieved_at) == raw,
                              at + "source round trip on " + raw.ref.path());
            }
            const auto out = run_pipeline(fx.raw, fx.config, fx.node);
            const auto& s = out.standardised;
            checks.expect(parse_standardised(serialize_standardised(s)) == s, at + "standardised round trip");
            const auto files = serialize_standardised_files(s);
            checks.expect(parse_standardised(files.tables, files.schema.bytes) == s,
                          at + "standardised file-set round trip");
            checks.expect(parse_language(serialize_language(out.language), out.language.ref) == out.language,
                          at + "language round trip");
            checks.expect(parse_knowledge(serialize_knowledge(out.knowledge)) == out.knowledge,
                          at + "knowledge round trip");
            checks.expect(parse_graph(serialize_graph(out.graph), out.knowledge) == out.graph,
                          at + "graph round trip");
            const AnyDataset datasets[] = {out.standardised, out.language, out.knowledge, out.graph};
            for (const auto& d : datasets) {
                const auto meta =
                    generate_metadata(d, fx.node, seed % 2 ? DownloadPolicy::Request : DownloadPolicy::Automatic,
                                      {{{"en", "Fixture " + std::to_string(seed)}}, {}, {"testing"}}, {},
                                      testsupport::kFixedTime);
                checks.expect(parse_metadata(serialize_metadata(meta)) == meta,
                              at + "metadata round trip for " + ref_of(d).path());
            }
            checks.expect(decompose_graph(out.graph, out.language, out.knowledge) == s,
                          at + "decompose does not reproduce the standardised dataset");
        } catch (const std::exception& e) {
            checks.expect(false, at + e.what());
        }
    }
}

// 2 ---------------------------------------------------------------------------

void stratification(Checks& checks) {
    Walkthrough w;
    const auto& out = w.result.output;
    const auto& k = out.knowledge;
    for (const char* child : {"master_course", "bachelor_course"}) {
        const EType* e = k.find(child);
        checks.expect(e != nullptr, std::string(child) + " is missing from the knowledge dataset");
        if (e == nullptr) continue;
        checks.expect(e->parent == std::optional<std::string>("course"),
                      std::string(child) + " does not specialise course");
        checks.expect(e->concept_id == child, std::string(child) + " has the wrong concept");
    }
    const EType* course = k.find("course");
    checks.expect(course != nullptr && !course->parent, "course should be a root etype");

    ValidationContext kctx;
    kctx.languages.push_back(&out.language);
    const auto k_report = validate(k, kctx);
    checks.expect(k_report.empty(), "validate(K, L): " + to_string(k_report));

    ValidationContext gctx;
    gctx.knowledge = &k;
    gctx.languages.push_back(&out.language);
    const auto g_report = validate(out.graph, gctx);
    checks.expect(g_report.empty(), "validate(G, K, L): " + to_string(g_report));

    const MetadataRecord g_meta = *w.repo().find(w.result.entries[3].ref, Partition::Drep)->metadata;
    checks.expect(as_set(g_meta.links.composed_of) ==
                      std::set<DatasetRef>{out.standardised.ref, out.language.ref, out.knowledge.ref},
                  "G metadata composed_of is not {S, L, K}");
    const MetadataRecord k_meta = *w.repo().find(w.result.entries[2].ref, Partition::Drep)->metadata;
    checks.expect(k_meta.links.uses_language == std::vector<DatasetRef>{out.language.ref},
                  "K metadata uses_language is not {L}");
    for (const auto& p : w.promotions) checks.expect(p.warnings.empty(), "unexpected promotion warning");
}

// 3 ---------------------------------------------------------------------------

bool has_rule(const ValidationReport& report, std::string_view rule) {
    return std::any_of(report.begin(), report.end(), [&](const Violation& v) { return v.rule == rule; });
}

bool get_bytes_fails(const Repository& repo, const DatasetRef& ref, Partition partition) {
    try {
        (void)repo.get_bytes(ref, partition);
        return false;
    } catch (const Error&) {
        return true;
    }
}

void repository_invariants(Checks& checks) {
    Walkthrough w;
    const auto report = w.repo().integrity_check();
    checks.expect(report.empty(), "fresh repository: " + to_string(report));

    // Each mutation runs on its own copy of the repository.
    std::size_t copies = 0;
    auto mutate = [&](const std::string& label, const std::function<void(Repository&)>& damage,
                      const std::function<bool(Repository&)>& detected) {
        const fs::path copy = w.dir / ("copy-" + std::to_string(copies++));
        fs::copy(w.repo().root(), copy, fs::copy_options::recursive);
        auto repo = Repository::open(copy);
        damage(repo);
        checks.expect(detected(repo), label + " went unnoticed");
    };

    for (const auto& e : w.result.entries) {
        mutate("deleting DREP " + e.ref.path(),
               [&](Repository& r) { fs::remove(r.root() / r.find(e.ref, Partition::Drep)->file); },
               [&](Repository& r) {
                   return has_rule(r.integrity_check(), "repository.missing_file") &&
                          get_bytes_fails(r, e.ref, Partition::Drep);
               });
        mutate("deleting the CREP counterpart of " + e.ref.path(),
               [&](Repository& r) { fs::remove(r.root() / r.find(e.ref, Partition::Crep)->file); },
               [&](Repository& r) { return !r.integrity_check().empty() && get_bytes_fails(r, e.ref, Partition::Crep); });
    }
    for (auto partition : {Partition::Srep, Partition::Crep, Partition::Drep}) {
        for (const auto& entry : w.repo().list(partition)) {
            for (std::size_t offset : {std::size_t{0}, std::size_t{57}}) {
                mutate("flipping byte " + std::to_string(offset) + " of " + entry.file,
                       [&](Repository& r) {
                           const fs::path path = r.root() / entry.file;
                           std::string bytes = read_file(path);
                           const std::size_t at = offset % bytes.size();
                           bytes[at] = static_cast<char>(bytes[at] ^ 0x20);
                           std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
                       },
                       [&](Repository& r) {
                           return has_rule(r.integrity_check(), "repository.hash_mismatch") &&
                                  get_bytes_fails(r, entry.ref, partition);
                       });
            }
        }
    }
}

// 4 ---------------------------------------------------------------------------

std::string path_from(const std::string& url, const std::string& base) {
    if (!starts_with(url, base)) throw std::runtime_error(url + " is not under " + base);
    return url.substr(base.size());
}

void catalogue_conformance(Checks& checks) {
    Walkthrough w(DownloadPolicy::Request);
    Node& node = *w.node;
    const std::string base = node.descriptor().base_url;

    const Json landing = get_json(node, "/api/v1/node");
    const Json listing = get_json(node, "/api/v1/datasets", {{"page_size", "100"}});
    std::size_t counted = 0;
    for (const auto& [kind, n] : landing.at("counts").items()) counted += n.get<std::size_t>();
    checks.expect(counted == listing.at("total").get<std::size_t>(), "landing counts differ from the listing total");
    checks.expect(landing.at("total") == listing.at("total"), "landing total differs from the listing total");
    checks.expect(listing.at("results").size() == 4, "listing should hold the four distributed datasets");

    for (const auto& r : listing.at("results")) {
        const std::string path = "/api/v1/datasets/" + ref_from_json(r.at("ref")).path();
        const Json detail = get_json(node, path);
        checks.expect(detail.at("metadata").at("ref") == r.at("ref"), path + " detail names another dataset");
        for (const auto& [name, links] : detail.at("links").items()) {
            for (const auto& link : links) {
                if (link.at("catalogue_url").is_null()) continue;
                const std::string url = link.at("catalogue_url");
                checks.expect(get(node, path_from(url, base)).status == 200, url + " does not resolve");
            }
        }
    }

    // Search: every exact title token finds its owner, and every hit carries the token.
    for (const auto& entry : listing.at("results")) {
        for (const auto& [tag, title] : entry.at("title").items()) {
            for (const auto& token : tokenize(title.get<std::string>())) {
                const Json page = get_json(node, "/api/v1/datasets", {{"text", token}, {"page_size", "100"}});
                bool found = false;
                for (const auto& hit : page.at("results")) {
                    found = found || hit.at("ref") == entry.at("ref");
                    const Json meta = get_json(node, "/api/v1/datasets/" + ref_from_json(hit.at("ref")).path())
                                          .at("metadata");
                    std::string text;
                    for (const auto* field : {"title", "description"}) {
                        for (const auto& [t, v] : meta.at(field).items()) text += " " + v.get<std::string>();
                    }
                    for (const auto& cat : meta.at("categories")) text += " " + cat.get<std::string>();
                    const auto tokens = tokenize(text);
                    checks.expect(std::any_of(tokens.begin(), tokens.end(),
                                              [&](const std::string& t) { return starts_with(t, token); }),
                                  "search '" + token + "' returned an unrelated dataset");
                }
                checks.expect(found, "search '" + token + "' misses its dataset");
            }
        }
    }

    // Downloads of the automatic datasets.
    for (std::size_t i = 0; i < 3; ++i) {
        const std::string path = "/api/v1/datasets/" + w.result.entries[i].ref.path();
        const auto r = get(node, path + "/download");
        checks.expect(r.status == 200, path + " download refused");
        checks.expect(sha256_hex(r.body) == get_json(node, path).at("metadata").at("content_hash"),
                      path + " bytes do not hash to content_hash");
    }

    // Request policy: a strictly single-use token, also under a concurrent double spend.
    const std::string graph = "/api/v1/datasets/" + w.result.entries[3].ref.path();
    checks.expect(get(node, graph + "/download").status == 403, "request-policy download without token");
    for (int round = 0; round < 5; ++round) {
        const auto created = node.catalogue().handle(
            {"POST", graph + "/requests", {}, R"({"contact": "lab@example.org", "justification": "audit"})"});
        checks.expect(created.status == 201, "request not created");
        const std::string id = parse_json(created.body, "request").at("request").at("request_id");
        const std::string token = node.catalogue().approve(id).at("token");

        std::atomic<int> ok{0};
        std::atomic<int> refused{0};
        std::string won;
        std::vector<std::thread> threads;
        for (int t = 0; t < 8; ++t) {
            threads.emplace_back([&] {
                auto repo = Repository::open(w.repo().root());
                CatalogueService service(repo);
                const auto r = service.handle({"GET", graph + "/download", {{"token", token}}, ""});
                if (r.status == 200) {
                    ++ok;
                    won = r.body;
                } else {
                    ++refused;
                }
            });
        }
        for (auto& t : threads) t.join();
        checks.expect(ok == 1 && refused == 7, "double spend: " + std::to_string(ok.load()) + " downloads succeeded");
        checks.expect(sha256_hex(won) == get_json(node, graph).at("metadata").at("content_hash"),
                      "token download does not hash to content_hash");
        checks.expect(get(node, graph + "/download", {{"token", token}}).status == 403, "token reusable");
    }
}

// 5 ---------------------------------------------------------------------------

void federation(Checks& checks) {
    testsupport::Mesh mesh;
    Node& a = *mesh.a;
    Node& b = *mesh.b;
    const DatasetRef s = mesh.b_out.entries[0].ref;
    const DatasetRef l = mesh.a_out.entries[1].ref;
    const DatasetRef k = mesh.a_out.entries[2].ref;

    auto tags_of = [](const LanguageDataset& lang) {
        std::set<std::string> tags;
        for (const auto& c : lang.concepts) {
            for (const auto& lex : c.lexicalizations) tags.insert(lex.language_tag);
        }
        return tags;
    };
    checks.expect(tags_of(mesh.a_out.output.language).count("it") == 1, "A's language lacks Italian");
    checks.expect(tags_of(mesh.b_out.output.language).count("mn") == 1, "B's language lacks Mongolian");

    // B fetches A's K and L; the bytes are checked against A's advertised hashes.
    for (const auto& ref : {k, l}) {
        const auto fetched = b.federation().fetch_remote_dataset(ref);
        const auto advertised = a.repository().find(ref, Partition::Drep)->metadata->content_hash;
        checks.expect(fetched.metadata.content_hash == advertised, ref.path() + " advertised hash differs");
        checks.expect(sha256_hex(fetched.bytes) == advertised, ref.path() + " bytes do not match their hash");
        checks.expect(fetched.stored.has_value() && fetched.stored->content_hash == advertised,
                      ref.path() + " was not stored in SREP");
    }

    b.distribute(s, {{{"mn", "Сургуулийн хүснэгтүүд"}}, {}, {"education"}}, DownloadPolicy::Automatic);
    const auto composed = b.federation().cross_node_compose(
        s, k, l, {{{"mn", "Их сургуулийн граф"}, {"en", "University graph of B"}}, {}, {"education"}},
        DownloadPolicy::Automatic);
    const auto promotion = b.distribute(composed.graph.ref,
                                        {{{"mn", "Их сургуулийн граф"}, {"en", "University graph of B"}}, {}, {"education"}},
                                        DownloadPolicy::Automatic);
    checks.expect(promotion.warnings.empty(), "distributing B's graph warned");

    const Json detail = get_json(b, "/api/v1/datasets/" + composed.graph.ref.path());
    std::size_t at_a = 0;
    for (const auto& [name, links] : detail.at("links").items()) {
        for (const auto& link : links) {
            if (!link.at("catalogue_url").is_null() &&
                starts_with(link.at("catalogue_url").get<std::string>(), a.descriptor().base_url + "/")) {
                ++at_a;
            }
        }
    }
    checks.expect(at_a == 2, "B's graph detail has " + std::to_string(at_a) + " link URLs at A, expected 2");

    const auto fetched_k = parse_knowledge(
        b.repository().get_bytes({k.node_id, k.local_id, k.version, ContentKind::ExternalReference}, Partition::Srep));
    const auto fetched_l = parse_language(
        b.repository().get_bytes({l.node_id, l.local_id, l.version, ContentKind::ExternalLanguage}, Partition::Srep),
        l);
    const auto graph = parse_graph(b.repository().get_bytes(composed.graph.ref, Partition::Drep), fetched_k);
    checks.expect(decompose_graph(graph, fetched_l, fetched_k) == mesh.b_out.output.standardised,
                  "decomposing B's graph under A's context does not give B's S");
    checks.expect(b.repository().integrity_check().empty(), "B's repository is inconsistent");
    checks.expect(mesh.transport->calls() > 0, "no traffic went through the in-process transport");
}

// 6 ---------------------------------------------------------------------------

void determinism(Checks& checks) {
    Walkthrough first;
    Walkthrough second;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& x = first.result.entries[i];
        const auto& y = second.result.entries[i];
        const std::string name = x.ref.path();
        checks.expect(x.ref == y.ref, name + " refs differ");
        checks.expect(first.repo().get_bytes(x.ref, Partition::Crep) == second.repo().get_bytes(y.ref, Partition::Crep),
                      name + " serialized bytes differ");
        checks.expect(x.content_hash == y.content_hash, name + " content hashes differ");
        auto mx = *first.repo().find(x.ref, Partition::Drep)->metadata;
        auto my = *second.repo().find(y.ref, Partition::Drep)->metadata;
        mx.issued_at = my.issued_at = {};
        checks.expect(mx == my, name + " metadata differs beyond issued_at");
    }
    const auto a = testsupport::walkthrough();
    const auto b = testsupport::walkthrough();
    checks.expect(serialize(AnyDataset{a.standardised}) == serialize(AnyDataset{b.standardised}), "in-memory S differs");
    checks.expect(serialize(AnyDataset{a.graph}) == serialize(AnyDataset{b.graph}), "in-memory G differs");
    checks.expect(canonical_hash(AnyDataset{a.standardised}) == first.result.entries[0].content_hash,
                  "in-memory S hash differs from the stored one");
}

}  // namespace

int main() {
    using std::chrono::seconds;
    const std::vector<Criterion> criteria{
        {1, "round trips over 250 generated fixtures", seconds(60), round_trips},
        {2, "stratification of the university walkthrough", std::nullopt, stratification},
        {3, "repository invariants under deletion and corruption", std::nullopt, repository_invariants},
        {4, "catalogue conformance", seconds(30), catalogue_conformance},
        {5, "two-node federation over an in-process transport", seconds(60), federation},
        {6, "end-to-end determinism", std::nullopt, determinism},
    };
    bool all = true;
    for (const auto& c : criteria) all = run(c) && all;
    return all ? 0 : 1;
}
