#include "support.hpp"

#include <atomic>

#include "livedata/util.hpp"

namespace testsupport {

using namespace livedata;

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("livedata-test-" + random_hex(6) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ignored;
    fs::remove_all(path_, ignored);
}

NodeDescriptor node_descriptor(const std::string& file) {
    return node_from_json(parse_json(read_data(file), file));
}

TransformConfig load_config(const std::string& dir) {
    return config_from_json(parse_json(read_data(dir + "/config.json"), dir));
}

namespace {

const char* const kRawFiles[][2] = {
    {"departments-raw", "departments.csv"},
    {"professors-raw", "professors.csv"},
    {"courses-raw", "courses.csv"},
};

}  // namespace

std::vector<SourceDataset> raw_sources(const std::string& dir, const std::string& node_id) {
    std::vector<SourceDataset> out;
    for (const auto& [local_id, file] : kRawFiles) {
        const DatasetRef ref{node_id, local_id, 1, ContentKind::LowQuality};
        out.push_back(parse_source(read_data(dir + "/" + file), ref, "fixture " + std::string(file), kFixedTime));
    }
    return out;
}

PipelineOutput walkthrough() {
    const NodeDescriptor node = node_descriptor("node-unitn.json");
    return run_pipeline(raw_sources("university", node.node_id), load_config("university"), node);
}

TransformResult collect_and_transform(Node& node, const std::string& dir) {
    std::vector<DatasetRef> refs;
    for (const auto& [local_id, file] : kRawFiles) {
        refs.push_back(node.collect(read_data(dir + "/" + file), ContentKind::LowQuality, local_id, 1,
                                    "fixture " + std::string(file))
                           .ref);
    }
    return node.transform(refs, load_config(dir));
}

Mesh::Mesh(DownloadPolicy a_policy) : transport(std::make_shared<InProcessTransport>()) {
    const NodeDescriptor da = node_descriptor("node-unitn.json");
    const NodeDescriptor db = node_descriptor("node-num.json");
    a = Node::init(dir / "a", da, transport);
    b = Node::init(dir / "b", db, transport);
    transport->attach(da.base_url, &a->catalogue());
    transport->attach(db.base_url, &b->catalogue());
    a->federation().add_peer(db);
    b->federation().add_peer(da);
    a_out = collect_and_transform(*a, "university");
    b_out = collect_and_transform(*b, "university-mn");
    for (const auto& e : a_out.entries) {
        a->distribute(e.ref, {{{"en", "University " + e.ref.local_id}}, {}, {"education"}}, a_policy);
    }
}

}  // namespace testsupport
