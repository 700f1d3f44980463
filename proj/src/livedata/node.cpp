#include "livedata/node.hpp"

#include <algorithm>

#include "livedata/error.hpp"

namespace livedata {

DatasetRef parse_ref_path(std::string_view text, const std::string& default_node) {
    const auto parts = split(text, '/');
    if (parts.size() != 2 && parts.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "'" + std::string(text) + "' is not node/local/version");
    }
    DatasetRef ref;
    ref.node_id = parts.size() == 3 ? parts[0] : default_node;
    ref.local_id = parts[parts.size() - 2];
    const std::string& version = parts.back();
    const bool digits = !version.empty() && version.size() <= 9 &&
                        std::all_of(version.begin(), version.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!digits || std::stoul(version) == 0) {
        throw Error(ErrorCode::InvalidArgument, "'" + std::string(text) + "' has a bad version");
    }
    ref.version = static_cast<std::uint32_t>(std::stoul(version));
    require_valid(validate(ref), "dataset ref");
    return ref;
}

Node::Node(Repository repo, std::shared_ptr<Transport> transport)
    : repo_(std::move(repo)),
      transport_(transport ? std::move(transport) : std::make_shared<HttpTransport>()),
      catalogue_(repo_),
      federation_(repo_, *transport_) {}

std::unique_ptr<Node> Node::init(const std::filesystem::path& root, const NodeDescriptor& descriptor,
                                 std::shared_ptr<Transport> transport) {
    return std::unique_ptr<Node>(new Node(Repository::init(root, descriptor), std::move(transport)));
}

std::unique_ptr<Node> Node::open(const std::filesystem::path& root, std::shared_ptr<Transport> transport) {
    return std::unique_ptr<Node>(new Node(Repository::open(root), std::move(transport)));
}

DatasetRef Node::resolve_ref(std::string_view text, Partition partition) const {
    const DatasetRef ref = parse_ref_path(text, repo_.node().node_id);
    const auto entry = repo_.find(ref, partition);
    if (!entry) throw Error(ErrorCode::NotFound, std::string(to_string(partition)) + " has no " + ref.path());
    return entry->ref;
}

RepositoryEntry Node::collect(std::string_view bytes, ContentKind section, const std::string& local_id,
                              std::uint32_t version, std::string provenance) {
    const DatasetRef ref{repo_.node().node_id, local_id, version, section};
    return repo_.ingest_source(bytes, ref, section, std::move(provenance));
}

TransformResult Node::transform(const std::vector<DatasetRef>& sources, const TransformConfig& config) {
    if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "transform needs at least one source");
    std::vector<SourceDataset> raw;
    std::vector<DatasetRef> derived;
    for (const auto& ref : sources) {
        const auto entry = repo_.find(ref, Partition::Srep);
        if (!entry) throw Error(ErrorCode::NotFound, "SREP has no " + ref.path());
        if (entry->ref.kind != ContentKind::LowQuality) {
            throw Error(ErrorCode::InvalidArgument, ref.path() + " is not low-quality source data");
        }
        raw.push_back(parse_source(repo_.get_bytes(entry->ref, Partition::Srep), entry->ref, entry->provenance,
                                   entry->stored_at));
        derived.push_back(entry->ref);
    }
    TransformResult result;
    result.output = run_pipeline(raw, config, repo_.node());
    const auto& o = result.output;
    result.entries[0] = repo_.store_core(o.standardised, serialize_standardised(o.standardised), derived);
    result.entries[1] = repo_.store_core(o.language, serialize_language(o.language), derived);
    result.entries[2] = repo_.store_core(o.knowledge, serialize_knowledge(o.knowledge), derived);
    result.entries[3] = repo_.store_core(o.graph, serialize_graph(o.graph), derived);
    return result;
}

AnyDataset Node::load_core(const DatasetRef& ref) {
    const auto entry = repo_.find(ref, Partition::Crep);
    if (!entry) throw Error(ErrorCode::NotFound, "CREP has no " + ref.path());
    const std::string bytes = repo_.get_bytes(entry->ref, Partition::Crep);
    switch (entry->ref.kind) {
        case ContentKind::Standardised: return parse_standardised(bytes);
        case ContentKind::Language: return parse_language(bytes, entry->ref);
        case ContentKind::Knowledge: return parse_knowledge(bytes);
        case ContentKind::Graph: {
            const GraphHeader header = read_graph_header(bytes);
            const DatasetRef& k = header.composed_of.knowledge;
            std::string k_bytes;
            if (k.node_id == repo_.node().node_id) {
                k_bytes = repo_.get_bytes(k, Partition::Crep);
            } else {
                k_bytes = repo_.get_bytes({k.node_id, k.local_id, k.version, ContentKind::ExternalReference},
                                          Partition::Srep);
            }
            return parse_graph(bytes, parse_knowledge(k_bytes));
        }
        default: break;
    }
    throw Error(ErrorCode::Internal, "CREP entry with source kind " + ref.path());
}

Promotion Node::distribute(const DatasetRef& ref, const DescriptiveFields& fields, DownloadPolicy policy) {
    const auto entry = repo_.find(ref, Partition::Crep);
    if (!entry) throw Error(ErrorCode::NotFound, "CREP has no " + ref.path());
    const AnyDataset dataset = load_core(entry->ref);
    const MetadataRecord metadata =
        generate_metadata(dataset, repo_.node(), policy, fields, entry->derived_from, now_utc());
    const PeerRegistry peers = load_peers(repo_);
    return repo_.promote(entry->ref, metadata, [&](const DatasetRef& target) {
        return peers.get(target.node_id).has_value();
    });
}

}  // namespace livedata
