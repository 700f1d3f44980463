#include "livedata/repository.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "livedata/error.hpp"

namespace livedata {

namespace fs = std::filesystem;

namespace {

constexpr const char* kIndex = "index.json";
constexpr const char* kNode = "node.json";
constexpr const char* kLock = ".lock";

/// Exclusive writer lock: an in-process mutex plus flock(2) across processes.
class WriterLock {
  public:
    WriterLock(const fs::path& root, std::mutex& mutex) : guard_(mutex) {
        const auto path = (root / kLock).string();
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open lock file " + path);
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw Error(ErrorCode::Io, "cannot lock " + path);
        }
    }
    ~WriterLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    WriterLock(const WriterLock&) = delete;
    WriterLock& operator=(const WriterLock&) = delete;

  private:
    std::lock_guard<std::mutex> guard_;
    int fd_ = -1;
};

bool same_identity(const DatasetRef& a, const DatasetRef& b) { return a.same_identity(b); }

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

std::string meta_file_name(const DatasetRef& ref) {
    return ref.local_id + ".v" + std::to_string(ref.version) + ".meta.json";
}

Json entry_to_json(const RepositoryEntry& e, const std::string& metadata_file) {
    Json j;
    j["partition"] = std::string(to_string(e.partition));
    j["ref"] = to_json(e.ref);
    if (e.srep_section) j["section"] = std::string(to_string(*e.srep_section));
    j["stored_at"] = format_timestamp(e.stored_at);
    j["content_hash"] = e.content_hash;
    j["file"] = e.file;
    if (!metadata_file.empty()) j["metadata_file"] = metadata_file;
    if (!e.provenance.empty()) j["provenance"] = e.provenance;
    if (!e.derived_from.empty()) {
        Json refs = Json::array();
        for (const auto& r : e.derived_from) refs.push_back(to_json(r));
        j["derived_from"] = refs;
    }
    return j;
}

}  // namespace

std::string_view to_string(Partition partition) noexcept {
    switch (partition) {
        case Partition::Srep: return "srep";
        case Partition::Crep: return "crep";
        case Partition::Drep: return "drep";
    }
    return "srep";
}

Partition parse_partition(std::string_view text) {
    const std::string lower = to_lower_ascii(text);
    for (auto p : {Partition::Srep, Partition::Crep, Partition::Drep}) {
        if (to_string(p) == lower) return p;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown partition '" + std::string(text) + "'");
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + path.parent_path().string() + ": " + ec.message());
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp-" + random_hex(6));
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
    std::size_t written = 0;
    while (written < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            ::close(fd);
            fs::remove(tmp, ec);
            throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot rename into " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path resolve_root(const std::string& explicit_root) {
    if (!explicit_root.empty()) return explicit_root;
    if (const char* env = std::getenv("LIVEDATA_ROOT"); env != nullptr && *env != '\0') return env;
    throw Error(ErrorCode::InvalidArgument, "no repository root: pass --root or set LIVEDATA_ROOT");
}

// ---------------------------------------------------------------------------

struct Repository::Index {
    struct Item {
        RepositoryEntry entry;
        std::string metadata_file;
    };
    std::vector<Item> items;

    Item* find(const DatasetRef& ref, Partition partition) {
        for (auto& item : items) {
            if (item.entry.partition == partition && same_identity(item.entry.ref, ref)) return &item;
        }
        return nullptr;
    }
};

Repository::Repository(fs::path root, NodeDescriptor node)
    : root_(std::move(root)),
      node_(std::move(node)),
      anonymize_([](const DatasetRef&, std::string bytes) { return bytes; }),
      writer_(std::make_shared<std::mutex>()) {}

Repository Repository::init(const fs::path& root, const NodeDescriptor& node) {
    require_valid(validate(node), "node descriptor");
    if (fs::exists(root / kIndex)) {
        throw Error(ErrorCode::Conflict, "a repository already exists at " + root.string());
    }
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + root.string() + ": " + ec.message());
    for (auto kind : {ContentKind::LowQuality, ContentKind::ExternalLanguage, ContentKind::ExternalReference}) {
        fs::create_directories(root / "srep" / std::string(to_string(kind)));
    }
    for (auto kind : {ContentKind::Standardised, ContentKind::Language, ContentKind::Knowledge, ContentKind::Graph}) {
        fs::create_directories(root / "crep" / std::string(to_string(kind)));
        fs::create_directories(root / "drep" / std::string(to_string(kind)));
    }
    Repository repo(root, node);
    WriterLock lock(root, *repo.writer_);
    write_file_atomic(root / kNode, dump(to_json(node)));
    repo.write_index(Index{});
    return repo;
}

Repository Repository::open(const fs::path& root) {
    if (!fs::exists(root / kIndex)) {
        throw Error(ErrorCode::NotFound, "no repository at " + root.string() + " (run init first)");
    }
    const NodeDescriptor node = node_from_json(parse_json(read_file(root / kNode), "node.json"));
    require_valid(validate(node), "node descriptor");
    Repository repo(root, node);
    repo.read_index();
    return repo;
}

Repository::Index Repository::read_index() const {
    const Json json = parse_json(read_file(root_ / kIndex), kIndex);
    if (!json.contains("repo-format") || json.at("repo-format") != kFormat) {
        throw Error(ErrorCode::Io, "unsupported repository format at " + root_.string());
    }
    Index index;
    try {
        for (const auto& j : json.at("entries")) {
            Index::Item item;
            auto& e = item.entry;
            e.partition = parse_partition(j.at("partition").get<std::string>());
            e.ref = ref_from_json(j.at("ref"));
            if (j.contains("section")) e.srep_section = parse_content_kind(j.at("section").get<std::string>());
            e.stored_at = parse_timestamp(j.at("stored_at").get<std::string>());
            e.content_hash = j.at("content_hash").get<std::string>();
            e.file = j.at("file").get<std::string>();
            if (j.contains("metadata_file")) item.metadata_file = j.at("metadata_file").get<std::string>();
            if (j.contains("provenance")) e.provenance = j.at("provenance").get<std::string>();
            if (j.contains("derived_from")) {
                for (const auto& r : j.at("derived_from")) e.derived_from.push_back(ref_from_json(r));
            }
            index.items.push_back(std::move(item));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("corrupt repository index: ") + e.what());
    }
    return index;
}

void Repository::write_index(const Index& index) const {
    Json json;
    json["repo-format"] = kFormat;
    Json entries = Json::array();
    for (const auto& item : index.items) entries.push_back(entry_to_json(item.entry, item.metadata_file));
    json["entries"] = entries;
    write_file_atomic(root_ / kIndex, dump(json));
}

RepositoryEntry Repository::ingest_source(std::string_view bytes, const DatasetRef& ref, ContentKind section,
                                          std::string provenance) {
    require_valid(validate(ref), "dataset ref");
    if (!is_source(section)) {
        throw Error(ErrorCode::InvalidArgument, "'" + std::string(to_string(section)) + "' is not an SREP section");
    }
    if (ref.kind != section) {
        throw Error(ErrorCode::InvalidArgument, "ref kind " + std::string(to_string(ref.kind)) +
                                                    " does not match SREP section " +
                                                    std::string(to_string(section)));
    }
    WriterLock lock(root_, *writer_);
    Index index = read_index();
    if (index.find(ref, Partition::Srep)) {
        throw Error(ErrorCode::Conflict, "SREP already holds " + ref.path() + " (versions are immutable)");
    }
    RepositoryEntry entry;
    entry.ref = ref;
    entry.partition = Partition::Srep;
    entry.srep_section = section;
    entry.stored_at = now_utc();
    entry.content_hash = sha256_hex(bytes);
    entry.file = (fs::path("srep") / std::string(to_string(section)) / ref.node_id / file_name(ref)).string();
    entry.provenance = std::move(provenance);
    write_file_atomic(root_ / entry.file, bytes);
    index.items.push_back({entry, {}});
    write_index(index);
    return entry;
}

RepositoryEntry Repository::store_core(const AnyDataset& dataset, std::string_view bytes,
                                       std::vector<DatasetRef> derived_from) {
    const DatasetRef& ref = ref_of(dataset);
    if (ref.node_id != node_.node_id) {
        throw Error(ErrorCode::InvalidArgument,
                    "CREP holds this node's content only; " + ref.path() + " belongs to " + ref.node_id);
    }
    const std::string canonical = serialize(dataset);  // validates
    const std::string hash = sha256_hex(canonical);
    if (sha256_hex(bytes) != hash) {
        throw Error(ErrorCode::Integrity, "bytes for " + ref.path() + " are not its canonical serialization");
    }
    for (const auto& r : derived_from) {
        if (!is_source(r.kind)) throw Error(ErrorCode::InvalidArgument, "derived_from must name SREP content");
    }
    std::sort(derived_from.begin(), derived_from.end());
    WriterLock lock(root_, *writer_);
    Index index = read_index();
    if (index.find(ref, Partition::Crep)) {
        throw Error(ErrorCode::Conflict, "CREP already holds " + ref.path() + " (versions are immutable)");
    }
    RepositoryEntry entry;
    entry.ref = ref;
    entry.partition = Partition::Crep;
    entry.stored_at = now_utc();
    entry.content_hash = hash;
    entry.file = (fs::path("crep") / std::string(to_string(ref.kind)) / file_name(ref)).string();
    entry.derived_from = std::move(derived_from);
    write_file_atomic(root_ / entry.file, bytes);
    index.items.push_back({entry, {}});
    write_index(index);
    return entry;
}

Promotion Repository::promote(const DatasetRef& ref, const MetadataRecord& metadata, const LinkProbe& remote) {
    require_valid(validate(metadata), "metadata record " + metadata.ref.path());
    if (metadata.ref != ref) {
        throw Error(ErrorCode::InvalidArgument,
                    "metadata describes " + metadata.ref.path() + ", not " + ref.path());
    }
    WriterLock lock(root_, *writer_);
    Index index = read_index();
    const Index::Item* core = index.find(ref, Partition::Crep);
    if (core == nullptr) throw Error(ErrorCode::NotFound, "CREP has no " + ref.path());
    if (core->entry.ref.kind != ref.kind) {
        throw Error(ErrorCode::InvalidArgument, ref.path() + " is stored as " +
                                                    std::string(to_string(core->entry.ref.kind)));
    }
    if (metadata.content_hash != core->entry.content_hash) {
        throw Error(ErrorCode::Integrity, "metadata content_hash does not match CREP " + ref.path());
    }
    if (index.find(ref, Partition::Drep)) {
        throw Error(ErrorCode::Conflict, "DREP already holds " + ref.path() + " (versions are immutable)");
    }
    std::string bytes = read_file(root_ / core->entry.file);
    if (sha256_hex(bytes) != core->entry.content_hash) {
        throw Error(ErrorCode::Integrity, "CREP copy of " + ref.path() + " is corrupt");
    }
    bytes = anonymize_(ref, std::move(bytes));
    if (sha256_hex(bytes) != core->entry.content_hash) {
        throw Error(ErrorCode::Integrity, "anonymization hook altered " + ref.path());
    }

    Promotion out;
    for (const auto* links : {&metadata.links.composed_of, &metadata.links.uses_language}) {
        for (const auto& target : *links) {
            if (target.node_id == node_.node_id) {
                if (!index.find(target, Partition::Drep)) {
                    out.warnings.push_back("link target " + target.path() + " is not distributed");
                }
            } else if (!remote || !remote(target)) {
                out.warnings.push_back("link target " + target.path() + " is not resolvable from this node");
            }
        }
    }

    RepositoryEntry entry;
    entry.ref = ref;
    entry.partition = Partition::Drep;
    entry.stored_at = now_utc();
    entry.content_hash = core->entry.content_hash;
    entry.derived_from = core->entry.derived_from;
    entry.metadata = metadata;
    const fs::path dir = fs::path("drep") / std::string(to_string(ref.kind));
    entry.file = (dir / file_name(ref)).string();
    const std::string metadata_file = (dir / meta_file_name(ref)).string();
    write_file_atomic(root_ / entry.file, bytes);
    write_file_atomic(root_ / metadata_file, serialize_metadata(metadata));
    index.items.push_back({entry, metadata_file});
    write_index(index);
    out.entry = std::move(entry);
    return out;
}

std::vector<RepositoryEntry> Repository::list(Partition partition, const ListFilter& filter) const {
    const Index index = read_index();
    std::vector<RepositoryEntry> out;
    for (const auto& item : index.items) {
        const auto& e = item.entry;
        if (e.partition != partition) continue;
        if (filter.kind && e.ref.kind != *filter.kind) continue;
        RepositoryEntry copy = e;
        if (!item.metadata_file.empty()) copy.metadata = parse_metadata(read_file(root_ / item.metadata_file));
        if (filter.category) {
            if (!copy.metadata || !copy.metadata->categories.count(*filter.category)) continue;
        }
        out.push_back(std::move(copy));
    }
    std::sort(out.begin(), out.end(), [](const RepositoryEntry& a, const RepositoryEntry& b) {
        return std::tie(a.ref.local_id, a.ref.version, a.ref.node_id, a.ref.kind) <
               std::tie(b.ref.local_id, b.ref.version, b.ref.node_id, b.ref.kind);
    });
    return out;
}

std::optional<RepositoryEntry> Repository::find(const DatasetRef& ref, Partition partition) const {
    Index index = read_index();
    const Index::Item* item = index.find(ref, partition);
    if (item == nullptr) return std::nullopt;
    RepositoryEntry out = item->entry;
    if (!item->metadata_file.empty()) out.metadata = parse_metadata(read_file(root_ / item->metadata_file));
    return out;
}

std::string Repository::get_bytes(const DatasetRef& ref, Partition partition) const {
    Index index = read_index();
    const Index::Item* item = index.find(ref, partition);
    if (item == nullptr) {
        throw Error(ErrorCode::NotFound, std::string(to_string(partition)) + " has no " + ref.path());
    }
    std::string bytes;
    try {
        bytes = read_file(root_ / item->entry.file);
    } catch (const Error&) {
        throw Error(ErrorCode::Integrity, "stored file for " + ref.path() + " is missing");
    }
    if (sha256_hex(bytes) != item->entry.content_hash) {
        throw Error(ErrorCode::Integrity, "stored bytes for " + ref.path() + " do not match their hash (corrupt)");
    }
    return bytes;
}

ValidationReport Repository::integrity_check() const {
    ValidationReport out;
    Index index = read_index();
    auto file_ok = [&](const Index::Item& item) {
        const fs::path path = root_ / item.entry.file;
        const std::string where = std::string(to_string(item.entry.partition)) + " " + item.entry.ref.path();
        if (!fs::exists(path)) {
            out.push_back({"repository.missing_file", where + ": " + item.entry.file});
            return false;
        }
        if (sha256_hex(read_file(path)) != item.entry.content_hash) {
            out.push_back({"repository.hash_mismatch", where + ": " + item.entry.file});
            return false;
        }
        return true;
    };
    std::vector<bool> healthy;
    for (const auto& item : index.items) healthy.push_back(file_ok(item));

    for (std::size_t i = 0; i < index.items.size(); ++i) {
        const auto& item = index.items[i];
        if (item.entry.partition != Partition::Drep) continue;
        const std::string where = "drep " + item.entry.ref.path();
        bool counterpart = false;
        for (std::size_t j = 0; j < index.items.size(); ++j) {
            const auto& other = index.items[j];
            if (other.entry.partition == Partition::Crep && other.entry.ref == item.entry.ref &&
                other.entry.content_hash == item.entry.content_hash && healthy[j]) {
                counterpart = true;
            }
        }
        if (!counterpart) out.push_back({"repository.drep_not_in_crep", where});
        if (item.metadata_file.empty() || !fs::exists(root_ / item.metadata_file)) {
            out.push_back({"repository.metadata_missing", where});
            continue;
        }
        try {
            const MetadataRecord m = parse_metadata(read_file(root_ / item.metadata_file));
            if (m.ref != item.entry.ref || m.content_hash != item.entry.content_hash) {
                out.push_back({"repository.metadata_mismatch", where});
            }
        } catch (const Error& e) {
            out.push_back({"repository.metadata_invalid", where + ": " + e.what()});
        }
    }
    return out;
}

Json Repository::load_state(std::string_view name, const Json& fallback) const {
    const fs::path path = root_ / std::string(name);
    if (!fs::exists(path)) return fallback;
    return parse_json(read_file(path), name);
}

Json Repository::update_state(std::string_view name, const Json& fallback,
                              const std::function<Json(Json)>& update) {
    WriterLock lock(root_, *writer_);
    Json next = update(load_state(name, fallback));
    write_file_atomic(root_ / std::string(name), dump(next));
    return next;
}

}  // namespace livedata
