#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livedata/formats.hpp"
#include "livedata/model.hpp"

namespace livedata {

enum class Partition { Srep, Crep, Drep };

std::string_view to_string(Partition partition) noexcept;
Partition parse_partition(std::string_view text);

struct RepositoryEntry {
    DatasetRef ref;
    Partition partition = Partition::Srep;
    /// SREP only; one of the three source kinds.
    std::optional<ContentKind> srep_section;
    Timestamp stored_at{};
    std::string content_hash;
    /// DREP only.
    std::optional<MetadataRecord> metadata;
    /// Path of the stored bytes relative to the repository root.
    std::string file;
    std::string provenance;                // SREP
    std::vector<DatasetRef> derived_from;  // CREP
};

struct ListFilter {
    std::optional<ContentKind> kind;
    std::optional<std::string> category;  // DREP metadata categories
};

struct Promotion {
    RepositoryEntry entry;
    std::vector<std::string> warnings;
};

/// Filesystem-backed SREP/CREP/DREP store.
///
///   <root>/index.json            {"repo-format": 1, "entries": [...]}
///   <root>/node.json             node descriptor
///   <root>/srep/<section>/<node_id>/<file>
///   <root>/crep/<kind>/<file>
///   <root>/drep/<kind>/<file>, <local_id>.v<version>.meta.json
///
/// Every file is written to a temporary name and renamed into place. Writers
/// hold an exclusive lock on `<root>/.lock`; readers take no lock.
class Repository {
  public:
    static constexpr int kFormat = 1;

    /// Creates the layout; fails if `root` already holds a repository.
    static Repository init(const std::filesystem::path& root, const NodeDescriptor& node);
    static Repository open(const std::filesystem::path& root);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] const NodeDescriptor& node() const noexcept { return node_; }

    RepositoryEntry ingest_source(std::string_view bytes, const DatasetRef& ref, ContentKind section,
                                  std::string provenance);

    /// `bytes` must be the canonical serialization of `dataset`.
    RepositoryEntry store_core(const AnyDataset& dataset, std::string_view bytes,
                               std::vector<DatasetRef> derived_from = {});

    /// Answers whether a metadata link target can be reached; used for
    /// promotion warnings. Local targets are checked against DREP directly.
    using LinkProbe = std::function<bool(const DatasetRef&)>;
    /// Applied to the bytes on their way to DREP. The default keeps them
    /// unchanged; a hook that alters them makes promotion fail.
    using AnonymizationHook = std::function<std::string(const DatasetRef&, std::string)>;

    Promotion promote(const DatasetRef& ref, const MetadataRecord& metadata, const LinkProbe& remote = {});
    void set_anonymization_hook(AnonymizationHook hook) { anonymize_ = std::move(hook); }

    /// Sorted by (local_id, version, node_id, kind).
    [[nodiscard]] std::vector<RepositoryEntry> list(Partition partition, const ListFilter& filter = {}) const;
    /// Matches by (node_id, local_id, version); kind is ignored.
    [[nodiscard]] std::optional<RepositoryEntry> find(const DatasetRef& ref, Partition partition) const;
    /// Verifies the recorded hash before returning.
    [[nodiscard]] std::string get_bytes(const DatasetRef& ref, Partition partition) const;

    /// Empty iff every file matches its hash and DREP is a subset of CREP.
    [[nodiscard]] ValidationReport integrity_check() const;

    // Small JSON state files kept next to the index (peers, access requests).
    [[nodiscard]] Json load_state(std::string_view name, const Json& fallback) const;
    /// Runs `update` on the current state under the writer lock and persists
    /// what it returns.
    Json update_state(std::string_view name, const Json& fallback, const std::function<Json(Json)>& update);

  private:
    Repository(std::filesystem::path root, NodeDescriptor node);

    struct Index;
    Index read_index() const;
    void write_index(const Index& index) const;

    std::filesystem::path root_;
    NodeDescriptor node_;
    AnonymizationHook anonymize_;
    std::shared_ptr<std::mutex> writer_;
};

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

/// Repository root from `explicit_root`, else `$LIVEDATA_ROOT`, else error.
std::filesystem::path resolve_root(const std::string& explicit_root);

}  // namespace livedata
