#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "livedata/catalogue.hpp"
#include "livedata/federation.hpp"
#include "livedata/pipeline.hpp"
#include "livedata/repository.hpp"

namespace livedata {

struct TransformResult {
    PipelineOutput output;
    /// CREP entries in the order S, L, K, G.
    std::array<RepositoryEntry, 4> entries;
};

/// One LiveData node: repository, catalogue and federation wired together.
/// This is the surface the C API and the CLI drive.
class Node {
  public:
    /// `transport` defaults to real HTTP; tests pass an in-process one.
    static std::unique_ptr<Node> init(const std::filesystem::path& root, const NodeDescriptor& descriptor,
                                      std::shared_ptr<Transport> transport = nullptr);
    static std::unique_ptr<Node> open(const std::filesystem::path& root,
                                      std::shared_ptr<Transport> transport = nullptr);

    [[nodiscard]] const NodeDescriptor& descriptor() const noexcept { return repo_.node(); }
    [[nodiscard]] Repository& repository() noexcept { return repo_; }
    [[nodiscard]] CatalogueService& catalogue() noexcept { return catalogue_; }
    [[nodiscard]] Federation& federation() noexcept { return federation_; }

    /// Collection service: stores a file in SREP under this node's id.
    RepositoryEntry collect(std::string_view bytes, ContentKind section, const std::string& local_id,
                            std::uint32_t version, std::string provenance);

    /// Transformation service: runs the pipeline over SREP low-quality sources
    /// and stores S, L, K and G in CREP.
    TransformResult transform(const std::vector<DatasetRef>& sources, const TransformConfig& config);

    /// Distribution service: generates metadata and promotes a CREP dataset.
    Promotion distribute(const DatasetRef& ref, const DescriptiveFields& fields, DownloadPolicy policy);

    /// Parses a CREP dataset. Graphs are parsed against their knowledge
    /// dataset, found in CREP or among fetched SREP copies.
    AnyDataset load_core(const DatasetRef& ref);

    /// `node/local/version` or `local/version` (this node). The kind is taken
    /// from the matching entry in `partition`.
    DatasetRef resolve_ref(std::string_view text, Partition partition) const;

  private:
    Node(Repository repo, std::shared_ptr<Transport> transport);

    Repository repo_;
    std::shared_ptr<Transport> transport_;
    CatalogueService catalogue_;
    Federation federation_;
};

/// Parses `node/local/version` or `local/version`; kind is left at its default.
DatasetRef parse_ref_path(std::string_view text, const std::string& default_node);

}  // namespace livedata
