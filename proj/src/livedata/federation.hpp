#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "livedata/catalogue.hpp"
#include "livedata/peers.hpp"
#include "livedata/pipeline.hpp"
#include "livedata/repository.hpp"

namespace livedata {

struct TransportResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

/// GET-only access to peer catalogues. Implementations throw
/// Error(Transient) when the peer cannot be reached.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual TransportResponse get(const std::string& url) = 0;
};

/// Routes URLs to catalogue services living in the same process.
class InProcessTransport : public Transport {
  public:
    void attach(std::string base_url, CatalogueService* service);
    void detach(const std::string& base_url);
    TransportResponse get(const std::string& url) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_; }

  private:
    std::mutex mutex_;
    std::map<std::string, CatalogueService*> services_;
    std::size_t calls_ = 0;
};

/// Real HTTP/1.1 transport.
class HttpTransport : public Transport {
  public:
    explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(10)) : timeout_(timeout) {}
    TransportResponse get(const std::string& url) override;

  private:
    std::chrono::seconds timeout_;
};

using Clock = std::function<Timestamp()>;

struct FetchedDataset {
    DatasetRef ref;  // the remote ref
    MetadataRecord metadata;
    std::string bytes;
    /// SREP copy; absent when the caller asked not to store.
    std::optional<RepositoryEntry> stored;
};

struct CrossComposition {
    GraphDataset graph;
    MetadataRecord metadata;
    RepositoryEntry entry;  // CREP
};

/// Peer registry plus cross-node operations for one node.
class Federation {
  public:
    static constexpr std::chrono::seconds kDefaultTtl{300};

    Federation(Repository& repo, Transport& transport, Clock clock = now_utc,
               std::chrono::seconds ttl = kDefaultTtl);

    void add_peer(const NodeDescriptor& peer);
    void remove_peer(const std::string& node_id);
    [[nodiscard]] std::vector<NodeDescriptor> peers() const;
    [[nodiscard]] std::optional<NodeDescriptor> peer(const std::string& node_id) const;

    /// Local refs come from DREP; remote refs from the owning peer's detail
    /// endpoint, cached for the TTL.
    MetadataRecord resolve_link(const DatasetRef& ref);

    /// Downloads a remote dataset, verifies it against the advertised hash
    /// and stores it in the SREP section matching its kind.
    FetchedDataset fetch_remote_dataset(const DatasetRef& ref, const std::optional<std::string>& token = {},
                                        bool store = true);

    /// Runs a search on one peer and returns its JSON result page.
    Json search_peer(const std::string& node_id, const SearchQuery& query);

    /// Composes a local graph from local S and remote K and L, and stores it in
    /// CREP. Remote inputs are fetched unless SREP already holds them.
    CrossComposition cross_node_compose(const DatasetRef& standardised, const DatasetRef& knowledge,
                                        const DatasetRef& language, const DescriptiveFields& fields,
                                        DownloadPolicy policy, std::optional<std::string> graph_local_id = {});

    /// SREP section used for a fetched dataset of `kind`.
    static ContentKind section_for(ContentKind kind) noexcept;

  private:
    struct CacheEntry {
        MetadataRecord record;
        Timestamp cached_at;
    };

    NodeDescriptor require_peer(const std::string& node_id) const;
    std::string fetched_bytes(const DatasetRef& ref);

    Repository& repo_;
    Transport& transport_;
    Clock clock_;
    std::chrono::seconds ttl_;
    mutable std::mutex mutex_;
    std::map<std::string, CacheEntry> cache_;
};

}  // namespace livedata
