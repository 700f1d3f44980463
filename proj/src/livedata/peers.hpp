#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "livedata/formats.hpp"
#include "livedata/model.hpp"

namespace livedata {

class Repository;

/// Registered peer nodes. Never contains the owning node.
class PeerRegistry {
  public:
    explicit PeerRegistry(std::string own_id) : own_id_(std::move(own_id)) {}

    /// Idempotent for an identical descriptor; a different descriptor under a
    /// known id is a conflict until the old one is removed.
    void add(const NodeDescriptor& peer);
    /// Throws NotFound for an unknown id.
    void remove(std::string_view node_id);

    [[nodiscard]] std::optional<NodeDescriptor> get(std::string_view node_id) const;
    [[nodiscard]] std::vector<NodeDescriptor> list() const;
    [[nodiscard]] const std::string& own_id() const noexcept { return own_id_; }

    [[nodiscard]] Json to_json() const;
    static PeerRegistry from_json(std::string own_id, const Json& json);

  private:
    std::string own_id_;
    std::map<std::string, NodeDescriptor, std::less<>> peers_;
};

inline constexpr std::string_view kPeersFile = "peers.json";

PeerRegistry load_peers(const Repository& repo);

/// `<base_url>/api/v1/datasets/<node>/<local>/<version>`.
std::string catalogue_url(std::string_view base_url, const DatasetRef& ref);

}  // namespace livedata
