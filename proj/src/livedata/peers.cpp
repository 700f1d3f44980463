#include "livedata/peers.hpp"

#include "livedata/error.hpp"
#include "livedata/repository.hpp"

namespace livedata {

void PeerRegistry::add(const NodeDescriptor& peer) {
    require_valid(validate(peer), "peer descriptor");
    if (peer.node_id == own_id_) throw Error(ErrorCode::InvalidArgument, "cannot register the node itself as a peer");
    const auto it = peers_.find(peer.node_id);
    if (it != peers_.end()) {
        if (it->second == peer) return;
        throw Error(ErrorCode::Conflict,
                    "peer '" + peer.node_id + "' is registered with a different descriptor; remove it first");
    }
    peers_.emplace(peer.node_id, peer);
}

void PeerRegistry::remove(std::string_view node_id) {
    const auto it = peers_.find(node_id);
    if (it == peers_.end()) throw Error(ErrorCode::NotFound, "no peer '" + std::string(node_id) + "'");
    peers_.erase(it);
}

std::optional<NodeDescriptor> PeerRegistry::get(std::string_view node_id) const {
    const auto it = peers_.find(node_id);
    if (it == peers_.end()) return std::nullopt;
    return it->second;
}

std::vector<NodeDescriptor> PeerRegistry::list() const {
    std::vector<NodeDescriptor> out;
    for (const auto& [id, peer] : peers_) out.push_back(peer);
    return out;
}

Json PeerRegistry::to_json() const {
    Json peers = Json::array();
    for (const auto& [id, peer] : peers_) peers.push_back(livedata::to_json(peer));
    return Json{{"peers", peers}};
}

PeerRegistry PeerRegistry::from_json(std::string own_id, const Json& json) {
    PeerRegistry registry(std::move(own_id));
    if (!json.contains("peers") || !json.at("peers").is_array()) {
        throw Error(ErrorCode::Parse, "peer registry: missing 'peers' array");
    }
    for (const auto& p : json.at("peers")) registry.add(node_from_json(p));
    return registry;
}

PeerRegistry load_peers(const Repository& repo) {
    return PeerRegistry::from_json(repo.node().node_id, repo.load_state(kPeersFile, Json{{"peers", Json::array()}}));
}

std::string catalogue_url(std::string_view base_url, const DatasetRef& ref) {
    return std::string(base_url) + "/api/v1/datasets/" + ref.path();
}

}  // namespace livedata
