#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "fogpon/catalog.hpp"
#include "fogpon/common.hpp"

namespace fogpon {

enum class NodeRole {
    UdSource,
    UdProcessing,
    ApSource,
    ApProcessing,
    Onu,
    Rfs,
    Bfs,
    Cfs,
    Mfs,
    Ccs,
    Olt,
    EthernetSwitch,
    AggregationSwitch,
    EdgeRouter,
    OpticalSwitch,
    CoreRouter,
    AwgPassive,
    BackplanePassive,
};

inline const std::map<NodeRole, std::string>& role_names() {
    static const std::map<NodeRole, std::string> names = {
        {NodeRole::UdSource, "ud-source"},
        {NodeRole::UdProcessing, "ud-processing"},
        {NodeRole::ApSource, "ap-source"},
        {NodeRole::ApProcessing, "ap-processing"},
        {NodeRole::Onu, "onu"},
        {NodeRole::Rfs, "rfs"},
        {NodeRole::Bfs, "bfs"},
        {NodeRole::Cfs, "cfs"},
        {NodeRole::Mfs, "mfs"},
        {NodeRole::Ccs, "ccs"},
        {NodeRole::Olt, "olt"},
        {NodeRole::EthernetSwitch, "ethernet-switch"},
        {NodeRole::AggregationSwitch, "aggregation-switch"},
        {NodeRole::EdgeRouter, "edge-router"},
        {NodeRole::OpticalSwitch, "optical-switch"},
        {NodeRole::CoreRouter, "core-router"},
        {NodeRole::AwgPassive, "awg-passive"},
        {NodeRole::BackplanePassive, "backplane-passive"},
    };
    return names;
}

inline std::string to_string(NodeRole r) { return role_names().at(r); }

inline NodeRole role_from_string(const std::string& s) {
    for (const auto& [role, name] : role_names()) {
        if (name == s) return role;
    }
    throw ConfigError("unknown node role '" + s + "'");
}

/// Processing hierarchy members (the set P of placement candidates).
inline bool is_processing_role(NodeRole r) {
    switch (r) {
        case NodeRole::UdProcessing:
        case NodeRole::Rfs:
        case NodeRole::Bfs:
        case NodeRole::Cfs:
        case NodeRole::Mfs:
        case NodeRole::Ccs:
            return true;
        default:
            return false;
    }
}

/// Powered aggregation devices (the set Q). The OLT transits traffic but
/// carries no catalog power profile, so it is excluded here.
inline bool is_q_role(NodeRole r) {
    switch (r) {
        case NodeRole::EthernetSwitch:
        case NodeRole::AggregationSwitch:
        case NodeRole::EdgeRouter:
        case NodeRole::OpticalSwitch:
        case NodeRole::CoreRouter:
            return true;
        default:
            return false;
    }
}

inline bool is_transit_only_role(NodeRole r) {
    return r == NodeRole::AwgPassive || r == NodeRole::BackplanePassive ||
           r == NodeRole::Olt;
}

enum class LinkMedium { VlcDownlink, VlcUplink, Backplane, FiberP2p, FiberAwg, Copper };

inline const std::map<LinkMedium, std::string>& medium_names() {
    static const std::map<LinkMedium, std::string> names = {
        {LinkMedium::VlcDownlink, "vlc-downlink"},
        {LinkMedium::VlcUplink, "vlc-uplink"},
        {LinkMedium::Backplane, "backplane"},
        {LinkMedium::FiberP2p, "fiber-p2p"},
        {LinkMedium::FiberAwg, "fiber-awg"},
        {LinkMedium::Copper, "copper"},
    };
    return names;
}

inline std::string to_string(LinkMedium m) { return medium_names().at(m); }

inline LinkMedium medium_from_string(const std::string& s) {
    for (const auto& [medium, name] : medium_names()) {
        if (name == s) return medium;
    }
    throw ConfigError("unknown link medium '" + s + "'");
}

struct Node {
    std::string id;
    NodeRole role = NodeRole::UdSource;
    std::optional<int> room;
    std::optional<int> group;
    std::optional<WavelengthClass> wavelength;
    bool is_relay = false;
    std::string profile; // catalog class id; empty for unpowered nodes
};

/// Directed link record; links are created in symmetric pairs.
struct Link {
    int from = -1;
    int to = -1;
    double capacity_gbps = 0;
    LinkMedium medium = LinkMedium::Copper;
};

struct Topology {
    std::vector<Node> nodes;
    std::vector<Link> links;

    int index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw ConfigError("unknown node '" + id + "'");
        return it->second;
    }
    bool has_node(const std::string& id) const { return index_.count(id) != 0; }

    const Node& node(const std::string& id) const { return nodes[index_of(id)]; }

    int add_node(Node n) {
        if (index_.count(n.id)) throw ConfigError("duplicate node id '" + n.id + "'");
        index_[n.id] = static_cast<int>(nodes.size());
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    /// Adds the (a,b) and (b,a) records with equal capacity.
    void add_bilink(int a, int b, double capacity_gbps, LinkMedium medium) {
        links.push_back({a, b, capacity_gbps, medium});
        links.push_back({b, a, capacity_gbps, medium});
    }
    void add_bilink(int a, int b, double capacity_gbps, LinkMedium fwd, LinkMedium rev) {
        links.push_back({a, b, capacity_gbps, fwd});
        links.push_back({b, a, capacity_gbps, rev});
    }

    /// N_m: link-adjacent node indices, in link order, deduplicated.
    std::vector<int> neighbors(int m) const {
        std::vector<int> out;
        for (const auto& l : links) {
            if (l.from == m && std::find(out.begin(), out.end(), l.to) == out.end()) {
                out.push_back(l.to);
            }
        }
        return out;
    }
    std::vector<int> neighbors(const std::string& id) const { return neighbors(index_of(id)); }

    std::vector<int> nodes_with_role(NodeRole r) const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
            if (nodes[i].role == r) out.push_back(i);
        }
        return out;
    }

    std::vector<int> processing_nodes() const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
            if (is_processing_role(nodes[i].role)) out.push_back(i);
        }
        return out;
    }

    std::vector<int> source_uds() const { return nodes_with_role(NodeRole::UdSource); }

private:
    std::unordered_map<std::string, int> index_;
};

/// Default link capacities; zero fields fall back to the relevant catalog
/// profile capacity (VLC to the access point's rate, ONU tail to the ONU
/// rate).
struct CapacityPolicy {
    double vlc_gbps = 0;
    double backplane_gbps = 40;
    double interroom_gbps = 10;
    double onu_gbps = 0;
    double upstream_gbps = 40;
};

/// Placement of one user device: room and group select the canonical
/// access point (relay AP for sources, the group's other AP for
/// processing devices); ap_id overrides the attachment explicitly.
struct UdPlacement {
    int room = 1;
    int group = 1;
    std::string ap_id;
};

struct PlacementMap {
    std::vector<UdPlacement> sources;
    std::vector<UdPlacement> processors;
};

namespace detail {

inline std::string ap_profile(WavelengthClass w) {
    switch (w) {
        case WavelengthClass::Red: return "AP-red";
        case WavelengthClass::Yellow: return "AP-yellow";
        case WavelengthClass::Green: return "AP-green";
        case WavelengthClass::Blue: return "AP-blue";
    }
    return "";
}

inline WavelengthClass group_wavelength(int group) {
    switch (group) {
        case 1: return WavelengthClass::Red;
        case 2: return WavelengthClass::Yellow;
        case 3: return WavelengthClass::Green;
        default: return WavelengthClass::Blue;
    }
}

} // namespace detail

/// Builds the in-building point-to-point PON graph: per room, eight access
/// points in four wavelength groups plus the room fog server behind its
/// ONU, all on a passive backplane; one relay AP per group holding the
/// group's external fiber; an AWG aggregating room uplinks into the OLT;
/// and the upstream chain to campus, metro and cloud processing.
///
/// Inter-room relay wiring is table-driven by room count: with one room
/// all four relays run to the AWG; with two rooms groups 1-2 uplink and
/// groups 3/4 cross-link to the peer room; with four rooms group 1
/// uplinks, group 2 pairs with the room two away, and group 3 pairs with
/// the next room's group 4. Other room counts are rejected.
inline Topology build_p2p_pon(int rooms, const PlacementMap& placement,
                              const Catalog& catalog,
                              const CapacityPolicy& caps = {}) {
    if (rooms < 1) throw ConfigError("build_p2p_pon: rooms must be >= 1");
    if (rooms != 1 && rooms != 2 && rooms != 4) {
        throw ConfigError("build_p2p_pon: no relay connectivity defined for " +
                          std::to_string(rooms) + " rooms (supported: 1, 2, 4)");
    }
    Topology t;
    const double onu_cap = caps.onu_gbps > 0 ? caps.onu_gbps : catalog.at("ONU").capacity;

    std::vector<std::vector<std::array<int, 2>>> ap(rooms + 1,
                                                    std::vector<std::array<int, 2>>(5));
    std::vector<int> bp(rooms + 1), onu(rooms + 1), rfs(rooms + 1);

    for (int r = 1; r <= rooms; ++r) {
        const std::string rp = "r" + std::to_string(r);
        for (int g = 1; g <= 4; ++g) {
            const WavelengthClass w = detail::group_wavelength(g);
            for (int k = 1; k <= 2; ++k) {
                Node n;
                n.id = rp + ".g" + std::to_string(g) + ".ap" + std::to_string(k);
                n.role = k == 1 ? NodeRole::ApSource : NodeRole::ApProcessing;
                n.room = r;
                n.group = g;
                n.wavelength = w;
                n.is_relay = (k == 1); // lower-indexed AP holds the external fiber
                n.profile = detail::ap_profile(w);
                ap[r][g][k - 1] = t.add_node(std::move(n));
            }
        }
        rfs[r] = t.add_node({rp + ".rfs", NodeRole::Rfs, r, {}, {}, false, "RFS"});
        onu[r] = t.add_node({rp + ".onu", NodeRole::Onu, r, {}, {}, false, "ONU"});
        bp[r] = t.add_node({rp + ".bp", NodeRole::BackplanePassive, r, {}, {}, false, ""});
        for (int g = 1; g <= 4; ++g) {
            for (int k = 0; k < 2; ++k) {
                t.add_bilink(ap[r][g][k], bp[r], caps.backplane_gbps, LinkMedium::Backplane);
            }
        }
        t.add_bilink(onu[r], bp[r], onu_cap, LinkMedium::Backplane);
        t.add_bilink(rfs[r], onu[r], onu_cap, LinkMedium::Copper);
    }

    const int awg = t.add_node({"awg", NodeRole::AwgPassive, {}, {}, {}, false, ""});
    const int olt = t.add_node({"olt", NodeRole::Olt, {}, {}, {}, false, ""});
    const int ethsw = t.add_node(
        {"eth-sw", NodeRole::EthernetSwitch, {}, {}, {}, false, "ethernet-switch"});
    const int cfs = t.add_node({"cfs", NodeRole::Cfs, {}, {}, {}, false, "CFS"});
    const int aggsw = t.add_node(
        {"agg-sw", NodeRole::AggregationSwitch, {}, {}, {}, false, "aggregation-switch"});
    const int edger =
        t.add_node({"edge-r", NodeRole::EdgeRouter, {}, {}, {}, false, "edge-router"});
    const int mfs = t.add_node({"mfs", NodeRole::Mfs, {}, {}, {}, false, "MFS"});
    const int optsw =
        t.add_node({"opt-sw", NodeRole::OpticalSwitch, {}, {}, {}, false, "optical-switch"});
    const int corer =
        t.add_node({"core-r", NodeRole::CoreRouter, {}, {}, {}, false, "core-router"});
    const int ccs = t.add_node({"ccs", NodeRole::Ccs, {}, {}, {}, false, "CCS"});

    // Relay wiring per the room-count connectivity table.
    auto uplink = [&](int r, int g) {
        t.add_bilink(ap[r][g][0], awg, caps.interroom_gbps, LinkMedium::FiberAwg);
    };
    auto cross = [&](int ra, int ga, int rb, int gb) {
        t.add_bilink(ap[ra][ga][0], ap[rb][gb][0], caps.interroom_gbps, LinkMedium::FiberP2p);
    };
    if (rooms == 1) {
        for (int g = 1; g <= 4; ++g) uplink(1, g);
    } else if (rooms == 2) {
        for (int r = 1; r <= 2; ++r) {
            uplink(r, 1);
            uplink(r, 2);
        }
        cross(1, 3, 2, 4);
        cross(2, 3, 1, 4);
    } else { // rooms == 4
        for (int r = 1; r <= 4; ++r) uplink(r, 1);
        cross(1, 2, 3, 2);
        cross(2, 2, 4, 2);
        for (int r = 1; r <= 4; ++r) {
            cross(r, 3, r % 4 + 1, 4);
        }
    }

    t.add_bilink(awg, olt, caps.upstream_gbps, LinkMedium::FiberAwg);
    t.add_bilink(olt, ethsw, caps.upstream_gbps, LinkMedium::Copper);
    t.add_bilink(ethsw, cfs, caps.upstream_gbps, LinkMedium::Copper);
    t.add_bilink(olt, aggsw, caps.upstream_gbps, LinkMedium::Copper);
    t.add_bilink(aggsw, edger, caps.upstream_gbps, LinkMedium::Copper);
    t.add_bilink(edger, mfs, caps.upstream_gbps, LinkMedium::Copper);
    t.add_bilink(edger, optsw, caps.upstream_gbps, LinkMedium::FiberP2p);
    t.add_bilink(optsw, corer, caps.upstream_gbps, LinkMedium::FiberP2p);
    t.add_bilink(corer, ccs, caps.upstream_gbps, LinkMedium::Copper);

    auto attach_ud = [&](const UdPlacement& p, bool processing, int seq) {
        int ap_idx;
        if (!p.ap_id.empty()) {
            ap_idx = t.index_of(p.ap_id);
        } else {
            if (p.room < 1 || p.room > rooms) {
                throw ConfigError("placement: room " + std::to_string(p.room) +
                                  " does not exist (rooms=" + std::to_string(rooms) + ")");
            }
            if (p.group < 1 || p.group > 4) {
                throw ConfigError("placement: group " + std::to_string(p.group) +
                                  " does not exist");
            }
            // Sources attach to the group's relay AP, processing devices to
            // the group's other AP.
            ap_idx = ap[p.room][p.group][processing ? 1 : 0];
        }
        const Node& apn = t.nodes[ap_idx];
        if (apn.role != NodeRole::ApSource && apn.role != NodeRole::ApProcessing) {
            throw ConfigError("placement: node '" + apn.id + "' is not an access point");
        }
        double vlc = caps.vlc_gbps;
        if (vlc <= 0 && !apn.profile.empty()) vlc = catalog.at(apn.profile).capacity;
        if (vlc <= 0) vlc = 2.5;
        Node u;
        u.id = (processing ? "pud" : "ud") + std::to_string(seq);
        u.role = processing ? NodeRole::UdProcessing : NodeRole::UdSource;
        u.room = apn.room;
        u.group = apn.group;
        u.profile = processing ? "UD" : "";
        const int ud = t.add_node(std::move(u));
        t.add_bilink(ud, ap_idx, vlc, LinkMedium::VlcUplink, LinkMedium::VlcDownlink);
        return ud;
    };

    int seq = 1;
    for (const auto& p : placement.sources) attach_ud(p, false, seq++);
    seq = 1;
    for (const auto& p : placement.processors) attach_ud(p, true, seq++);
    return t;
}

/// Invariant check; returns one message per violation (empty = valid).
inline std::vector<std::string> validate(const Topology& t) {
    std::vector<std::string> out;
    const int n = static_cast<int>(t.nodes.size());

    std::map<std::pair<int, int>, double> cap;
    for (std::size_t i = 0; i < t.links.size(); ++i) {
        const auto& l = t.links[i];
        if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n) {
            out.push_back("link " + std::to_string(i) + ": endpoint out of range");
            continue;
        }
        if (l.from == l.to) {
            out.push_back("link " + std::to_string(i) + ": self loop at '" +
                          t.nodes[l.from].id + "'");
        }
        if (l.capacity_gbps <= 0) {
            out.push_back("link " + t.nodes[l.from].id + "->" + t.nodes[l.to].id +
                          ": capacity must be > 0");
        }
        cap[{l.from, l.to}] = l.capacity_gbps;
    }
    for (const auto& [key, c] : cap) {
        auto rev = cap.find({key.second, key.first});
        if (rev == cap.end()) {
            out.push_back("link " + t.nodes[key.first].id + "->" + t.nodes[key.second].id +
                          ": missing reverse link");
        } else if (rev->second != c) {
            out.push_back("link " + t.nodes[key.first].id + "->" + t.nodes[key.second].id +
                          ": asymmetric capacity");
        }
    }

    // Relay uniqueness per (room, group) and room layout, for nodes that
    // carry room annotations.
    std::map<std::pair<int, int>, int> relays;
    std::map<std::pair<int, int>, int> group_aps;
    std::map<int, int> room_rfs;
    for (const auto& nd : t.nodes) {
        if ((nd.role == NodeRole::ApSource || nd.role == NodeRole::ApProcessing) &&
            nd.room && nd.group) {
            group_aps[{*nd.room, *nd.group}]++;
            if (nd.is_relay) relays[{*nd.room, *nd.group}]++;
        }
        if (nd.role == NodeRole::Rfs && nd.room) room_rfs[*nd.room]++;
    }
    for (const auto& [rg, count] : group_aps) {
        if (count != 2) {
            out.push_back("room " + std::to_string(rg.first) + " group " +
                          std::to_string(rg.second) + ": expected 2 access points, found " +
                          std::to_string(count));
        }
        if (relays[rg] != 1) {
            out.push_back("room " + std::to_string(rg.first) + " group " +
                          std::to_string(rg.second) + ": expected exactly one relay AP");
        }
    }
    std::set<int> rooms_seen;
    for (const auto& [rg, _] : group_aps) rooms_seen.insert(rg.first);
    for (int r : rooms_seen) {
        int groups = 0;
        for (int g = 1; g <= 4; ++g) {
            if (group_aps.count({r, g})) ++groups;
        }
        if (groups != 4) {
            out.push_back("room " + std::to_string(r) + ": expected 4 groups, found " +
                          std::to_string(groups));
        }
        if (room_rfs[r] != 1) {
            out.push_back("room " + std::to_string(r) + ": expected exactly one RFS");
        }
    }

    // Reachability: every source must reach every processing node.
    std::vector<std::vector<int>> adj(n);
    for (const auto& l : t.links) {
        if (l.from >= 0 && l.from < n && l.to >= 0 && l.to < n) adj[l.from].push_back(l.to);
    }
    const auto procs = t.processing_nodes();
    for (int u : t.source_uds()) {
        std::vector<char> seen(n, 0);
        std::deque<int> q{u};
        seen[u] = 1;
        while (!q.empty()) {
            int m = q.front();
            q.pop_front();
            for (int nb : adj[m]) {
                if (!seen[nb]) {
                    seen[nb] = 1;
                    q.push_back(nb);
                }
            }
        }
        for (int d : procs) {
            if (!seen[d]) {
                out.push_back("no path from '" + t.nodes[u].id + "' to '" +
                              t.nodes[d].id + "'");
            }
        }
    }
    return out;
}

inline nlohmann::json topology_to_json(const Topology& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
        nlohmann::json rec;
        rec["id"] = n.id;
        rec["role"] = to_string(n.role);
        if (n.room) rec["room"] = *n.room;
        if (n.group) rec["group"] = *n.group;
        if (n.wavelength) rec["wavelength"] = to_string(*n.wavelength);
        if (n.is_relay) rec["is_relay"] = true;
        if (!n.profile.empty()) rec["profile"] = n.profile;
        nodes.push_back(rec);
    }
    nlohmann::json links = nlohmann::json::array();
    for (const auto& l : t.links) {
        nlohmann::json rec;
        rec["from"] = t.nodes[l.from].id;
        rec["to"] = t.nodes[l.to].id;
        rec["capacity_gbps"] = l.capacity_gbps;
        rec["medium"] = to_string(l.medium);
        links.push_back(rec);
    }
    return nlohmann::json{{"nodes", nodes}, {"links", links}};
}

inline WavelengthClass wavelength_from_string(const std::string& s) {
    if (s == "red") return WavelengthClass::Red;
    if (s == "yellow") return WavelengthClass::Yellow;
    if (s == "green") return WavelengthClass::Green;
    if (s == "blue") return WavelengthClass::Blue;
    throw ConfigError("unknown wavelength class '" + s + "'");
}

inline Topology topology_from_json(const nlohmann::json& doc) {
    Topology t;
    for (const auto& rec : doc.at("nodes")) {
        Node n;
        n.id = rec.at("id").get<std::string>();
        n.role = role_from_string(rec.at("role").get<std::string>());
        if (rec.contains("room")) n.room = rec.at("room").get<int>();
        if (rec.contains("group")) n.group = rec.at("group").get<int>();
        if (rec.contains("wavelength")) {
            n.wavelength = wavelength_from_string(rec.at("wavelength").get<std::string>());
        }
        if (rec.contains("is_relay")) n.is_relay = rec.at("is_relay").get<bool>();
        if (rec.contains("profile")) n.profile = rec.at("profile").get<std::string>();
        t.add_node(std::move(n));
    }
    for (const auto& rec : doc.at("links")) {
        Link l;
        l.from = t.index_of(rec.at("from").get<std::string>());
        l.to = t.index_of(rec.at("to").get<std::string>());
        l.capacity_gbps = rec.at("capacity_gbps").get<double>();
        l.medium = medium_from_string(rec.at("medium").get<std::string>());
        t.links.push_back(l);
    }
    return t;
}

} // namespace fogpon
