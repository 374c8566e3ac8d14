#pragma once

#include <string>
#include <vector>

#include "fogpon/common.hpp"

namespace fogpon {

/// Per-user processing demand (GFLOPs) and the traffic it induces through
/// the data-rate ratio: traffic = drr * demand, exactly.
struct UserDemand {
    std::string user_id;
    double demand_gflops = 0;
    double drr = 0; // Gbit/s per GFLOP

    double traffic_gbps() const { return drr * demand_gflops; }
};

struct DemandSet {
    std::vector<UserDemand> users;

    static DemandSet uniform(const std::vector<std::string>& user_ids,
                             double demand_gflops, double drr) {
        if (demand_gflops <= 0) throw ConfigError("demand must be > 0 GFLOPs");
        if (drr <= 0) throw ConfigError("data-rate ratio must be > 0");
        DemandSet ds;
        for (const auto& id : user_ids) ds.users.push_back({id, demand_gflops, drr});
        return ds;
    }

    const UserDemand& of(const std::string& user_id) const {
        for (const auto& u : users) {
            if (u.user_id == user_id) return u;
        }
        throw ConfigError("no demand recorded for user '" + user_id + "'");
    }

    double total_demand_gflops() const {
        double s = 0;
        for (const auto& u : users) s += u.demand_gflops;
        return s;
    }
    double total_traffic_gbps() const {
        double s = 0;
        for (const auto& u : users) s += u.traffic_gbps();
        return s;
    }
};

} // namespace fogpon
