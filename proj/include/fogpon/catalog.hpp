#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogpon/common.hpp"

namespace fogpon {

enum class DeviceKind { Processing, Networking, AccessPoint };

enum class WavelengthClass { Red, Yellow, Green, Blue };

inline std::string to_string(WavelengthClass w) {
    switch (w) {
        case WavelengthClass::Red: return "red";
        case WavelengthClass::Yellow: return "yellow";
        case WavelengthClass::Green: return "green";
        case WavelengthClass::Blue: return "blue";
    }
    return "?";
}

/// Power/capacity record for one device class. Capacity is GFLOPs for
/// processing devices and Gbit/s for networking devices and access points.
struct DeviceProfile {
    std::string id;
    DeviceKind kind = DeviceKind::Networking;
    std::optional<WavelengthClass> wavelength;
    double max_power_w = 0;
    double idle_power_w = 0;
    double capacity = 0;

    /// Dynamic power per capacity unit: (max - idle) / capacity.
    double unit_power() const {
        if (capacity <= 0) {
            throw ConfigError("device '" + id + "': capacity must be > 0");
        }
        return (max_power_w - idle_power_w) / capacity;
    }

    void check() const {
        if (capacity <= 0) {
            throw ConfigError("device '" + id + "': capacity must be > 0");
        }
        if (idle_power_w < 0) {
            throw ConfigError("device '" + id + "': idle power must be >= 0");
        }
        if (max_power_w <= idle_power_w) {
            throw ConfigError("device '" + id +
                              "': max power must exceed idle power");
        }
    }
};

inline double unit_power(const DeviceProfile& p) { return p.unit_power(); }

/// Immutable after construction; safe to share across threads.
class Catalog {
public:
    const DeviceProfile& at(const std::string& id) const {
        auto it = profiles_.find(id);
        if (it == profiles_.end()) {
            throw ConfigError("unknown device class '" + id + "'");
        }
        return it->second;
    }

    bool contains(const std::string& id) const { return profiles_.count(id) != 0; }

    const std::map<std::string, DeviceProfile>& profiles() const { return profiles_; }

    void put(DeviceProfile p) {
        p.check();
        profiles_[p.id] = std::move(p);
    }

private:
    std::map<std::string, DeviceProfile> profiles_;
};

namespace detail {

struct DefaultDevice {
    const char* id;
    DeviceKind kind;
    int wavelength; // -1 = none
    double max_w;
    double idle_w;
    double capacity;
    double datasheet_efficiency; // informational only; unit_power is derived
};

/// Embedded device defaults. The datasheet efficiency column is retained
/// for fidelity reporting but never used in computations: several rows are
/// inconsistent with (max-idle)/capacity and the formula always wins.
inline const std::array<DefaultDevice, 16>& default_devices() {
    static const std::array<DefaultDevice, 16> table = {{
        {"CCS", DeviceKind::Processing, -1, 1100, 660, 1612.8, 0.27},
        {"MFS", DeviceKind::Processing, -1, 750, 450, 403.2, 0.74},
        {"CFS", DeviceKind::Processing, -1, 350, 210, 121.6, 1.15},
        {"BFS", DeviceKind::Processing, -1, 305, 183, 99, 1.23},
        {"RFS", DeviceKind::Processing, -1, 65, 39, 64, 0.41},
        {"UD", DeviceKind::Processing, -1, 18, 10.8, 12.288, 0.55},
        {"AP-red", DeviceKind::AccessPoint, 0, 7.2, 4.32, 2.5, 1.52},
        {"AP-yellow", DeviceKind::AccessPoint, 1, 4.5, 2.7, 2.5, 0.72},
        {"AP-green", DeviceKind::AccessPoint, 2, 2.7, 1.62, 2.5, 0.432},
        {"AP-blue", DeviceKind::AccessPoint, 3, 2.7, 1.62, 2.25, 0.485},
        {"ONU", DeviceKind::Networking, -1, 10, 6, 10, 0.9},
        {"ethernet-switch", DeviceKind::Networking, -1, 300, 180, 160, 1.125},
        {"aggregation-switch", DeviceKind::Networking, -1, 435, 261, 240, 0.725},
        {"edge-router", DeviceKind::Networking, -1, 435, 261, 240, 0.725},
        {"optical-switch", DeviceKind::Networking, -1, 750, 450, 480, 0.625},
        {"core-router", DeviceKind::Networking, -1, 344, 206.4, 3200, 0.043},
    }};
    return table;
}

} // namespace detail

inline Catalog default_catalog() {
    Catalog cat;
    for (const auto& d : detail::default_devices()) {
        DeviceProfile p;
        p.id = d.id;
        p.kind = d.kind;
        if (d.wavelength >= 0) p.wavelength = static_cast<WavelengthClass>(d.wavelength);
        p.max_power_w = d.max_w;
        p.idle_power_w = d.idle_w;
        p.capacity = d.capacity;
        cat.put(std::move(p));
    }
    return cat;
}

/// One row of the efficiency fidelity report: derived unit power vs. the
/// datasheet efficiency column, with a flag when they disagree beyond tol.
struct EfficiencyCheck {
    std::string id;
    double computed = 0;
    double datasheet = 0;
    bool flagged = false;
};

inline std::vector<EfficiencyCheck> efficiency_fidelity(const Catalog& cat,
                                                        double tol = 0.005) {
    std::vector<EfficiencyCheck> out;
    for (const auto& d : detail::default_devices()) {
        if (!cat.contains(d.id)) continue;
        EfficiencyCheck c;
        c.id = d.id;
        c.computed = cat.at(d.id).unit_power();
        c.datasheet = d.datasheet_efficiency;
        c.flagged = std::abs(c.computed - c.datasheet) > tol;
        out.push_back(c);
    }
    return out;
}

inline nlohmann::json catalog_to_json(const Catalog& cat) {
    nlohmann::json devices = nlohmann::json::object();
    for (const auto& [id, p] : cat.profiles()) {
        nlohmann::json rec;
        rec["max_power_w"] = p.max_power_w;
        rec["idle_power_w"] = p.idle_power_w;
        rec["capacity"] = p.capacity;
        rec["capacity_unit"] = p.kind == DeviceKind::Processing ? "gflops" : "gbps";
        devices[id] = rec;
    }
    nlohmann::json doc;
    doc["devices"] = devices;
    return doc;
}

/// Defaults with per-field overrides. Unknown device classes and unknown
/// fields are rejected; the result is re-checked against the profile
/// invariants with unit powers implied by the overridden fields.
inline Catalog load_catalog(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("catalog: top level must be an object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "devices") throw ConfigError("catalog: unknown key '" + key + "'");
    }
    Catalog cat = default_catalog();
    if (!doc.contains("devices")) return cat;
    const auto& devices = doc.at("devices");
    if (!devices.is_object()) throw ConfigError("catalog: 'devices' must be an object");
    for (const auto& [id, rec] : devices.items()) {
        if (!cat.contains(id)) throw ConfigError("catalog: unknown device class '" + id + "'");
        if (!rec.is_object()) throw ConfigError("catalog: device '" + id + "' must be an object");
        DeviceProfile p = cat.at(id);
        for (const auto& [field, value] : rec.items()) {
            if (field == "max_power_w") {
                p.max_power_w = value.get<double>();
            } else if (field == "idle_power_w") {
                p.idle_power_w = value.get<double>();
            } else if (field == "capacity") {
                p.capacity = value.get<double>();
            } else if (field == "capacity_unit") {
                const std::string unit = value.get<std::string>();
                if (unit != "gflops" && unit != "gbps") {
                    throw ConfigError("catalog: device '" + id +
                                      "': capacity_unit must be 'gflops' or 'gbps'");
                }
            } else {
                throw ConfigError("catalog: device '" + id + "': unknown field '" +
                                  field + "'");
            }
        }
        cat.put(std::move(p));
    }
    return cat;
}

inline Catalog load_catalog_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("catalog: malformed JSON: ") + e.what());
    }
    return load_catalog(doc);
}

} // namespace fogpon
