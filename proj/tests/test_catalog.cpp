#include <catch2/catch_amalgamated.hpp>

#include "fogpon/catalog.hpp"

using namespace fogpon;

TEST_CASE("default catalog carries all sixteen device classes") {
    const Catalog cat = default_catalog();
    REQUIRE(cat.profiles().size() == 16);
    for (const char* id :
         {"CCS", "MFS", "CFS", "BFS", "RFS", "UD", "AP-red", "AP-yellow", "AP-green",
          "AP-blue", "ONU", "ethernet-switch", "aggregation-switch", "edge-router",
          "optical-switch", "core-router"}) {
        REQUIRE(cat.contains(id));
    }
    CHECK(cat.at("RFS").max_power_w == 65.0);
    CHECK(cat.at("ONU").idle_power_w == 6.0);
    CHECK(cat.at("AP-red").capacity == 2.5);
    CHECK(cat.at("CCS").capacity == 1612.8);
}

TEST_CASE("unit power is (max - idle) / capacity") {
    const Catalog cat = default_catalog();
    CHECK(cat.at("RFS").unit_power() == Catch::Approx(0.40625).epsilon(0));
    CHECK(cat.at("CCS").unit_power() == Catch::Approx(440.0 / 1612.8).epsilon(1e-15));
    CHECK(cat.at("ONU").unit_power() == Catch::Approx(0.4).epsilon(0));

    DeviceProfile p{"synthetic", DeviceKind::Processing, {}, 10, 10, 5};
    CHECK(p.unit_power() == 0.0); // zero dynamic range

    DeviceProfile bad{"bad", DeviceKind::Processing, {}, 10, 5, 0};
    CHECK_THROWS_AS(bad.unit_power(), ConfigError);
}

TEST_CASE("unit power is scale invariant") {
    const double base = (65.0 - 39.0) / 64.0;
    for (double f : {2.0, 4.0, 0.5, 1024.0}) {
        DeviceProfile p{"x", DeviceKind::Processing, {}, 39 + 26 * f, 39, 64 * f};
        CHECK(p.unit_power() == Catch::Approx(base).margin(1e-15));
    }
}

TEST_CASE("fidelity report matches the processing datasheet column and flags UD") {
    const auto checks = efficiency_fidelity(default_catalog());
    int flagged = 0;
    for (const auto& c : checks) {
        if (c.id == "CCS" || c.id == "MFS" || c.id == "CFS" || c.id == "BFS" ||
            c.id == "RFS") {
            INFO(c.id);
            CHECK(std::abs(c.computed - c.datasheet) <= 0.005);
            CHECK_FALSE(c.flagged);
        }
        if (c.id == "UD") {
            CHECK(c.computed == Catch::Approx(0.5859375).epsilon(0));
            CHECK(c.flagged);
        }
        flagged += c.flagged;
    }
    CHECK(flagged >= 1); // at least the UD row disagrees with its datasheet
}

TEST_CASE("catalog load applies overrides and rejects bad input") {
    SECTION("empty document reproduces the defaults") {
        const Catalog a = default_catalog();
        const Catalog b = load_catalog(nlohmann::json::object());
        CHECK(catalog_to_json(a) == catalog_to_json(b));
    }
    SECTION("override recomputes unit power") {
        nlohmann::json doc;
        doc["devices"]["RFS"]["max_power_w"] = 129;
        const Catalog cat = load_catalog(doc);
        CHECK(cat.at("RFS").unit_power() == Catch::Approx(1.40625).epsilon(0));
    }
    SECTION("invariant violations are rejected") {
        nlohmann::json doc;
        doc["devices"]["ONU"]["capacity"] = 0;
        CHECK_THROWS_AS(load_catalog(doc), ConfigError);
    }
    SECTION("unknown device classes and fields are rejected") {
        nlohmann::json doc;
        doc["devices"]["warp-drive"]["capacity"] = 1;
        CHECK_THROWS_AS(load_catalog(doc), ConfigError);
        nlohmann::json doc2;
        doc2["devices"]["RFS"]["warp"] = 1;
        CHECK_THROWS_AS(load_catalog(doc2), ConfigError);
        CHECK_THROWS_AS(load_catalog_text("{nope"), ConfigError);
    }
}

TEST_CASE("catalog emission round-trips byte-identically") {
    const Catalog a = default_catalog();
    const std::string text = catalog_to_json(a).dump(2);
    const Catalog b = load_catalog_text(text);
    CHECK(catalog_to_json(b).dump(2) == text);

    nlohmann::json doc;
    doc["devices"]["CFS"]["idle_power_w"] = 200.5;
    const Catalog c = load_catalog(doc);
    const std::string text_c = catalog_to_json(c).dump(2);
    CHECK(catalog_to_json(load_catalog_text(text_c)).dump(2) == text_c);
}
