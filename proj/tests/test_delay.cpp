#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <vector>

#include "fogpon/delay.hpp"

using namespace fogpon;

TEST_CASE("mm1 sojourn time") {
    // empty queue: pure service time packet_bits / (capacity in bit/s)
    CHECK(mm1_delay(0, 40, 10000) == Catch::Approx(10000.0 / 40e9).epsilon(1e-15));
    // mu = 2 pkt/s, lambda = 1 pkt/s via packet size = 1e9 bits
    CHECK(mm1_delay(1, 2, 1e9) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(mm1_delay(2, 2, 1e9), DomainError);
    CHECK_THROWS_AS(mm1_delay(3, 2, 1e9), DomainError);
    CHECK_THROWS_AS(mm1_delay(-1, 2, 1e9), DomainError);
}

TEST_CASE("tangent construction in normalized units") {
    // capacity 1 Gbit/s with 1e9-bit packets gives mu = 1 pkt/s
    const double rho[] = {0.0, 0.5};
    const auto pw = linearize(1.0, 2, rho, 1e9, 0.98);
    REQUIRE(pw.segments.size() == 2);
    CHECK(pw.segments[0].slope_s_per_gbps == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(pw.segments[0].intercept_s == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(pw.segments[1].slope_s_per_gbps == Catch::Approx(4.0).epsilon(1e-12));
    CHECK(pw.segments[1].intercept_s == Catch::Approx(0.0).margin(1e-12));
    CHECK(pw.ub_s == Catch::Approx(1.0 / 0.02).epsilon(1e-12));
}

TEST_CASE("linearize input validation") {
    const double bad_order[] = {0.5, 0.5};
    CHECK_THROWS_AS(linearize(1.0, 2, bad_order, 1e9), ConfigError);
    const double outside[] = {0.0, 0.99};
    CHECK_THROWS_AS(linearize(1.0, 2, outside, 1e9, 0.98), ConfigError);
    const double fine[] = {0.0};
    CHECK_THROWS_AS(linearize(1.0, 2, fine, 1e9), ConfigError); // count mismatch
    CHECK_THROWS_AS(linearize(0.0, 1, fine, 1e9), ConfigError);
}

TEST_CASE("default six-segment approximation quality on a 40 Gbit/s link") {
    const auto pw = linearize(40.0, 6);
    REQUIRE(pw.segments.size() == 6);

    // under-approximation everywhere up to rho_max, tangency at the
    // construction points, and bounded relative error on the working range
    double worst_rel = 0;
    for (int i = 0; i <= 10000; ++i) {
        const double rho = 0.95 * i / 10000.0;
        const double load = rho * 40.0;
        const double exact = mm1_delay(load, 40.0);
        const double approx = eval_piecewise(pw, load);
        CHECK(approx <= exact + 1e-12);
        if (rho >= 0.05 && rho <= 0.9) {
            worst_rel = std::max(worst_rel, (exact - approx) / exact);
        }
    }
    CHECK(worst_rel <= 0.05);
    for (const auto& seg : pw.segments) {
        const double load = seg.rho * 40.0;
        CHECK(std::abs(eval_piecewise(pw, load) - mm1_delay(load, 40.0)) <= 1e-9);
    }
}

TEST_CASE("piecewise evaluation") {
    const auto pw = linearize(40.0, 6);
    // at zero load the tangent at the origin dominates: pure service time
    CHECK(eval_piecewise(pw, 0) == Catch::Approx(10000.0 / 40e9).epsilon(1e-12));
    CHECK_FALSE(eval_piecewise_checked(pw, 0).beyond_rho_max);

    const auto beyond = eval_piecewise_checked(pw, 0.99 * 40.0);
    CHECK(beyond.beyond_rho_max);
    CHECK_THROWS_AS(eval_piecewise(pw, -1), DomainError);

    SECTION("monotone nondecreasing in load") {
        double prev = -1;
        for (int i = 0; i <= 1000; ++i) {
            const double v = eval_piecewise(pw, 40.0 * i / 1000.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
    SECTION("adding a tangent point never lowers the approximation") {
        std::vector<double> pts = {0.0, 0.35, 0.5775};
        const auto base = linearize(40.0, 3, pts);
        pts.push_back(0.8);
        const auto refined = linearize(40.0, 4, pts);
        for (int i = 0; i <= 500; ++i) {
            const double load = 40.0 * i / 500.0;
            CHECK(eval_piecewise(refined, load) >= eval_piecewise(base, load) - 1e-15);
        }
    }
}

TEST_CASE("segment csv has one data row per segment") {
    const auto pw = linearize(40.0, 6);
    std::ostringstream os;
    write_segments_csv(os, pw);
    int lines = 0;
    for (char c : os.str()) lines += c == '\n';
    CHECK(lines == 7); // header + 6 segments
}
