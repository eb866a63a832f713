#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "optmol/sweep.hpp"
#include "test_util.hpp"

using namespace optmol;

namespace {

std::string csv_of(const SweepConfig& config) {
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(config), config.outputs);
    return os.str();
}

}  // namespace

TEST_SUITE("sweep") {

TEST_CASE("output selection parsing") {
    CHECK(parse_outputs("coherence,qfi") == (kOutCoherence | kOutQfi));
    CHECK(parse_outputs("j_a,j_b_c") == kOutCurrents);
    CHECK(parse_outputs("epr") == kOutEpr);
    CHECK_THROWS_AS(parse_outputs("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(parse_outputs(""), std::invalid_argument);
}

TEST_CASE("axis construction guards") {
    CHECK_THROWS_AS(SweepAxis::linspace("delta_t", 0.0, 0.8, 1), std::invalid_argument);
    CHECK_THROWS_AS(SweepAxis::linspace("delta_t", 0.8, 0.0, 5), std::invalid_argument);
    const SweepAxis axis = SweepAxis::linspace("lambda", 0.1, 0.5, 5);
    CHECK(axis.values.size() == 5);
    CHECK(axis.values.front() == doctest::Approx(0.1));
    CHECK(axis.values.back() == doctest::Approx(0.5));
}

TEST_CASE("config validation walks every grid point") {
    SweepConfig config;
    config.base = testutil::make_params(0.1, 0.1, 0.2, 0.2);
    config.axis1 = SweepAxis::linspace("lambda", 0.5, 1.2, 4);  // crosses lambda < omega
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.axis1 = SweepAxis::linspace("bogus", 0.0, 0.5, 4);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config.axis1 = SweepAxis::linspace("lambda", 0.1, 0.4, 4);
    config.axis2 = SweepAxis::linspace("lambda", 0.1, 0.4, 4);
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("zero temperature difference zeroes every nonequilibrium column") {
    SweepConfig config;
    config.base = testutil::make_params(0.1, 0.1, 0.2, 0.2);
    config.axis1 = SweepAxis::explicit_values("delta_t", {0.0, 0.0});
    const auto rows = run_sweep(config);
    REQUIRE(rows.size() == 2);
    for (const SweepRow& row : rows) {
        CHECK(row.failed == 0);
        CHECK(row.record.coherence_abs == 0.0);
        CHECK(std::abs(row.record.j_curl) < 1e-14);
        CHECK(std::abs(row.record.j_a) < 1e-14);
        CHECK(std::abs(row.record.j_b) < 1e-14);
        CHECK(std::abs(row.record.j_a_c) < 1e-14);
        CHECK(std::abs(row.record.epr) < 1e-14);
    }
}

TEST_CASE("row-major order: first axis is the slow index") {
    SweepConfig config;
    config.base = testutil::make_params(0.1, 0.1, 0.2, 0.2);
    config.axis1 = SweepAxis::explicit_values("lambda", {0.1, 0.2});
    config.axis2 = SweepAxis::explicit_values("delta_t", {0.0, 0.4, 0.8});
    config.outputs = kOutCoherence;
    const auto rows = run_sweep(config);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].lambda == 0.1);
    CHECK(rows[2].lambda == 0.1);
    CHECK(rows[3].lambda == 0.2);
    CHECK(rows[0].delta_t == 0.0);
    CHECK(rows[1].delta_t == 0.4);
    CHECK(rows[2].delta_t == 0.8);
}

TEST_CASE("sweep output is deterministic and thread-count independent") {
    SweepConfig config = preset_sweep("fig2a");
    config.axis2 = SweepAxis::linspace("delta_t", 0.0, 0.8, 9);  // trimmed for speed
    const std::string first = csv_of(config);
    const std::string second = csv_of(config);
    CHECK(first == second);
    config.threads = 4;
    CHECK(csv_of(config) == first);
}

TEST_CASE("deselected columns come out as nan") {
    SweepConfig config;
    config.base = testutil::make_params(0.1, 0.1, 0.2, 0.6);
    config.axis1 = SweepAxis::explicit_values("delta_t", {0.4, 0.4});
    config.outputs = kOutCoherence;
    const std::string csv = csv_of(config);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header ==
          "delta_t,lambda,coherence_abs,qfi,j_curl,j_a,j_b,j_a_p,j_b_p,j_a_c,j_b_c,epr");
    std::getline(lines, row);
    CHECK(row.find("nan") != std::string::npos);
    CHECK(std::strtod(row.c_str(), nullptr) == 0.4);
}

TEST_CASE("figure presets carry the published grids") {
    const SweepConfig fig2a = preset_sweep("fig2a");
    CHECK(fig2a.axis1.name == "lambda");
    CHECK(fig2a.axis1.values == std::vector<double>{0.1, 0.2, 0.4});
    REQUIRE(fig2a.axis2.has_value());
    CHECK(fig2a.axis2->values.size() == 81);
    CHECK(fig2a.base.gamma == 0.1);
    CHECK(fig2a.base.t_a == 0.2);

    const SweepConfig fig4 = preset_sweep("fig4");
    CHECK(fig4.axis1.values.size() == 50);
    CHECK(fig4.axis2->values.size() == 50);
    CHECK_THROWS_AS(preset_sweep("fig9"), std::invalid_argument);
}

TEST_CASE("coherence heat current into the cold reservoir is never negative") {
    SweepConfig config = preset_sweep("fig4");
    config.axis1 = SweepAxis::linspace("lambda", 0.05, 0.5, 10);  // trimmed contour grid
    config.axis2 = SweepAxis::linspace("delta_t", 0.0, 0.8, 10);
    config.outputs = kOutCurrents;
    for (const SweepRow& row : run_sweep(config)) {
        CHECK(row.failed == 0);
        CHECK(row.record.j_a_c >= 0.0);
        CHECK(row.record.j_b_c <= 0.0);
    }
}

TEST_CASE("coherence grows along every preset temperature ramp") {
    SweepConfig config = preset_sweep("fig2a");
    config.outputs = kOutCoherence;
    const auto rows = run_sweep(config);
    REQUIRE(rows.size() == 243);
    for (int line = 0; line < 3; ++line) {
        for (int i = 1; i < 81; ++i) {
            const double previous = rows[line * 81 + i - 1].record.coherence_abs;
            const double current = rows[line * 81 + i].record.coherence_abs;
            CHECK(current - previous > 1e-14);
        }
    }
}

}  // TEST_SUITE
