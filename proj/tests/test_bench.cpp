#include "sonarnet/bench.hpp"

#include "sonarnet/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sonarnet;
using namespace sonarnet::bench;

TEST_CASE("run_benchmark: per-configuration statistics hold their invariants") {
    const GridKind kinds[] = {GridKind::horizontal90};
    Scene scene;
    scene.reflectors.push_back({1.0, 0.0, 0.0, 0.5});
    const auto report = run_benchmark({kinds, 1}, 5, scene);

    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    CHECK(row.name == "horizontal90");
    CHECK(row.direction_count == 90);
    CHECK(row.n == 5);
    CHECK(row.min_ms > 0.0);
    CHECK(row.min_ms <= row.mean_ms);
    CHECK(row.mean_ms <= row.max_ms);
    CHECK(row.std_ms >= 0.0);
    CHECK_FALSE(report.hardware.empty());
    CHECK_FALSE(report.timestamp.empty());
}

TEST_CASE("run_benchmark validates n") {
    const GridKind kinds[] = {GridKind::horizontal90};
    CHECK_THROWS_AS(run_benchmark({kinds, 1}, 0, Scene{}), ConfigError);
}

TEST_CASE("bench report renders as a table and as CSV") {
    BenchReport report;
    report.hardware = "test machine";
    report.workers = 1;
    report.timestamp = "2000-01-01T00:00:00Z";
    report.rows.push_back({"horizontal90", 90, 100, 10.0, 1.0, 8.0, 13.0});
    report.rows.push_back({"box1850", 1850, 100, 60.0, 2.0, 55.0, 66.0});
    report.rows.push_back({"hemisphere3000", 3000, 100, 95.0, 3.0, 90.0, 104.0});

    const auto table = report_table(report);
    CHECK(table.find("90 directions") != std::string::npos);
    CHECK(table.find("1850 directions") != std::string::npos);
    CHECK(table.find("3000 directions") != std::string::npos);
    CHECK(table.find("test machine") != std::string::npos);
    CHECK(table.find("10.00 (1.00)") != std::string::npos);

    const auto csv = report_csv(report);
    std::stringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line ==
          "configuration,directions,n,mean_ms,std_ms,min_ms,max_ms,hardware,timestamp");
    size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 3);

    const auto path = std::filesystem::temp_directory_path() / "sonarnet_bench_test.csv";
    save_report_csv(report, path.string());
    std::ifstream in(path);
    CHECK(in.good());
    std::filesystem::remove(path);
}

TEST_CASE("soak: a light loopback run delivers everything it synthesized") {
    SoakConfig cfg;
    cfg.sensors = 1;
    cfg.rate_hz = 2.0;
    cfg.duration_s = 2.0;
    cfg.workers = 2;
    const auto report = run_soak(cfg);

    CHECK(report.synthesized >= 2);
    CHECK(report.delivered_images == report.synthesized);
    CHECK(report.delivered_errors == 0);
    CHECK(report.total_drops() == 0);
    CHECK(report.seq_gaps == 0);
    CHECK(report.latency_p50_ms > 0.0);
    CHECK(report.latency_p99_ms >= report.latency_p50_ms);
    // trivially real-time at this rate: well under the 500 ms period
    CHECK(report.latency_p99_ms < 500.0);

    const auto summary = soak_summary(report);
    CHECK(summary.find("images") != std::string::npos);
    CHECK(summary.find("p99") != std::string::npos);
}

TEST_CASE("soak validates its parameters") {
    SoakConfig cfg;
    cfg.sensors = 0;
    CHECK_THROWS_AS(run_soak(cfg), ConfigError);
}
