#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "fuzzyflow/errors.hpp"
#include "fuzzyflow/io.hpp"

using namespace fuzzyflow;

namespace {

bool message_has(const std::exception& e, const char* needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("metric JSON round trip is bit exact") {
    const Metric c = random_metric(7, 1.3, 99);
    const Metric back = io::metric_from_json(io::metric_to_json(c));
    CHECK(back.matrix() == c.matrix());

    const auto path = std::filesystem::temp_directory_path() / "fuzzyflow_io_roundtrip.json";
    io::write_metric(path, c);
    CHECK(io::read_metric(path).matrix() == c.matrix());
    std::filesystem::remove(path);
  }

  TEST_CASE("validation errors name the invariant") {
    const char* non_herm = R"({"n": 2, "entries": [[1,0],[0.5,0],[0,0],[1,0]]})";
    try {
      (void)io::metric_from_json(non_herm);
      FAIL("accepted a non-Hermitian matrix");
    } catch (const ValidationError& e) {
      CHECK(message_has(e, "Hermiticity"));
    }

    const char* indefinite = R"({"n": 2, "entries": [[1,0],[0,0],[0,0],[-1,0]]})";
    try {
      (void)io::metric_from_json(indefinite);
      FAIL("accepted an indefinite matrix");
    } catch (const DomainError& e) {
      CHECK(message_has(e, "strict positivity"));
      CHECK(e.lambda_min() == doctest::Approx(-1.0));
    }
    CHECK_NOTHROW(io::hermitian_from_json(indefinite));
  }

  TEST_CASE("malformed files are rejected") {
    CHECK_THROWS_AS(io::metric_from_json("{\"n\": 2, \"entries\": [[1,0],[0,0],[0,0]"),
                    ValidationError);
    CHECK_THROWS_AS(io::metric_from_json(R"({"n": 2, "entries": [[1,0],[0,0],[0,0]]})"),
                    ValidationError);
    CHECK_THROWS_AS(io::metric_from_json(R"({"n": 0, "entries": []})"), ValidationError);
    CHECK_THROWS_AS(io::metric_from_json(R"({"n": 1, "entries": [[1]]})"), ValidationError);
    CHECK_THROWS_AS(io::metric_from_json(R"([1, 2])"), ValidationError);
    CHECK_THROWS_AS(io::read_text("/nonexistent/fuzzyflow.json"), std::runtime_error);
  }

  TEST_CASE("trace CSV and manifest") {
    const FuzzyTorus T({5, 2});
    const Metric c0 = cigar(T, 1.0);
    const FlowTrace tr = integrate(T, c0, FlowConfig::for_metric(c0));
    const std::string csv = io::trace_csv(tr);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == io::trace_csv_header);
    std::size_t rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == tr.samples.size());

    io::RunContext ctx;
    ctx.metric_kind = "cigar";
    ctx.metric_params = {{"mass", 1.0}};
    const auto m = io::manifest(tr, ctx);
    for (const char* key : {"params", "config", "initial_metric", "density_mode", "kappa",
                            "termination", "c_infinity", "final_time", "final_dist_flat",
                            "accepted_steps", "rejected_steps", "violations", "final_metric",
                            "timestamp", "wall_seconds"})
      CHECK(m.contains(key));
    CHECK(m["termination"] == "converged");
    CHECK(m["density_mode"] == false);
    const Metric fin = io::metric_from_json(m["final_metric"].dump());
    CHECK(fin.matrix() == tr.final_metric.matrix());
  }
}
