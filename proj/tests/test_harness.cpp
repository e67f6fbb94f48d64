#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "fnls/config.hpp"
#include "fnls/experiment.hpp"
#include "fnls/io.hpp"

using namespace fnls;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("fnls_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

nlohmann::json stripped_record(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    j.erase("timestamp");
    j.erase("timing");
    return j;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, and effective output") {
    const auto cfg = parse_config_text("dim = 1\np = 1.3\nmass = 2\n");
    CHECK(cfg.params.d == 1);
    CHECK(cfg.params.lambda == 2.0);
    CHECK(cfg.solver.el_tol == 1e-7);  // default
    const std::string eff = effective_config_string(cfg);
    CHECK(eff.find("el_tol = 1.0000000000000001e-07\n") != std::string::npos);
    CHECK(eff.find("engine = hybrid\n") != std::string::npos);
    CHECK(eff.find("mixing = 0.29999999999999999\n") != std::string::npos);

    const auto cfg2 = parse_config_text("dim=2\np = 1.5\nmass = 3\nengine = scf\nmixing = 0.5\n");
    CHECK(cfg2.solver.engine == "scf");
    CHECK(cfg2.solver.mixing == 0.5);
}

TEST_CASE("config parsing: errors carry line numbers") {
    CHECK_THROWS_AS(parse_config_text("nonsense\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("unknown_key = 1\n"), ConfigError);
    try {
        parse_config_text("dim = 1\nwill_not_exist = 2\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
    // precondition violations
    CHECK_THROWS_AS(parse_config_text("dim = 1\np = 3.0\n"), ConfigError);       // endpoint
    CHECK_THROWS_AS(parse_config_text("dim = 1\ngrid_n = 63\n"), ConfigError);   // odd n
    CHECK_THROWS_AS(parse_config_text("dim = 1\ngrid_n = 4\n"), ConfigError);    // too small
    CHECK_THROWS_AS(parse_config_text("dim = 1\np = 1.3\ndim = 2\n"), ConfigError);  // dup
    CHECK_THROWS_AS(parse_config_text("engine = turbo\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("p = abc\n"), ConfigError);
}

TEST_CASE("csv writer: header and formatting") {
    const auto dir = temp_dir("csv");
    {
        CsvWriter csv(dir / "t.csv", {"a", "b"});
        csv.row(std::vector<double>{1.5, 2.25});
        csv.row(std::vector<double>{-1e-9, 3.0});
    }
    std::ifstream in(dir / "t.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    std::getline(in, line);
    CHECK(line == "1.5,2.25");
    std::getline(in, line);
    CHECK(line.find("-1.0000000000000001e-09") == 0);
}

TEST_CASE("solve experiment: record, summary, determinism, round trip") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::solve;
    spec.params = ModelParams{1, 1.3, 1.0};
    spec.solver.seed = 11;
    spec.solver.el_tol = 1e-7;
    spec.solver.grid_n = 256;
    spec.solver.box = 30.0;
    spec.dump_orbitals = true;

    const auto dir_a = temp_dir("run_a");
    const auto dir_b = temp_dir("run_b");
    spec.out_dir = dir_a.string();
    const auto rec_a = run_experiment(spec);
    spec.out_dir = dir_b.string();
    const auto rec_b = run_experiment(spec);

    CHECK(rec_a.success);
    CHECK(rec_a.all_converged);
    CHECK(fs::exists(dir_a / "record.json"));
    CHECK(fs::exists(dir_a / "density.csv"));
    CHECK(fs::exists(dir_a / "summary.txt"));
    CHECK(fs::exists(dir_a / "orbitals.bin"));
    CHECK(fs::exists(dir_a / "orbitals.json"));

    // determinism modulo timestamps
    CHECK(stripped_record(rec_a.record_json) == stripped_record(rec_b.record_json));
    CHECK(read_text_file(dir_a / "density.csv") == read_text_file(dir_b / "density.csv"));

    // round trip
    const auto loaded = load_record(dir_a.string());
    CHECK(loaded.record_json == rec_a.record_json);
    CHECK(loaded.kind == "solve");
    CHECK(loaded.all_converged);

    // orbital dump structure
    const auto sidecar = nlohmann::json::parse(read_text_file(dir_a / "orbitals.json"));
    CHECK(sidecar.at("dtype") == "float64");
    CHECK(sidecar.at("byte_order") == "little");
    const auto shape = sidecar.at("shape").get<std::vector<int>>();
    REQUIRE(shape.size() == 2);
    std::size_t total = 1;
    for (int s : shape) total *= static_cast<std::size_t>(s);
    CHECK(fs::file_size(dir_a / "orbitals.bin") == total * sizeof(double));
}

TEST_CASE("sweep experiment emits the curve files") {
    ExperimentSpec spec;
    spec.kind = ExperimentKind::sweep_lambda;
    spec.params = ModelParams{1, 1.3, 1.0};
    spec.lambda_min = 0.4;
    spec.lambda_max = 1.2;
    spec.lambda_points = 3;
    spec.solver.seed = 2;
    spec.solver.grid_n = 256;
    spec.solver.box = 30.0;
    const auto dir = temp_dir("sweep");
    spec.out_dir = dir.string();
    const auto rec = run_experiment(spec);
    CHECK(rec.success);
    CHECK(fs::exists(dir / "j_of_lambda.csv"));
    std::ifstream in(dir / "j_of_lambda.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "lambda,J,J_over_lambda,mu_last,converged");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
    // the summary documents the columns
    CHECK(rec.summary.find("columns j_of_lambda.csv") != std::string::npos);
}

TEST_CASE("experiment kinds map to names") {
    CHECK(kind_name(kind_from_name("figure1")) == "figure1");
    CHECK(kind_name(kind_from_name("gap-vs-p")) == "gap-vs-p");
    CHECK_THROWS_AS(kind_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("figure defaults match the experiments they reproduce") {
    const auto f1 = spec_with_figure_defaults(ExperimentKind::figure1);
    CHECK(f1.params.d == 1);
    CHECK(f1.params.p == doctest::Approx(1.3));
    CHECK(f1.params.lambda == doctest::Approx(15.0));
    const auto f2 = spec_with_figure_defaults(ExperimentKind::figure2);
    CHECK(f2.params.d == 2);
    CHECK(f2.params.p == doctest::Approx(1.5));
    const auto f4 = spec_with_figure_defaults(ExperimentKind::figure4);
    CHECK(f4.lambda_points == 12);
    CHECK(f4.lambda_min == doctest::Approx(0.25));
    CHECK(f4.lambda_max == doctest::Approx(3.0));
}
