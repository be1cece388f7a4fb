#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "vl/io.hpp"

using namespace vl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("vl_io_" + std::to_string(std::hash<std::string>{}(
                               doctest::getContextOptions()->currentTest->m_name)));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name, const std::string& contents) const {
        std::ofstream(path / name) << contents;
        return path / name;
    }
};

template <typename E>
std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const E& e) {
        return e.what();
    }
    return "<no exception>";
}

json sample_structure() {
    return json::parse(R"({
      "schema_version": 1, "memory": 12, "output": "y",
      "inputs": [
        {"name": "flow", "degree": 2, "terms": [{"R": 3, "a": 0.2}, {"R": 2, "a": 0.7}]},
        {"name": "temp", "degree": 1, "terms": [{"R": 2, "a": 1.5}]}
      ],
      "flags": {"constant_column": false, "ridge": 0.0}
    })");
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("load_csv selects columns by name") {
    TempDir dir;
    const auto path = dir.file("d.csv", "b,y,a\n1,10,100\n2,20,200\n3,30,300\n");
    const auto d = io::load_csv(path, {"a", "b"}, "y");
    CHECK(d.num_inputs() == 2);
    CHECK(d.input_names == std::vector<std::string>{"a", "b"});
    CHECK(d.inputs.col(0) == Eigen::Vector3d(100, 200, 300));
    CHECK(d.inputs.col(1) == Eigen::Vector3d(1, 2, 3));
    CHECK(d.output == Eigen::Vector3d(10, 20, 30));
    CHECK(io::load_csv(path, {"a"}, "").output.isZero(0.0));
}

TEST_CASE("CSV errors are distinct and name the row") {
    TempDir dir;
    std::string body = "u,y\n";
    for (int r = 1; r <= 20; ++r) body += r == 17 ? "NaN,1\n" : std::to_string(r) + ",1\n";
    const auto nan_file = dir.file("nan.csv", body);
    const auto msg = message_of<io::NonNumericCell>([&] { io::load_csv(nan_file, {"u"}, "y"); });
    CHECK(msg.find("row 17") != std::string::npos);

    const auto ragged = dir.file("ragged.csv", "u,y\n1,2\n3\n");
    CHECK(message_of<io::RaggedRow>([&] { io::load_csv(ragged, {"u"}, "y"); }).find("row 2") !=
          std::string::npos);
    const auto words = dir.file("words.csv", "u,y\n1,abc\n");
    CHECK_THROWS_AS(io::load_csv(words, {"u"}, "y"), io::NonNumericCell);
    CHECK_THROWS_AS(io::load_csv(dir.file("empty.csv", ""), {"u"}, "y"), io::EmptyFile);
    CHECK_THROWS_AS(io::load_csv(dir.file("header.csv", "u,y\n"), {"u"}, "y"), io::EmptyFile);
    CHECK_THROWS_AS(io::load_csv(dir.file("ok.csv", "u,y\n1,2\n"), {"v"}, "y"), io::MissingColumn);
    CHECK_THROWS_AS(io::load_csv(dir.path / "absent.csv", {"u"}, "y"), IoError);
}

TEST_CASE("CSV round trip is exact") {
    TempDir dir;
    const auto u = test::random_inputs(50, 2, 3);
    Dataset d = test::make_dataset(u, u.col(0) * (1.0 / 3.0) + u.col(1) * 1e-300);
    d.output(4) = -0.0;
    d.output(5) = 1.7976931348623157e308;
    io::save_csv(dir.path / "rt.csv", d);
    const auto back = io::load_csv(dir.path / "rt.csv", d.input_names, d.output_name);
    CHECK(std::memcmp(back.inputs.data(), d.inputs.data(), sizeof(double) * d.inputs.size()) == 0);
    CHECK(std::memcmp(back.output.data(), d.output.data(), sizeof(double) * d.output.size()) == 0);
    CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("structure round trip and field-path errors") {
    const auto s = io::structure_from_json(sample_structure(), true);
    CHECK(s.input_names == std::vector<std::string>{"flow", "temp"});
    CHECK(s.spec(2, 0).time_scale == 0.7);
    CHECK(coefficient_count(s) == 5 + 3 + 0);  // rho_1 = 5, rho_2 = 2 -> C(3,2) = 3
    const auto again = io::structure_from_json(io::structure_to_json(s), true);
    CHECK(again.specs == s.specs);
    CHECK(again.degrees == s.degrees);
    CHECK(again.memory_length == s.memory_length);

    auto missing = sample_structure();
    missing["inputs"][0]["terms"][1].erase("a");
    CHECK(message_of<SchemaError>([&] { io::structure_from_json(missing); })
              .find("inputs[0].terms[1].a") != std::string::npos);

    auto no_version = sample_structure();
    no_version.erase("schema_version");
    CHECK_THROWS_AS(io::structure_from_json(no_version), SchemaError);

    auto extra = sample_structure();
    extra["inputs"][1]["colour"] = "blue";
    CHECK_NOTHROW(io::structure_from_json(extra, false));
    CHECK(message_of<SchemaError>([&] { io::structure_from_json(extra, true); })
              .find("inputs[1].colour") != std::string::npos);

    auto too_long = sample_structure();
    too_long["inputs"][0]["terms"][0]["R"] = 13;
    CHECK_THROWS_AS(io::structure_from_json(too_long), SchemaError);
}

TEST_CASE("model round trip keeps theta bitwise") {
    TempDir dir;
    const auto s = io::structure_from_json(sample_structure());
    const auto u = test::random_inputs(200, 2, 4);
    Dataset d = test::make_dataset(u, u.col(0).cwiseProduct(u.col(1)) + 0.1 * u.col(0));
    d.input_names = {"flow", "temp"};
    io::ModelFile file;
    file.model = fit(d, s, 12, 150);
    file.fit_start = 12;
    file.fit_rows = 150;
    file.differenced = {{"y", 2.5}};
    io::save_model(dir.path / "m.json", file);
    const auto back = io::load_model(dir.path / "m.json", true);
    REQUIRE(back.model.theta.size() == file.model.theta.size());
    CHECK(std::memcmp(back.model.theta.data(), file.model.theta.data(),
                      sizeof(double) * file.model.theta.size()) == 0);
    CHECK(back.model.index == file.model.index);
    CHECK(back.model.fit_stats == file.model.fit_stats);
    CHECK(back.fit_rows == 150);
    CHECK(back.differenced == file.differenced);
    // Saving the loaded model reproduces the bytes.
    io::save_model(dir.path / "m2.json", back);
    CHECK(io::read_file(dir.path / "m.json") == io::read_file(dir.path / "m2.json"));
}

TEST_CASE("model integrity errors") {
    const auto s = io::structure_from_json(sample_structure());
    io::ModelFile file;
    file.model.structure = s;
    file.model.index = coefficient_index(s);
    file.model.theta = Eigen::VectorXd::Ones(file.model.index.size());
    auto j = io::model_to_json(file);
    CHECK_NOTHROW(io::model_from_json(j));

    auto short_theta = j;
    short_theta["theta"].erase(0);
    CHECK_THROWS_AS(io::model_from_json(short_theta), IntegrityError);

    auto bad_index = j;
    bad_index["index"][0]["factors"][0][1] = 2;
    CHECK_THROWS_AS(io::model_from_json(bad_index), IntegrityError);
}

TEST_CASE("plant and experiment configs") {
    TempDir dir;
    const auto plant = io::plant_from_json(json::parse(R"({
      "memory": 10, "noise_std": 0.0, "inputs": ["u1", "u2"], "output": "y",
      "branches": [
        {"kind": "wiener", "input": "u1", "pole": 0.3, "gain": 2.0, "polynomial": [0, 1]},
        {"kind": "volterra", "input": "u2", "kernels": [[1,0,0,0,0,0,0,0,0,0,0]]}
      ]})"));
    CHECK(plant.inputs.size() == 2);
    CHECK(plant.plant.branches[0].impulse_response(1) == doctest::Approx(2.0 * std::exp(-0.3)));
    CHECK(plant.plant.branches[1].input == 1);
    CHECK_THROWS_AS(io::plant_from_json(json::parse(R"({"memory": 1, "inputs": ["u"],
        "branches": [{"kind": "wiener", "input": "v", "pole": 0.3, "polynomial": [0, 1]}]})")),
                    SchemaError);

    io::save_csv(dir.path / "data.csv",
                 test::make_dataset(test::random_inputs(100, 1, 1), Eigen::VectorXd::Ones(100)));
    const auto setup = io::experiment_from_json(
        json::parse(R"({"trials": 3, "memory": 5, "seed": 4, "mode": "fixed",
                        "data": {"csv": "data.csv", "inputs": ["u"], "output": "y"}})"),
        dir.path);
    CHECK(setup.config.trials == 3);
    CHECK(setup.modes == std::vector<ExperimentMode>{ExperimentMode::Fixed});
    CHECK(setup.dataset.length() == 100);

    CHECK_THROWS_AS(io::experiment_from_json(
                        json::parse(R"({"data": {"csv": "nope.csv", "inputs": ["u"], "output": "y"}})"),
                        dir.path),
                    ConfigError);
    CHECK_THROWS_AS(io::experiment_from_json(json::parse(R"({"trials": 3})"), dir.path), ConfigError);
}

TEST_CASE("trial table CSV quotes its JSON column") {
    TrialRecord r;
    r.trial = 0;
    r.structure = test::siso(5, {{2, 0.5}});
    r.sse = 0.25;
    const auto text = io::format_trials_csv({r});
    CHECK(text.rfind("trial,mode,params_json,sse,resamples\n", 0) == 0);
    CHECK(text.find(R"(0,fixed,"[{""N"":1,)") != std::string::npos);
    CHECK(text.find(",0.25,0\n") != std::string::npos);
}

TEST_CASE("atomic write leaves no temporary file") {
    TempDir dir;
    io::write_file_atomic(dir.path / "out.txt", "hello\n");
    CHECK(io::read_file(dir.path / "out.txt") == "hello\n");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++entries;
    CHECK(entries == 1);
    CHECK_THROWS_AS(io::write_file_atomic(dir.path / "missing" / "x.txt", "x"), IoError);
}

} // TEST_SUITE
