#include "topoconverge/errors.hpp"
#include "topoconverge/snapshot.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cstring>
#include <fstream>

using namespace topo;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

network_state sample_state() {
    layer_weights l0{2, 3, {0.5f, -1.25f, 0.0f, 2.0f, -0.75f, 3.5f}, {0.1f, -0.2f}};
    layer_weights l1{1, 2, {1.0f, -2.0f}, {}};
    return {{l0, l1}, 7};
}

} // namespace

TEST_SUITE("snapshot_io") {

    TEST_CASE("single layer snapshot round-trips exactly") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(0);

        network_state s;
        s.layers.push_back({2, 2, {1.0f, 2.0f, 3.0f, 4.0f}, {}});
        write_snapshot(s, path);

        const network_state back = read_snapshot(path);
        CHECK(back == s);
        CHECK(back.layers[0].weight(1, 0) == 3.0f);
    }

    TEST_CASE("multi-layer state with bias round-trips field by field") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(7);
        const network_state s = sample_state();
        write_snapshot(s, path);
        CHECK(read_snapshot(path) == s);
    }

    TEST_CASE("round trip preserves exact float bit patterns") {
        topotest::temp_dir dir("snap");
        splitmix64 rng(42);
        for (int trial = 0; trial < 20; ++trial) {
            network_state s;
            const std::uint32_t rows = 1 + static_cast<std::uint32_t>(rng.below(5));
            const std::uint32_t cols = 1 + static_cast<std::uint32_t>(rng.below(5));
            layer_weights l{rows, cols, {}, {}};
            for (std::uint32_t i = 0; i < rows * cols; ++i)
                l.weights.push_back(static_cast<float>(rng.uniform(-10, 10)));
            if (rng.below(2))
                for (std::uint32_t i = 0; i < rows; ++i)
                    l.bias.push_back(static_cast<float>(rng.uniform(-1, 1)));
            s.layers.push_back(l);
            s.step = static_cast<std::int64_t>(rng.below(1'000'000));

            const auto path = dir.path / snapshot_filename(s.step);
            write_snapshot(s, path);
            CHECK(read_snapshot(path) == s);
        }
    }

    TEST_CASE("zero bias still round-trips with has_bias flag set") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(0);
        network_state s;
        s.layers.push_back({2, 1, {1.0f, 2.0f}, {0.0f, 0.0f}});
        write_snapshot(s, path);

        const std::string bytes = slurp(path);
        // magic(4) + version(4) + layer_count(4) + rows(4) + cols(4) -> has_bias byte at 20
        REQUIRE(bytes.size() == 21 + 4 * 4);
        CHECK(bytes[20] == 1);
        const network_state back = read_snapshot(path);
        CHECK(back.layers[0].has_bias());
        CHECK(back == s);
    }

    TEST_CASE("bad magic is rejected") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / "step_00000000.nnph";
        spit(path, "XXXX garbage");
        CHECK_THROWS_AS(read_snapshot(path), bad_magic);
    }

    TEST_CASE("payload shorter than the header claims is a shape mismatch") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(0);
        network_state s;
        s.layers.push_back({2, 2, {1.0f, 2.0f, 3.0f, 4.0f}, {}});
        write_snapshot(s, path);

        std::string bytes = slurp(path);
        bytes.resize(bytes.size() - 4); // drop the last float
        spit(path, bytes);
        CHECK_THROWS_AS(read_snapshot(path), shape_mismatch);
    }

    TEST_CASE("header mutations that contradict the payload are detected") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(7);
        write_snapshot(sample_state(), path);
        const std::string good = slurp(path);

        // bump each header length field (layer_count, rows, cols) by one
        for (std::size_t offset : {8u, 12u, 16u}) {
            std::string bytes = good;
            bytes[offset] = static_cast<char>(bytes[offset] + 1);
            spit(path, bytes);
            CHECK_THROWS_AS(read_snapshot(path), input_error);
        }

        // trailing junk after the payload
        std::string bytes = good;
        bytes.push_back('\0');
        spit(path, bytes);
        CHECK_THROWS_AS(read_snapshot(path), shape_mismatch);
    }

    TEST_CASE("NaN weight refuses to serialize and writes nothing") {
        topotest::temp_dir dir("snap");
        const auto path = dir.path / snapshot_filename(0);
        network_state s;
        s.layers.push_back({1, 1, {std::numeric_limits<float>::quiet_NaN()}, {}});
        CHECK_THROWS_AS(write_snapshot(s, path), non_finite);
        CHECK(!std::filesystem::exists(path));
    }

    TEST_CASE("incompatible consecutive layers are rejected") {
        network_state s;
        s.layers.push_back({2, 2, {1, 2, 3, 4}, {}});
        s.layers.push_back({1, 3, {1, 2, 3}, {}}); // cols != previous rows
        CHECK_THROWS_AS(validate(s), shape_mismatch);
    }

    TEST_CASE("snapshot filenames carry the step index") {
        CHECK(snapshot_filename(0) == "step_00000000.nnph");
        CHECK(snapshot_filename(1234) == "step_00001234.nnph");
        CHECK(parse_snapshot_step("a/b/step_00001234.nnph") == 1234);
        CHECK(parse_snapshot_step("weird.nnph") == 0);
    }

    TEST_CASE("snapshot listing sorts numerically by step") {
        topotest::temp_dir dir("snap");
        network_state s;
        s.layers.push_back({1, 1, {1.0f}, {}});
        for (std::int64_t step : {100, 2, 30}) {
            s.step = step;
            write_snapshot(s, dir.path / snapshot_filename(step));
        }
        const auto files = list_snapshots(dir.path);
        REQUIRE(files.size() == 3);
        CHECK(parse_snapshot_step(files[0]) == 2);
        CHECK(parse_snapshot_step(files[1]) == 30);
        CHECK(parse_snapshot_step(files[2]) == 100);
    }

    TEST_CASE("metrics parse") {
        topotest::temp_dir dir("metrics");
        const auto path = dir.path / "metrics.csv";
        spit(path, "step,val_accuracy\n0,0.1\n235,0.9\n");
        const metric_series series = read_metrics(path);
        REQUIRE(series.points.size() == 2);
        CHECK(series.points[0].step == 0);
        CHECK(series.points[0].val_accuracy == doctest::Approx(0.1));
        CHECK(series.points[1].step == 235);
        CHECK(series.points[1].val_accuracy == doctest::Approx(0.9));
    }

    TEST_CASE("metrics reject accuracy outside [0,1]") {
        topotest::temp_dir dir("metrics");
        const auto path = dir.path / "metrics.csv";
        spit(path, "step,val_accuracy\n0,1.2\n");
        CHECK_THROWS_AS(read_metrics(path), parse_error);
    }

    TEST_CASE("metrics reject non-monotone steps") {
        topotest::temp_dir dir("metrics");
        const auto path = dir.path / "metrics.csv";
        spit(path, "step,val_accuracy\n10,0.5\n5,0.6\n");
        CHECK_THROWS_AS(read_metrics(path), non_monotone_steps);
    }

    TEST_CASE("metrics round-trip through the writer") {
        topotest::temp_dir dir("metrics");
        const auto path = dir.path / "metrics.csv";
        metric_series series;
        series.points = {{0, 0.125}, {5, 0.5}, {10, 0.875}};
        write_metrics(series, path);
        const metric_series back = read_metrics(path);
        REQUIRE(back.points.size() == series.points.size());
        for (std::size_t i = 0; i < back.points.size(); ++i) {
            CHECK(back.points[i].step == series.points[i].step);
            CHECK(back.points[i].val_accuracy == series.points[i].val_accuracy);
        }
    }
}
