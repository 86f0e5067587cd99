#include "oracles.hpp"

#include "dthp/chain.hpp"
#include "dthp/error.hpp"
#include "dthp/io.hpp"
#include "dthp/simulator.hpp"
#include "dthp/trace_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dthp;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const char* name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("kernels and models survive JSON exactly") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto model = oracle::random_model(rng, 1 + static_cast<std::size_t>(i % 3), 2 + i % 20);
        CHECK(model_from_json(json::parse(to_json(model).dump())) == model);
        for (const auto& k : model.kernels) {
            CHECK(kernel_from_json(json::parse(to_json(k).dump())) == k);
        }
    }
    const auto j = to_json(Kernel(HistogramKernel({0, 2, 7}, {1.0, 0.5})));
    CHECK(j.at("type") == "histogram");
    CHECK(j.at("J") == 2);
    CHECK(j.at("s") == json::array({0, 2, 7}));
    CHECK(to_json(Kernel(GeometricKernel(0.4, 7))).at("type") == "geometric");
}

TEST_CASE("invalid kernel JSON is rejected") {
    CHECK_THROWS_AS((void)kernel_from_json(json{{"type", "histogram"}, {"J", 1}, {"s", {0, 7}}, {"theta", {2.0}}}), Error);
    CHECK_THROWS_AS((void)kernel_from_json(json{{"type", "spline"}}), Error);
    CHECK_THROWS_AS((void)kernel_from_json(json{{"type", "geometric"}, {"beta", 1.5}, {"s_max", 7}}), Error);
    CHECK_THROWS_AS((void)model_from_json(json{{"K", 2}, {"mu", {1.0}}}), Error);
}

TEST_CASE("draws, counters and checkpoints round-trip") {
    Rng rng(9);
    const auto model = oracle::random_model(rng, 2, 6);
    const Draw d{17, -123.456789012345, model.baseline, model.magnitude, model.kernels};
    CHECK(draw_from_json(json::parse(to_json(d).dump())) == d);

    MoveCounters counters;
    counters[MoveKind::birth] = MoveCounter{10, 3, 2};
    CHECK(move_counters_from_json(to_json(counters)) == counters);

    Checkpoint cp;
    cp.chain_index = 2;
    cp.seed = 99;
    cp.iteration = 400;
    cp.model = model;
    cp.counters = counters;
    cp.rng_state = save_rng(rng);
    CHECK(checkpoint_from_json(json::parse(to_json(cp).dump())) == cp);
}

TEST_CASE("gzip round trip is lossless and deterministic") {
    std::string text;
    for (int i = 0; i < 5000; ++i) {
        text += std::to_string(i * 7919 % 1000) + ",";
    }
    const auto packed = gzip_compress(text);
    CHECK(packed.size() < text.size());
    CHECK(gzip_compress(text) == packed);
    CHECK(static_cast<unsigned char>(packed[0]) == 0x1f);
    CHECK(static_cast<unsigned char>(packed[1]) == 0x8b);
    CHECK(gzip_decompress(packed) == text);
    CHECK(gzip_decompress(gzip_compress("")) == "");
    CHECK_THROWS_AS((void)gzip_decompress("not gzip data"), Error);
}

TEST_CASE("traces round-trip through files") {
    const auto dir = scratch("dthp_trace_io");
    SimulationConfig sim;
    sim.model = make_model({1.0}, {0.5}, HistogramKernel::flat(7));
    sim.steps = 60;
    const auto data = simulate(sim);
    ChainConfig config;
    config.iterations = 50;
    config.burn_in = 10;
    const std::vector<int> lags{7};
    auto trace = run_chain(data, PriorConfig(PriorSetting::relatively_informative, 1), config, lags, 1);
    trace.config_fingerprint = "0123456789abcdef";
    const json provenance{{"version", "test"}, {"config_hash", "0123456789abcdef"}};
    write_trace(dir / "chain.jsonl.gz", trace, provenance);
    const auto back = read_trace(dir / "chain.jsonl.gz");
    CHECK(back == trace);
    CHECK(read_trace_provenance(dir / "chain.jsonl.gz") == provenance);

    // Same trace, same bytes.
    write_trace(dir / "again.jsonl.gz", trace, provenance);
    CHECK(read_file(dir / "again.jsonl.gz") == read_file(dir / "chain.jsonl.gz"));

    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt or truncated traces fail cleanly") {
    const auto dir = scratch("dthp_trace_corrupt");
    write_file_atomic(dir / "junk.jsonl.gz", "garbage");
    CHECK_THROWS_AS((void)read_trace(dir / "junk.jsonl.gz"), Error);
    write_file_atomic(dir / "bad.jsonl.gz", gzip_compress("{\"format\":\"other\"}\n"));
    CHECK_THROWS_AS((void)read_trace(dir / "bad.jsonl.gz"), Error);
    write_file_atomic(dir / "half.jsonl.gz", gzip_compress("{\"format\":\"dthp-trace\",\"version\":1}\n{\"iter"));
    CHECK_THROWS_AS((void)read_trace(dir / "half.jsonl.gz"), Error);
    CHECK_THROWS_AS((void)read_trace(dir / "absent.jsonl.gz"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("JSON files are pretty-printed with a trailing newline") {
    const auto dir = scratch("dthp_json_io");
    write_json(dir / "x.json", json{{"a", 1}});
    CHECK(read_file(dir / "x.json") == "{\n  \"a\": 1\n}\n");
    CHECK(read_json(dir / "x.json") == json{{"a", 1}});
    write_file_atomic(dir / "bad.json", "{");
    CHECK_THROWS_AS((void)read_json(dir / "bad.json"), Error);
    std::filesystem::remove_all(dir);
}
