#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "trajdp/dataset.hpp"
#include "trajdp/pipeline.hpp"
#include "trajdp/signature.hpp"

using namespace trajdp;

namespace {

Trajectory make(std::string id, std::vector<Location> locs) {
    Trajectory t;
    t.object_id = std::move(id);
    double ts = 0.0;
    for (Location l : locs) t.points.push_back({l, ts++});
    return t;
}

std::vector<Trajectory> toy_dataset() {
    return {make("a", {{10, 10}, {20, 10}, {10, 10}, {30, 40}, {20, 10}}),
            make("b", {{100, 100}, {110, 100}, {100, 100}, {120, 130}}),
            make("c", {{200, 7}, {210, 7}, {200, 7}, {210, 7}, {250, 50}}),
            make("d", {{400, 400}, {410, 410}, {400, 400}}),
            make("e", {{5, 300}, {6, 300}, {5, 300}, {7, 301}})};
}

bool same_dataset(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].object_id != b[i].object_id || a[i].points.size() != b[i].points.size()) {
            return false;
        }
        for (size_t j = 0; j < a[i].points.size(); ++j) {
            if (a[i].points[j].loc != b[i].points[j].loc || a[i].points[j].t != b[i].points[j].t) {
                return false;
            }
        }
    }
    return true;
}

int count_loc(const Trajectory& t, Location q) {
    int n = 0;
    for (const TrajPoint& p : t.points) n += p.loc == q;
    return n;
}

}  // namespace

TEST_CASE("pipeline runs are deterministic per (input, config, seed)") {
    RunConfig cfg;
    cfg.mode = BudgetMode::GL;
    cfg.seed = 42;
    auto d1 = toy_dataset();
    auto d2 = toy_dataset();
    const PipelineReport r1 = run_pipeline(d1, cfg);
    const PipelineReport r2 = run_pipeline(d2, cfg);
    CHECK(same_dataset(d1, d2));
    CHECK(r1.total_loss == r2.total_loss);
    REQUIRE(r1.phases.size() == 2);
    CHECK(r1.phases[0].name == "global");
    CHECK(r1.phases[1].name == "local");

    auto d3 = toy_dataset();
    cfg.seed = 43;
    run_pipeline(d3, cfg);
    CHECK_FALSE(same_dataset(d1, d3));  // seed actually feeds the noise
}

TEST_CASE("local mode lands the documented per-trajectory draws") {
    RunConfig cfg;
    cfg.mode = BudgetMode::PureL;
    cfg.eps_local = 0.5;
    cfg.m = 3;
    cfg.seed = 99;
    const auto original = toy_dataset();

    // replay the published stream layout: per-trajectory substream, list
    // draws first, noise draws second
    const SignatureResult sig = extract_signatures(original, cfg.m);
    std::vector<PerturbedPF> expected;
    for (size_t i = 0; i < original.size(); ++i) {
        Rng rng = substream(cfg.seed, kLocalNoiseStream, i);
        const auto list = select_point_list(sig.signatures.ranked[i], sig.candidates, cfg.m, rng);
        LaplaceNoise noise(rng);
        expected.push_back(perturb_pf(list, compute_pf(original[i]), cfg.m, cfg.eps_local, noise));
    }

    auto dataset = original;
    const PipelineReport report = run_pipeline(dataset, cfg);
    REQUIRE(report.phases.size() == 1);
    CHECK(report.budget.eps_global == 0.0);
    CHECK(report.budget.eps_local == 0.5);
    for (size_t i = 0; i < dataset.size(); ++i) {
        for (const PFEntry& e : expected[i].entries) {
            CHECK(count_loc(dataset[i], e.loc) == e.f_star);
        }
    }
}

TEST_CASE("gl order flag swaps the phases") {
    RunConfig cfg;
    cfg.mode = BudgetMode::GL;
    cfg.seed = 7;
    cfg.gl_order = GLOrder::LocalFirst;
    auto d = toy_dataset();
    const PipelineReport r = run_pipeline(d, cfg);
    REQUIRE(r.phases.size() == 2);
    CHECK(r.phases[0].name == "local");
    CHECK(r.phases[1].name == "global");
}

TEST_CASE("bench strategies agree on the edited corpus") {
    const auto dataset = generate_corpus(6, 1800, 21, 512);
    RunConfig cfg;
    cfg.eps_local = 0.5;
    cfg.seed = 21;
    const auto rows = bench_strategies(
        dataset, {Strategy::Linear, Strategy::UG, Strategy::HGTopDown, Strategy::HGBottomUp,
                  Strategy::HGBud},
        cfg);
    REQUIRE(rows.size() == 5);
    for (const BenchRow& row : rows) {
        CHECK(row.output_matches);
        CHECK(row.dataset_size == 6);
        CHECK(row.wall_ms >= 0.0);
    }
}

TEST_CASE("strategy names round trip") {
    for (const char* name : {"linear", "UG", "HG_t", "HG_b", "HG_+"}) {
        Strategy s;
        REQUIRE(parse_strategy(name, s));
        CHECK(strategy_name(s) == doctest::String(name));
    }
    Strategy s;
    CHECK_FALSE(parse_strategy("quadtree", s));
}

TEST_CASE("generated corpus shape and determinism") {
    const auto a = generate_corpus(12, 1800, 5, 512);
    const auto b = generate_corpus(12, 1800, 5, 512);
    CHECK(same_dataset(a, b));
    REQUIRE(a.size() == 12);

    std::set<std::string> ids;
    size_t total = 0;
    int32_t min_cx = 512, max_cx = -1, min_cy = 512, max_cy = -1;
    for (const Trajectory& t : a) {
        ids.insert(t.object_id);
        total += t.points.size();
        for (const TrajPoint& p : t.points) {
            min_cx = std::min(min_cx, p.loc.cx);
            max_cx = std::max(max_cx, p.loc.cx);
            min_cy = std::min(min_cy, p.loc.cy);
            max_cy = std::max(max_cy, p.loc.cy);
        }
    }
    CHECK(ids.size() == 12);
    const double avg = static_cast<double>(total) / 12.0;
    CHECK(avg > 1800 * 0.8);
    CHECK(avg < 1800 * 1.25);
    // ring extremes pin the bounding box so output files round trip
    CHECK(min_cx == 0);
    CHECK(max_cx == 511);
    CHECK(min_cy == 0);
    CHECK(max_cy == 511);
}

TEST_CASE("csv write and read round trip exactly") {
    namespace fs = std::filesystem;
    const auto dataset = generate_corpus(4, 1800, 33, 512);
    const fs::path path = fs::temp_directory_path() / "trajdp_roundtrip.csv";
    write_dataset(path.string(), dataset, BBox{0.0, 0.0, 1.0, 1.0}, 512);

    const ReadResult raw = read_samples(path.string());
    CHECK(raw.malformed == 0);
    const BBox box = compute_bbox(raw.samples);
    const auto rebuilt = build_dataset(raw.samples, box, 512);
    CHECK(same_dataset(dataset, rebuilt));
    fs::remove(path);
}

TEST_CASE("csv reader skips malformed rows and checks the header") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "trajdp_bad.csv";
    {
        std::ofstream out(path);
        out << "obj_id,timestamp,lon,lat\n";
        out << "a,1,0.5,0.5\n";
        out << "a,not_a_number,0.5,0.5\n";
        out << "a,2,0.6\n";
        out << ",3,0.6,0.6\n";
        out << "b,1,0.1,0.9\n";
    }
    const ReadResult res = read_samples(path.string());
    CHECK(res.samples.size() == 2);
    CHECK(res.malformed == 3);
    fs::remove(path);

    const fs::path bad = fs::temp_directory_path() / "trajdp_badheader.csv";
    {
        std::ofstream out(bad);
        out << "id,t,x,y\n";
    }
    CHECK_THROWS(read_samples(bad.string()));
    fs::remove(bad);
    CHECK_THROWS(read_samples((fs::temp_directory_path() / "no_such_file.csv").string()));
}

TEST_CASE("ingest sorts out-of-order samples per object") {
    std::vector<RawSample> samples{{"x", 5.0, 0.8, 0.8},
                                   {"x", 1.0, 0.2, 0.2},
                                   {"y", 1.0, 0.5, 0.5}};
    IngestStats stats;
    const auto ds = build_dataset(samples, BBox{0, 0, 1, 1}, 512, &stats);
    REQUIRE(ds.size() == 2);
    CHECK(ds[0].object_id == "x");
    CHECK(ds[0].points[0].t == 1.0);
    CHECK(ds[0].points[1].t == 5.0);
    CHECK(stats.out_of_order == 1);
    CHECK(stats.rejected == 0);
}
