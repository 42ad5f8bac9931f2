#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trajdp/dataset.hpp"
#include "trajdp/metrics.hpp"
#include "trajdp/pipeline.hpp"

using json = nlohmann::ordered_json;

namespace {

using namespace trajdp;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void write_report(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

json clamp_json(const std::vector<ClampRecord>& clamps) {
    json arr = json::array();
    for (const ClampRecord& c : clamps) {
        arr.push_back({{"traj", c.traj},
                       {"cell", {c.loc.cx, c.loc.cy}},
                       {"requested", c.requested},
                       {"applied", c.applied},
                       {"dataset_level", c.dataset_level}});
    }
    return arr;
}

json phase_json(const PhaseReport& p, bool timings) {
    json j{{"name", p.name},
           {"insertions", p.insertions},
           {"deletions", p.deletions},
           {"searches", p.searches},
           {"utility_loss", p.loss},
           {"clamps", clamp_json(p.clamps)}};
    if (timings) j["wall_ms"] = p.wall_ms;
    return j;
}

int cmd_anonymize(const std::string& input, const std::string& output, const std::string& mode,
                  double eps_g, double eps_l, int m, int grid, uint64_t seed,
                  const std::string& gl_order, const std::string& report_path, bool timings) {
    RunConfig cfg;
    if (mode == "pureG") cfg.mode = BudgetMode::PureG;
    else if (mode == "pureL") cfg.mode = BudgetMode::PureL;
    else if (mode == "GL") cfg.mode = BudgetMode::GL;
    else throw std::runtime_error("unknown mode: " + mode);
    if (gl_order == "global_first") cfg.gl_order = GLOrder::GlobalFirst;
    else if (gl_order == "local_first") cfg.gl_order = GLOrder::LocalFirst;
    else throw std::runtime_error("unknown gl order: " + gl_order);
    if ((cfg.mode != BudgetMode::PureL && eps_g <= 0.0) ||
        (cfg.mode != BudgetMode::PureG && eps_l <= 0.0)) {
        throw std::runtime_error("privacy budget must be positive for the selected mode");
    }
    cfg.eps_global = eps_g;
    cfg.eps_local = eps_l;
    cfg.m = m;
    cfg.granularity = grid;
    cfg.seed = seed;

    const ReadResult raw = read_samples(input);
    if (raw.samples.empty()) throw std::runtime_error(input + ": no valid samples");
    const BBox bbox = compute_bbox(raw.samples);
    IngestStats stats;
    std::vector<Trajectory> dataset = build_dataset(raw.samples, bbox, grid, &stats);
    if (dataset.empty()) throw std::runtime_error(input + ": no trajectories");

    const PipelineReport rep = run_pipeline(dataset, cfg);
    write_dataset(output, dataset, bbox, grid);

    const PrivacyBudget budget = rep.budget;
    json j{{"config",
            {{"mode", mode},
             {"eps_global", budget.eps_global},
             {"eps_local", budget.eps_local},
             {"eps_total", budget.total()},
             {"m", m},
             {"grid", grid},
             {"seed", seed},
             {"gl_order", gl_order}}},
           {"ingest",
            {{"trajectories", dataset.size()},
             {"malformed", raw.malformed},
             {"rejected", stats.rejected},
             {"resorted_objects", stats.out_of_order}}},
           {"phases", json::array()},
           {"total_utility_loss", rep.total_loss}};
    for (const PhaseReport& p : rep.phases) j["phases"].push_back(phase_json(p, timings));
    write_report(report_path, j);
    return 0;
}

int cmd_evaluate(const std::string& original, const std::string& anonymized, int bins,
                 int te_grid, int ffp_k, int m, int grid, const std::string& report_path) {
    const ReadResult ra = read_samples(original);
    const ReadResult rb = read_samples(anonymized);
    std::vector<RawSample> pooled = ra.samples;
    pooled.insert(pooled.end(), rb.samples.begin(), rb.samples.end());
    const BBox bbox = compute_bbox(pooled);
    const std::vector<Trajectory> da = build_dataset(ra.samples, bbox, grid);
    const std::vector<Trajectory> db = build_dataset(rb.samples, bbox, grid);

    std::map<std::string, const Trajectory*> bmap;
    for (const Trajectory& t : db) bmap[t.object_id] = &t;
    std::vector<Trajectory> pa, pb;
    std::vector<std::string> unpaired;
    std::set<std::string> amatched;
    for (const Trajectory& t : da) {
        auto it = bmap.find(t.object_id);
        if (it == bmap.end()) {
            unpaired.push_back(t.object_id);
            continue;
        }
        amatched.insert(t.object_id);
        pa.push_back(t);
        pb.push_back(*it->second);
    }
    for (const Trajectory& t : db) {
        if (!amatched.count(t.object_id)) unpaired.push_back(t.object_id);
    }
    for (const std::string& oid : unpaired) {
        std::cerr << "warning: unpaired object excluded: " << oid << "\n";
    }
    if (pa.empty()) throw std::runtime_error("no paired objects to evaluate");

    const MetricReport r = evaluate_all(pa, pb, grid, m, bins, te_grid, ffp_k);
    json j{{"params",
            {{"bins", bins}, {"te_grid", te_grid}, {"ffp_k", ffp_k}, {"m", m}, {"grid", grid}}},
           {"pairs", pa.size()},
           {"excluded", unpaired.size()},
           {"metrics",
            {{"la_s", r.la_s}, {"inf", r.inf}, {"de", r.de}, {"te", r.te}, {"ffp", r.ffp}}}};
    std::cout << j.dump(2) << "\n";
    write_report(report_path, j);
    return 0;
}

int cmd_bench(const std::string& sizes_str, const std::string& strategies_str, uint64_t seed,
              size_t avg_len, int grid, int m, double eps_l, const std::string& report_path) {
    std::vector<size_t> sizes;
    for (const std::string& s : split_list(sizes_str)) sizes.push_back(std::stoull(s));
    std::vector<Strategy> strategies;
    for (const std::string& s : split_list(strategies_str)) {
        Strategy st;
        if (!parse_strategy(s, st)) throw std::runtime_error("unknown strategy: " + s);
        strategies.push_back(st);
    }
    if (sizes.empty() || strategies.empty()) {
        throw std::runtime_error("bench needs at least one size and one strategy");
    }
    RunConfig cfg;
    cfg.mode = BudgetMode::PureL;
    cfg.eps_local = eps_l;
    cfg.m = m;
    cfg.granularity = grid;
    cfg.seed = seed;

    json rows = json::array();
    std::printf("%-10s %-8s %12s %8s\n", "strategy", "size", "wall_ms", "match");
    for (size_t n : sizes) {
        const std::vector<Trajectory> corpus = generate_corpus(n, avg_len, seed, grid);
        const std::vector<BenchRow> bench = bench_strategies(corpus, strategies, cfg);
        for (const BenchRow& row : bench) {
            std::printf("%-10s %-8zu %12.2f %8s\n", strategy_name(row.strategy),
                        row.dataset_size, row.wall_ms, row.output_matches ? "yes" : "NO");
            rows.push_back({{"strategy", strategy_name(row.strategy)},
                            {"size", row.dataset_size},
                            {"wall_ms", row.wall_ms},
                            {"output_matches", row.output_matches}});
            if (!row.output_matches) {
                throw std::runtime_error("strategy output mismatch, timings not comparable");
            }
        }
    }
    write_report(report_path, json{{"rows", rows}});
    return 0;
}

int cmd_gen(size_t objects, size_t avg_len, uint64_t seed, const std::string& output, int grid) {
    const std::vector<Trajectory> corpus = generate_corpus(objects, avg_len, seed, grid);
    write_dataset(output, corpus, BBox{0.0, 0.0, 1.0, 1.0}, grid);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trajectory anonymization with differentially private frequency perturbation"};
    app.require_subcommand(1);

    auto* an = app.add_subcommand("anonymize", "perturb and edit a trajectory dataset");
    std::string input, output, mode = "GL", gl_order = "global_first", report;
    double eps_g = 0.5, eps_l = 0.5;
    int m = 10, grid = 512;
    uint64_t seed = 0;
    bool timings = false;
    an->add_option("--input", input)->required();
    an->add_option("--output", output)->required();
    an->add_option("--mode", mode)->check(CLI::IsMember({"pureG", "pureL", "GL"}));
    an->add_option("--eps-global", eps_g);
    an->add_option("--eps-local", eps_l);
    an->add_option("--m", m)->check(CLI::PositiveNumber);
    an->add_option("--grid", grid);
    an->add_option("--seed", seed);
    an->add_option("--gl-order", gl_order)->check(CLI::IsMember({"global_first", "local_first"}));
    an->add_option("--report", report);
    an->add_flag("--timings", timings, "include wall times in the report");

    auto* ev = app.add_subcommand("evaluate", "compare original and anonymized datasets");
    std::string original, anonymized, ev_report;
    int bins = 20, te_grid = 8, ffp_k = 50, ev_m = 10, ev_grid = 512;
    ev->add_option("--original", original)->required();
    ev->add_option("--anonymized", anonymized)->required();
    ev->add_option("--bins", bins)->check(CLI::PositiveNumber);
    ev->add_option("--te-grid", te_grid)->check(CLI::PositiveNumber);
    ev->add_option("--ffp-k", ffp_k)->check(CLI::PositiveNumber);
    ev->add_option("--m", ev_m)->check(CLI::PositiveNumber);
    ev->add_option("--grid", ev_grid);
    ev->add_option("--report", ev_report);

    auto* be = app.add_subcommand("bench", "time the modification phase per search strategy");
    std::string sizes = "1000", strategies = "linear,UG,HG_t,HG_b,HG_+", be_report;
    uint64_t be_seed = 0;
    size_t be_len = 1800;
    int be_grid = 512, be_m = 10;
    double be_eps = 0.5;
    be->add_option("--sizes", sizes);
    be->add_option("--strategies", strategies);
    be->add_option("--seed", be_seed);
    be->add_option("--avg-len", be_len);
    be->add_option("--grid", be_grid);
    be->add_option("--m", be_m);
    be->add_option("--eps-local", be_eps);
    be->add_option("--report", be_report);

    auto* ge = app.add_subcommand("gen", "write a synthetic corpus");
    std::string ge_output;
    size_t objects = 100, ge_len = 600;
    uint64_t ge_seed = 0;
    int ge_grid = 512;
    ge->add_option("--objects", objects)->check(CLI::PositiveNumber);
    ge->add_option("--avg-len", ge_len);
    ge->add_option("--seed", ge_seed);
    ge->add_option("--output", ge_output)->required();
    ge->add_option("--grid", ge_grid);

    CLI11_PARSE(app, argc, argv);
    try {
        if (an->parsed()) {
            return cmd_anonymize(input, output, mode, eps_g, eps_l, m, grid, seed, gl_order,
                                 report, timings);
        }
        if (ev->parsed()) {
            return cmd_evaluate(original, anonymized, bins, te_grid, ffp_k, ev_m, ev_grid,
                                ev_report);
        }
        if (be->parsed()) {
            return cmd_bench(sizes, strategies, be_seed, be_len, be_grid, be_m, be_eps,
                             be_report);
        }
        if (ge->parsed()) return cmd_gen(objects, ge_len, ge_seed, ge_output, ge_grid);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
