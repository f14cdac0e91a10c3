#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <pcot/baselines.hpp>
#include <pcot/circuit_json.hpp>
#include <pcot/color_transfer.hpp>
#include <pcot/coupling.hpp>
#include <pcot/dataset.hpp>
#include <pcot/em.hpp>
#include <pcot/generator.hpp>
#include <pcot/parallel.hpp>
#include <pcot/ppm.hpp>
#include <pcot/rng.hpp>
#include <pcot/wm.hpp>

namespace pcot_cli {

namespace {

using pcot::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_manifest(const std::string& primary_out, const std::string& subcommand, json config,
                    std::vector<std::string> inputs, std::vector<std::string> outputs, double wall_s) {
    json m;
    m["tool"] = "pcot";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["config"] = std::move(config);
    m["inputs"] = std::move(inputs);
    m["outputs"] = std::move(outputs);
    m["wall_time_s"] = wall_s;
    std::ofstream f(primary_out + ".manifest.json");
    if (!f) throw pcot::FormatError("cannot write manifest next to " + primary_out);
    f << m.dump(2) << "\n";
}

pcot::LeafKind parse_leaf_kind(const std::string& s) {
    if (s == "bernoulli") return pcot::LeafKind::Bernoulli;
    if (s == "categorical") return pcot::LeafKind::Categorical;
    if (s == "gaussian") return pcot::LeafKind::Gaussian;
    throw pcot::FormatError("unknown leaf kind: " + s);
}

// ---------------------------------------------------------------- cw

struct CwOpts {
    std::string p_path, q_path, bij_path, out_coupling;
    int p_order = 1;
};

void run_cw(const CwOpts& o) {
    double t0 = pcot::parallel::wtime();
    pcot::Circuit p = pcot::load_circuit(o.p_path);
    pcot::Circuit q = pcot::load_circuit(o.q_path);
    pcot::Bijection bij = o.bij_path.empty() ? pcot::identity_bijection(p.num_vars)
                                             : pcot::load_bijection(o.bij_path);
    pcot::CouplingCircuit c = pcot::couple(p, q, bij, o.p_order);
    double wall = pcot::parallel::wtime() - t0;

    std::printf("cw_p_power %s\n", fmt(c.optimal_cost).c_str());
    std::printf("cw %s\n", fmt(std::pow(c.optimal_cost, 1.0 / o.p_order)).c_str());

    if (!o.out_coupling.empty()) {
        pcot::save_coupling(o.out_coupling, c);
        json cfg = {{"p_order", o.p_order}};
        std::vector<std::string> inputs = {o.p_path, o.q_path};
        if (!o.bij_path.empty()) inputs.push_back(o.bij_path);
        write_manifest(o.out_coupling, "cw", cfg, inputs, {o.out_coupling}, wall);
    }
}

// ---------------------------------------------------------------- bench

struct BenchOpts {
    std::vector<int> v_grid{2};
    std::vector<int> k_grid{2};
    int reps = 1;
    std::string methods = "cw,mw,exact,sinkhorn";
    std::string leaf_kind = "bernoulli";
    std::uint64_t seed = 0;
    int sinkhorn_samples = 256;
    std::string out;
};

bool has_method(const std::string& methods, const std::string& m) {
    size_t pos = 0;
    while (pos <= methods.size()) {
        size_t end = methods.find(',', pos);
        if (end == std::string::npos) end = methods.size();
        if (methods.compare(pos, end - pos, m) == 0) return true;
        pos = end + 1;
    }
    return false;
}

// Distance caps: unrolled mixtures above the component cap, or whose pairing
// program would be huge, and enumeration past its support cap, all report
// "infeasible" instead of failing the whole run.
void run_bench(const BenchOpts& o) {
    if (o.v_grid.empty() || o.k_grid.empty()) throw pcot::DomainError("empty benchmark grid");
    if (o.reps < 1) throw pcot::DomainError("reps must be >= 1");
    const bool do_cw = has_method(o.methods, "cw"), do_mw = has_method(o.methods, "mw");
    const bool do_exact = has_method(o.methods, "exact"), do_sink = has_method(o.methods, "sinkhorn");

    double t_start = pcot::parallel::wtime();
    struct Row {
        int v, k, rep;
        std::string cells;
    };
    std::vector<Row> rows;

    for (int v : o.v_grid)
        for (int k : o.k_grid)
            for (int rep = 0; rep < o.reps; ++rep) {
                pcot::GenSpec spec;
                spec.v = v;
                spec.k = k;
                spec.leaf_kind = parse_leaf_kind(o.leaf_kind);
                spec.seed = pcot::rng::Key{o.seed}.child(v).child(k).child(rep).state;
                pcot::GeneratedPair pair = pcot::generate_pair(spec);
                pcot::Bijection bij = pcot::identity_bijection(v);

                std::string dist[4] = {"", "", "", ""}, time[4] = {"", "", "", ""};
                auto attempt = [&](int slot, auto&& fn) {
                    double t0 = pcot::parallel::wtime();
                    try {
                        dist[slot] = fmt(fn());
                    } catch (const pcot::TooLargeError&) {
                        dist[slot] = "infeasible";
                    } catch (const pcot::DomainError&) {
                        dist[slot] = "infeasible";
                    } catch (const pcot::UnsupportedPairError&) {
                        dist[slot] = "infeasible";
                    }
                    time[slot] = fmt(pcot::parallel::wtime() - t0);
                };

                if (do_cw) attempt(0, [&] { return pcot::cw_cost(pair.p, pair.q, bij, 1); });
                if (do_mw)
                    attempt(1, [&] {
                        double cp = pcot::unroll_count(pair.p), cq = pcot::unroll_count(pair.q);
                        if (cp * cq > 4e6)
                            throw pcot::TooLargeError("mixture pairing program too large");
                        return pcot::mixture_wasserstein(pcot::unroll(pair.p), pcot::unroll(pair.q), 1)
                            .distance_p_power;
                    });
                if (do_exact)
                    attempt(2, [&] { return pcot::exact_wasserstein(pair.p, pair.q, 1).distance_p_power; });
                if (do_sink)
                    attempt(3, [&] {
                        return pcot::sinkhorn_between_circuits(
                            pair.p, pair.q, 1, o.sinkhorn_samples, -1.0,
                            pcot::rng::Key{spec.seed}.child(0x5349).state);
                    });

                Row row;
                row.v = v;
                row.k = k;
                row.rep = rep;
                row.cells = dist[0] + "," + dist[1] + "," + dist[2] + "," + dist[3] + "," + time[0] +
                            "," + time[1] + "," + time[2] + "," + time[3];
                rows.push_back(std::move(row));
            }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.v, a.k, a.rep) < std::tie(b.v, b.k, b.rep);
    });

    std::ofstream f(o.out);
    if (!f) throw pcot::FormatError("cannot write " + o.out);
    f << "pair_id,v,k,cw1,mw1,w1_exact,sinkhorn,cw_time,mw_time,exact_time,sinkhorn_time\n";
    for (size_t i = 0; i < rows.size(); ++i)
        f << i << "," << rows[i].v << "," << rows[i].k << "," << rows[i].cells << "\n";
    f.close();

    json cfg = {{"v_grid", o.v_grid},       {"k_grid", o.k_grid},
                {"reps", o.reps},           {"methods", o.methods},
                {"leaf_kind", o.leaf_kind}, {"seed", o.seed},
                {"sinkhorn_samples", o.sinkhorn_samples}};
    write_manifest(o.out, "bench", cfg, {}, {o.out}, pcot::parallel::wtime() - t_start);
    std::printf("wrote %zu rows to %s\n", rows.size(), o.out.c_str());
}

// ---------------------------------------------------------------- learn

struct LearnOpts {
    std::string data_path, structure_path;
    std::string method = "wm";
    double p_route = 0.1;
    int iters = 50;
    int p_order = 2;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    std::string out = "model.json";
    std::string trace_path;
};

void run_learn(const LearnOpts& o) {
    if (o.method != "wm" && o.method != "wm-stochastic" && o.method != "em")
        throw pcot::FormatError("unknown method: " + o.method);
    if (o.iters < 0) throw pcot::DomainError("iters must be >= 0");

    double t_start = pcot::parallel::wtime();
    pcot::Dataset data = pcot::load_csv(o.data_path);
    pcot::Circuit cur = pcot::load_circuit(o.structure_path);
    if (data.empty()) throw pcot::FormatError("empty dataset: " + o.data_path);
    if (int(data[0].size()) != cur.num_vars)
        throw pcot::FormatError("data has " + std::to_string(data[0].size()) +
                                " columns, structure expects " + std::to_string(cur.num_vars));

    pcot::WMConfig cfg;
    cfg.p_order = o.p_order;
    cfg.stochastic_p = o.method == "wm-stochastic" ? o.p_route : 0.0;
    cfg.max_iters = o.iters;
    cfg.rel_tol = o.rel_tol;
    cfg.seed = o.seed;

    struct TraceRow {
        int iteration;
        double ecw, bpd, wall;
    };
    std::vector<TraceRow> trace;
    double e = pcot::ecw(cur, data, cfg.p_order);
    trace.push_back({0, e, pcot::bits_per_dimension(cur, data), 0.0});

    for (int it = 1; it <= o.iters; ++it) {
        double t0 = pcot::parallel::wtime();
        double prev = trace.back().ecw;
        if (o.method == "em") {
            cur = pcot::fit_em(cur, data, 1, o.seed);
        } else {
            pcot::DistanceCache cache = pcot::inference_pass(cur, data, cfg.p_order);
            cur = pcot::learn_pass(cur, data, cache, cfg, it - 1).first;
        }
        e = pcot::ecw(cur, data, cfg.p_order);
        trace.push_back({it, e, pcot::bits_per_dimension(cur, data), pcot::parallel::wtime() - t0});
        if (o.method != "em" && prev - e < cfg.rel_tol * std::max(std::abs(prev), 1e-30)) break;
    }

    pcot::save_circuit(o.out, cur);
    std::vector<std::string> outputs = {o.out};
    if (!o.trace_path.empty()) {
        std::ofstream f(o.trace_path);
        if (!f) throw pcot::FormatError("cannot write " + o.trace_path);
        f << "iteration,ecw,bpd,wall_time\n";
        for (const TraceRow& r : trace)
            f << r.iteration << "," << fmt(r.ecw) << "," << fmt(r.bpd) << "," << fmt(r.wall) << "\n";
        outputs.push_back(o.trace_path);
    }

    std::printf("ecw %s\n", fmt(trace.back().ecw).c_str());
    std::printf("bpd %s\n", fmt(trace.back().bpd).c_str());

    json cfg_json = {{"method", o.method},   {"p_route", o.p_route}, {"iters", o.iters},
                     {"p_order", o.p_order}, {"rel_tol", o.rel_tol}, {"seed", o.seed}};
    write_manifest(o.out, "learn", cfg_json, {o.data_path, o.structure_path}, outputs,
                   pcot::parallel::wtime() - t_start);
}

// ---------------------------------------------------------------- color-transfer

struct ColorOpts {
    std::string src_path, dst_path;
    double t = 1.0;
    int components = 10;
    int iters = 30;
    std::uint64_t seed = 0;
    std::string out = "out.ppm";
};

void run_color_transfer(const ColorOpts& o) {
    double t_start = pcot::parallel::wtime();
    pcot::ImageBuffer src = pcot::load_image(o.src_path);
    pcot::ImageBuffer dst = pcot::load_image(o.dst_path);

    pcot::WMConfig cfg;
    cfg.p_order = 2;
    cfg.max_iters = o.iters;
    cfg.seed = o.seed;
    pcot::ImageBuffer out = pcot::color_transfer(src, dst, o.components, o.t, cfg);
    pcot::save_image(out, o.out);

    json cfg_json = {{"t", o.t}, {"components", o.components}, {"iters", o.iters}, {"seed", o.seed}};
    write_manifest(o.out, "color-transfer", cfg_json, {o.src_path, o.dst_path}, {o.out},
                   pcot::parallel::wtime() - t_start);
    std::printf("wrote %s\n", o.out.c_str());
}

} // namespace

int exit_code_for(const std::string& error_code) {
    if (error_code == "NotCompatibleError" || error_code == "BijectionError" ||
        error_code == "InconsistentDecompositionError" || error_code == "UnsupportedPairError")
        return 2;
    if (error_code == "TooLargeError") return 4;
    return 3;
}

void register_commands(CLI::App& app) {
    auto cw = std::make_shared<CwOpts>();
    CLI::App* c = app.add_subcommand("cw", "Wasserstein distance between two circuit files");
    c->add_option("p", cw->p_path, "first circuit JSON")->required();
    c->add_option("q", cw->q_path, "second circuit JSON")->required();
    c->add_option("bijection", cw->bij_path, "variable bijection JSON (default: identity)");
    c->add_option("--p-order", cw->p_order, "Wasserstein order")->check(CLI::PositiveNumber);
    c->add_option("--out-coupling", cw->out_coupling, "write the coupling circuit here");
    c->callback([cw] { run_cw(*cw); });

    auto bench = std::make_shared<BenchOpts>();
    CLI::App* b = app.add_subcommand("bench", "distance benchmarks over generated circuit pairs");
    b->add_option("--v-grid", bench->v_grid, "variable counts")->delimiter(',');
    b->add_option("--k-grid", bench->k_grid, "branching factors")->delimiter(',');
    b->add_option("--reps", bench->reps, "pairs per grid cell");
    b->add_option("--methods", bench->methods, "subset of cw,mw,exact,sinkhorn");
    b->add_option("--leaf-kind", bench->leaf_kind, "bernoulli|categorical|gaussian");
    b->add_option("--seed", bench->seed, "master seed");
    b->add_option("--sinkhorn-samples", bench->sinkhorn_samples, "samples per circuit");
    b->add_option("--out", bench->out, "output CSV")->required();
    b->callback([bench] { run_bench(*bench); });

    auto learn = std::make_shared<LearnOpts>();
    CLI::App* l = app.add_subcommand("learn", "fit circuit parameters to data");
    l->add_option("data", learn->data_path, "dataset CSV")->required();
    l->add_option("structure", learn->structure_path, "circuit JSON used as structure")->required();
    l->add_option("--method", learn->method, "wm|wm-stochastic|em");
    l->add_option("--p-route", learn->p_route, "stochastic routing probability");
    l->add_option("--iters", learn->iters, "iteration cap");
    l->add_option("--p-order", learn->p_order, "Wasserstein order for WM");
    l->add_option("--rel-tol", learn->rel_tol, "relative ECW improvement to keep going");
    l->add_option("--seed", learn->seed, "seed for stochastic routing");
    l->add_option("--out", learn->out, "learned circuit JSON");
    l->add_option("--trace", learn->trace_path, "per-iteration CSV");
    l->callback([learn] { run_learn(*learn); });

    auto ct = std::make_shared<ColorOpts>();
    CLI::App* t = app.add_subcommand("color-transfer", "move an image's palette toward another's");
    t->add_option("src", ct->src_path, "source P6 image")->required();
    t->add_option("dst", ct->dst_path, "palette P6 image")->required();
    t->add_option("--t", ct->t, "geodesic position, 0 = source, 1 = transferred");
    t->add_option("--components", ct->components, "mixture components per image");
    t->add_option("--iters", ct->iters, "fit iteration cap");
    t->add_option("--seed", ct->seed, "fit seed");
    t->add_option("--out", ct->out, "output image")->required();
    t->callback([ct] { run_color_transfer(*ct); });
}

} // namespace pcot_cli
