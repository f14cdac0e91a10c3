// Compares the OpenMP kernels with their serial reference implementations:
// same inputs, asserts bit-identical outputs, reports wall times side by side.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <pcot/circuit_json.hpp>
#include <pcot/coupling.hpp>
#include <pcot/generator.hpp>
#include <pcot/parallel.hpp>
#include <pcot/rng.hpp>
#include <pcot/wm.hpp>

namespace {

struct Timing {
    double serial = 0, parallel = 0;
    bool identical = false;
};

void print_row(const char* name, const Timing& t) {
    double speedup = t.parallel > 0 ? t.serial / t.parallel : 0.0;
    std::printf("%-18s %10.4fs %10.4fs %8.2fx   %s\n", name, t.serial, t.parallel, speedup,
                t.identical ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    int v = 16, k = 6, n = 2000, reps = 3;
    std::uint64_t seed = 0;
    app.add_option("--v", v, "generator variable count");
    app.add_option("--k", k, "generator branching factor");
    app.add_option("--n", n, "dataset rows for the inference kernel");
    app.add_option("--reps", reps, "timing repetitions (best of)");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    pcot::GenSpec spec;
    spec.v = v;
    spec.k = k;
    spec.seed = seed;
    pcot::GeneratedPair pair = pcot::generate_pair(spec);
    pcot::Bijection bij = pcot::identity_bijection(v);

    // synthetic binary dataset, fixed derivation from the seed
    pcot::Dataset data;
    data.assign(size_t(n), std::vector<double>(size_t(v), 0.0));
    pcot::rng::Key dkey = pcot::rng::Key{seed}.child(0x44);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < v; ++j)
            data[size_t(i)][size_t(j)] = dkey.child(i).uniform(j) < 0.5 ? 0.0 : 1.0;

    std::printf("pair: v=%d k=%d (|P|=%zu nodes), data: %d x %d, host threads: %d\n\n", v, k,
                pair.p.nodes.size(), n, v, pcot::parallel::threads());
    std::printf("%-18s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    auto best_of = [&](auto&& fn) {
        double best = 1e300;
        for (int r = 0; r < reps; ++r) {
            double t0 = pcot::parallel::wtime();
            fn();
            best = std::min(best, pcot::parallel::wtime() - t0);
        }
        return best;
    };

    {
        Timing t;
        pcot::CouplingCircuit cs, cp;
        t.serial = best_of([&] { cs = pcot::couple_serial(pair.p, pair.q, bij, 2); });
        t.parallel = best_of([&] { cp = pcot::couple(pair.p, pair.q, bij, 2); });
        t.identical = cs.optimal_cost == cp.optimal_cost &&
                      circuit_to_json(cs.circuit) == circuit_to_json(cp.circuit);
        print_row("couple", t);
    }

    {
        Timing t;
        pcot::DistanceCache ds, dp;
        pcot::parallel::set_threads(1);
        t.serial = best_of([&] { ds = pcot::inference_pass(pair.p, data, 2); });
        pcot::parallel::set_threads(0);
        t.parallel = best_of([&] { dp = pcot::inference_pass(pair.p, data, 2); });
        t.identical = ds.table == dp.table;
        print_row("inference_pass", t);
    }

    {
        Timing t;
        pcot::DistanceCache cache = pcot::inference_pass(pair.p, data, 2);
        pcot::WMConfig cfg;
        pcot::Circuit ls, lp;
        std::vector<std::vector<int>> rs, rp;
        pcot::parallel::set_threads(1);
        t.serial = best_of([&] {
            auto r = pcot::learn_pass(pair.p, data, cache, cfg);
            ls = std::move(r.first);
            rs = std::move(r.second.choice);
        });
        pcot::parallel::set_threads(0);
        t.parallel = best_of([&] {
            auto r = pcot::learn_pass(pair.p, data, cache, cfg);
            lp = std::move(r.first);
            rp = std::move(r.second.choice);
        });
        t.identical = rs == rp && circuit_to_json(ls) == circuit_to_json(lp);
        print_row("learn_pass", t);
    }

    return 0;
}
