#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <pcot/circuit_json.hpp>
#include <pcot/compatibility.hpp>
#include <pcot/coupling.hpp>
#include <pcot/dataset.hpp>
#include <pcot/ppm.hpp>
#include <pcot/rng.hpp>
#include <pcot/wm.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace pcot;

namespace {

struct RunResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    fs::create_directories("cli_scratch");
    std::string out_file = "cli_scratch/stdout.txt", err_file = "cli_scratch/stderr.txt";
    std::string cmd = std::string("\"") + PCOT_CLI_PATH + "\" " + args + " >" + out_file + " 2>" + err_file;
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = rc == -1 ? -1 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : -1);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream f(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else
            cur.push_back(ch);
    }
    parts.push_back(cur);
    return parts;
}

void write_fixture_pair(const std::string& p_path, const std::string& q_path) {
    save_circuit(p_path, testutil::bern_mixture(0.5, 0.1, 0.9));
    save_circuit(q_path, testutil::bern_mixture(0.3, 0.2, 0.8));
}

} // namespace

TEST_CASE("cli: version and bad invocations") {
    CHECK(run_cli("--version").out.find("1.0.0") != std::string::npos);
    CHECK(run_cli("").code != 0);  // a subcommand is required
    RunResult missing = run_cli("cw cli_scratch/nope.json cli_scratch/nope.json");
    CHECK(missing.code == 3);
    CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("cli cw: fixture value, self distance, and coupling output") {
    fs::create_directories("cli_scratch");
    write_fixture_pair("cli_scratch/p.json", "cli_scratch/q.json");

    RunResult r = run_cli("cw cli_scratch/p.json cli_scratch/q.json --p-order 1");
    CHECK(r.code == 0);
    CHECK(r.out.find("cw 0.22") != std::string::npos);

    RunResult self = run_cli("cw cli_scratch/p.json cli_scratch/p.json --p-order 1");
    CHECK(self.code == 0);
    CHECK(self.out.find("cw 0") != std::string::npos);

    RunResult with_out = run_cli(
        "cw cli_scratch/p.json cli_scratch/q.json --p-order 1 --out-coupling cli_scratch/c.json");
    CHECK(with_out.code == 0);
    CouplingCircuit c = load_coupling("cli_scratch/c.json");
    CHECK(c.optimal_cost == doctest::Approx(0.22));

    json manifest = json::parse(slurp("cli_scratch/c.json.manifest.json"));
    CHECK(manifest["tool"] == "pcot");
    CHECK(manifest["subcommand"] == "cw");
    CHECK(manifest["outputs"].size() == 1);
}

TEST_CASE("cli cw: explicit bijection file") {
    fs::create_directories("cli_scratch");
    Circuit p;
    p.num_vars = 2;
    p.nodes.push_back(input_node(0, bernoulli(0.1)));
    p.nodes.push_back(input_node(1, bernoulli(0.9)));
    p.nodes.push_back(product_node({0, 1}));
    p.root = 2;
    Circuit q;
    q.num_vars = 2;
    q.nodes.push_back(input_node(0, bernoulli(0.9)));
    q.nodes.push_back(input_node(1, bernoulli(0.1)));
    q.nodes.push_back(product_node({0, 1}));
    q.root = 2;
    save_circuit("cli_scratch/pb.json", p);
    save_circuit("cli_scratch/qb.json", q);
    save_bijection("cli_scratch/swap.json", {1, 0});

    RunResult ident = run_cli("cw cli_scratch/pb.json cli_scratch/qb.json --p-order 1");
    CHECK(ident.out.find("cw 1.6") != std::string::npos);
    RunResult swapped =
        run_cli("cw cli_scratch/pb.json cli_scratch/qb.json cli_scratch/swap.json --p-order 1");
    CHECK(swapped.out.find("cw 0") != std::string::npos);
}

TEST_CASE("cli cw: incompatible structures exit 2 naming the clash") {
    fs::create_directories("cli_scratch");
    Circuit p;
    p.num_vars = 3;
    p.nodes.push_back(input_node(0, bernoulli(0.5)));
    p.nodes.push_back(input_node(1, bernoulli(0.5)));
    p.nodes.push_back(input_node(2, bernoulli(0.5)));
    p.nodes.push_back(product_node({1, 2}));
    p.nodes.push_back(product_node({0, 3}));
    p.root = 4;
    Circuit q;
    q.num_vars = 3;
    q.nodes.push_back(input_node(0, bernoulli(0.5)));
    q.nodes.push_back(input_node(1, bernoulli(0.5)));
    q.nodes.push_back(input_node(2, bernoulli(0.5)));
    q.nodes.push_back(product_node({0, 1}));
    q.nodes.push_back(product_node({3, 2}));
    q.root = 4;
    save_circuit("cli_scratch/ip.json", p);
    save_circuit("cli_scratch/iq.json", q);

    RunResult r = run_cli("cw cli_scratch/ip.json cli_scratch/iq.json");
    CHECK(r.code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(r.err.find("product") != std::string::npos);
}

TEST_CASE("cli bench: grid rows, seeded determinism, and the ordering property") {
    std::string base = "bench --v-grid 2,3 --k-grid 2 --reps 2 --seed 19 --sinkhorn-samples 64 ";
    RunResult r = run_cli(base + "--out cli_scratch/bench_a.csv");
    CHECK(r.code == 0);

    auto lines = read_lines("cli_scratch/bench_a.csv");
    REQUIRE(lines.size() == 5);  // header + 2 cells x 2 reps
    CHECK(lines[0] == "pair_id,v,k,cw1,mw1,w1_exact,sinkhorn,cw_time,mw_time,exact_time,sinkhorn_time");
    for (size_t i = 1; i < lines.size(); ++i) {
        auto cols = split(lines[i], ',');
        REQUIRE(cols.size() == 11);
        CHECK(cols[0] == std::to_string(i - 1));
        if (cols[3] != "infeasible" && cols[5] != "infeasible")
            CHECK(std::stod(cols[3]) >= std::stod(cols[5]) - 1e-7);
    }

    // distance columns are reproducible; timing columns are not expected to be
    RunResult r2 = run_cli(base + "--out cli_scratch/bench_b.csv");
    CHECK(r2.code == 0);
    auto lines2 = read_lines("cli_scratch/bench_b.csv");
    REQUIRE(lines2.size() == lines.size());
    for (size_t i = 1; i < lines.size(); ++i) {
        auto a = split(lines[i], ','), b = split(lines2[i], ',');
        for (int col = 0; col < 7; ++col) CHECK(a[size_t(col)] == b[size_t(col)]);
    }

    json manifest = json::parse(slurp("cli_scratch/bench_a.csv.manifest.json"));
    CHECK(manifest["subcommand"] == "bench");
    CHECK(manifest["config"]["seed"] == 19);

    // a methods subset leaves the other columns empty
    RunResult sub = run_cli(
        "bench --v-grid 2 --k-grid 2 --reps 1 --seed 3 --methods cw --out cli_scratch/bench_c.csv");
    CHECK(sub.code == 0);
    auto cols = split(read_lines("cli_scratch/bench_c.csv")[1], ',');
    CHECK(cols[3] != "");
    CHECK(cols[4] == "");
    CHECK(cols[5] == "");
}

TEST_CASE("cli learn: wm fit, trace, no-op iteration count, and em parity") {
    fs::create_directories("cli_scratch");
    Dataset data;
    rng::Key key{71};
    for (int i = 0; i < 30; ++i) {
        data.push_back({key.child(i).uniform(0) - 0.5});
        data.push_back({10 + key.child(i).uniform(1) - 0.5});
    }
    save_csv("cli_scratch/two_clusters.csv", data);
    save_circuit("cli_scratch/structure.json", testutil::gauss_mixture(2, 7, 1.5));

    RunResult wm = run_cli(
        "learn cli_scratch/two_clusters.csv cli_scratch/structure.json --method wm --iters 20 "
        "--out cli_scratch/model_wm.json --trace cli_scratch/trace.csv");
    CHECK(wm.code == 0);
    CHECK(wm.out.find("ecw ") != std::string::npos);
    CHECK(wm.out.find("bpd ") != std::string::npos);

    auto trace = read_lines("cli_scratch/trace.csv");
    REQUIRE(trace.size() >= 3);
    CHECK(trace[0] == "iteration,ecw,bpd,wall_time");
    double prev = std::stod(split(trace[1], ',')[1]);
    for (size_t i = 2; i < trace.size(); ++i) {
        double cur = std::stod(split(trace[i], ',')[1]);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }

    // zero iterations: the model keeps the structure's parameters
    RunResult noop = run_cli(
        "learn cli_scratch/two_clusters.csv cli_scratch/structure.json --method wm --iters 0 "
        "--out cli_scratch/model_noop.json");
    CHECK(noop.code == 0);
    CHECK(circuit_to_json(load_circuit("cli_scratch/model_noop.json")) ==
          circuit_to_json(load_circuit("cli_scratch/structure.json")));

    RunResult em = run_cli(
        "learn cli_scratch/two_clusters.csv cli_scratch/structure.json --method em --iters 20 "
        "--out cli_scratch/model_em.json");
    CHECK(em.code == 0);

    Circuit m_wm = load_circuit("cli_scratch/model_wm.json");
    Circuit m_em = load_circuit("cli_scratch/model_em.json");
    double b_wm = bits_per_dimension(m_wm, data);
    double b_em = bits_per_dimension(m_em, data);
    CHECK(std::abs(b_wm - b_em) <= 0.1);

    // stochastic variant is seed-reproducible
    std::string stoch =
        "learn cli_scratch/two_clusters.csv cli_scratch/structure.json --method wm-stochastic "
        "--p-route 0.3 --iters 10 --rel-tol 0 --seed 5 --out ";
    CHECK(run_cli(stoch + "cli_scratch/model_s1.json").code == 0);
    CHECK(run_cli(stoch + "cli_scratch/model_s2.json").code == 0);
    CHECK(slurp("cli_scratch/model_s1.json") == slurp("cli_scratch/model_s2.json"));

    RunResult bad = run_cli(
        "learn cli_scratch/two_clusters.csv cli_scratch/structure.json --method nope");
    CHECK(bad.code == 3);
}

TEST_CASE("cli color-transfer: endpoints and midpoint") {
    fs::create_directories("cli_scratch");
    auto flat = [](std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        ImageBuffer img;
        img.width = 10;
        img.height = 6;
        rng::Key key{std::uint64_t(r) * 7 + b};
        for (int i = 0; i < 60; ++i) {
            int jig = int(key.child(i).uniform(0) * 7) - 3;
            img.pixels.push_back(std::uint8_t(std::clamp(int(r) + jig, 0, 255)));
            img.pixels.push_back(std::uint8_t(std::clamp(int(g) + jig, 0, 255)));
            img.pixels.push_back(std::uint8_t(std::clamp(int(b) + jig, 0, 255)));
        }
        return img;
    };
    ImageBuffer red = flat(200, 30, 30), blue = flat(30, 30, 200);
    save_image(red, "cli_scratch/red.ppm");
    save_image(blue, "cli_scratch/blue.ppm");

    std::string base = "color-transfer cli_scratch/red.ppm cli_scratch/blue.ppm --components 3 "
                       "--iters 8 --seed 7 ";
    CHECK(run_cli(base + "--t 0 --out cli_scratch/t0.ppm").code == 0);
    ImageBuffer t0 = load_image("cli_scratch/t0.ppm");
    for (size_t i = 0; i < red.pixels.size(); ++i)
        CHECK(std::abs(int(t0.pixels[i]) - int(red.pixels[i])) <= 1);

    CHECK(run_cli(base + "--t 1 --out cli_scratch/t1.ppm").code == 0);
    ImageBuffer t1 = load_image("cli_scratch/t1.ppm");
    int target[3] = {30, 30, 200};
    for (size_t i = 0; i < t1.pixels.size(); ++i)
        CHECK(std::abs(int(t1.pixels[i]) - target[i % 3]) <= 13);

    CHECK(run_cli(base + "--t 0.5 --out cli_scratch/t5.ppm").code == 0);
    ImageBuffer t5 = load_image("cli_scratch/t5.ppm");
    int mid[3] = {115, 30, 115};
    for (size_t i = 0; i < t5.pixels.size(); ++i)
        CHECK(std::abs(int(t5.pixels[i]) - mid[i % 3]) <= 13);

    CHECK(fs::exists("cli_scratch/t1.ppm.manifest.json"));

    RunResult bad = run_cli("color-transfer cli_scratch/red.ppm cli_scratch/missing.ppm "
                            "--out cli_scratch/x.ppm");
    CHECK(bad.code == 3);
}
