#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include <pcot/circuit.hpp>
#include <pcot/circuit_json.hpp>
#include <pcot/dataset.hpp>
#include <pcot/inference.hpp>
#include <pcot/ppm.hpp>
#include <pcot/rng.hpp>

#include "helpers.hpp"

using namespace pcot;

TEST_CASE("rng keys are deterministic and decorrelated") {
    rng::Key k{42};
    CHECK(k.child(1).state == rng::Key{42}.child(1).state);
    CHECK(k.child(1).state != k.child(2).state);
    CHECK(k.child(1).child(2).state != k.child(2).child(1).state);
    for (int i = 0; i < 100; ++i) {
        double u = k.uniform(i);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("leaf basics") {
    Leaf b = bernoulli(0.3);
    CHECK(b.support() == 2);
    CHECK(b.mean() == doctest::Approx(0.3));
    CHECK(b.density(1) == doctest::Approx(0.3));
    CHECK(b.density(0) == doctest::Approx(0.7));
    CHECK_THROWS_AS(b.density(2), DomainError);

    Leaf c = categorical({0.2, 0.3, 0.5});
    CHECK(c.support() == 3);
    CHECK(c.mean() == doctest::Approx(1.3));
    double s = 0;
    for (double p : c.pmf()) s += p;
    CHECK(s == doctest::Approx(1.0));

    Leaf g = gaussian(0, 1);
    CHECK(g.support() == -1);
    CHECK(g.density(0) == doctest::Approx(0.3989422804014327));
    CHECK(std::exp(g.log_density(1.7)) == doctest::Approx(g.density(1.7)));

    Leaf d = dirac(4.0);
    CHECK(d.mean() == 4.0);
}

TEST_CASE("validate flags structure") {
    Circuit ok = testutil::bern_mixture(0.5, 0.1, 0.9);
    CHECK(validate(ok).ok());

    // sum over different scopes: not smooth
    Circuit ns;
    ns.num_vars = 2;
    ns.nodes.push_back(input_node(0, bernoulli(0.5)));
    ns.nodes.push_back(input_node(1, bernoulli(0.5)));
    ns.nodes.push_back(sum_node({0, 1}, {0.5, 0.5}));
    ns.root = 2;
    CHECK_FALSE(validate(ns).smooth);

    // product with overlapping scopes: not decomposable
    Circuit nd;
    nd.num_vars = 1;
    nd.nodes.push_back(input_node(0, bernoulli(0.5)));
    nd.nodes.push_back(input_node(0, bernoulli(0.5)));
    nd.nodes.push_back(product_node({0, 1}));
    nd.root = 2;
    CHECK_FALSE(validate(nd).decomposable);

    // forward reference breaks the topological-id contract
    Circuit cyc;
    cyc.num_vars = 1;
    cyc.nodes.push_back(sum_node({1, 0}, {0.5, 0.5}));
    cyc.nodes.push_back(input_node(0, bernoulli(0.5)));
    cyc.root = 0;
    CHECK_THROWS(validate(cyc));

    Circuit mismatch = ok;
    mismatch.nodes[2].weights.pop_back();
    CHECK_THROWS(validate(mismatch));
}

TEST_CASE("scopes") {
    Circuit c = testutil::bern_product({0.2, 0.4, 0.6});
    auto scopes = compute_scopes(c);
    CHECK(scopes[size_t(c.root)] == std::vector<VarId>{0, 1, 2});
    CHECK(scopes[0] == std::vector<VarId>{0});
}

TEST_CASE("evaluate: products, sums, normalization") {
    Circuit pr = testutil::bern_product({0.3, 0.4});
    CHECK(evaluate(pr, {1, 0}) == doctest::Approx(0.3 * 0.6));

    Circuit mx = testutil::bern_mixture(0.5, 0.1, 0.9);
    CHECK(evaluate(mx, {1}) == doctest::Approx(0.5));
    CHECK(std::exp(log_evaluate(mx, {1})) == doctest::Approx(0.5));

    double total = 0;
    testutil::for_each_assignment({2, 2}, [&](const std::vector<double>& x) { total += evaluate(pr, x); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("marginal") {
    Circuit pr = testutil::bern_product({0.3, 0.4});
    CHECK(marginal(pr, {1, 0}, {1, 0}) == doctest::Approx(0.3));
    CHECK(marginal(pr, {0, 0}, {0, 0}) == doctest::Approx(1.0));
    CHECK(marginal(pr, {1, 0}, {1, 1}) == doctest::Approx(evaluate(pr, {1, 0})));

    Circuit mx = testutil::bern_mixture(0.5, 0.1, 0.9);
    CHECK(marginal(mx, {1}, {1}) == doctest::Approx(0.5));
}

TEST_CASE("sampling is seed-deterministic and order-stable") {
    Circuit mx = testutil::bern_mixture(0.5, 0.1, 0.9);
    CHECK(sample(mx, rng::Key{7}) == sample(mx, rng::Key{7}));

    auto a = sample_n(mx, 3, rng::Key{7});
    auto b = sample_n(mx, 5, rng::Key{7});
    for (int i = 0; i < 3; ++i) CHECK(a[size_t(i)] == b[size_t(i)]);

    Circuit pm;
    pm.num_vars = 1;
    pm.nodes.push_back(input_node(0, categorical({0, 1})));
    pm.root = 0;
    for (const auto& s : sample_n(pm, 50, rng::Key{3})) CHECK(s[0] == 1.0);

    // binomial concentration at a fixed seed
    Circuit half = testutil::bern_product({0.5});
    double mean = 0;
    const int n = 10000;
    for (const auto& s : sample_n(half, n, rng::Key{11})) mean += s[0];
    mean /= n;
    CHECK(std::abs(mean - 0.5) < 3 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("degenerate mixture weights sample the live child") {
    Circuit mx;
    mx.num_vars = 1;
    mx.nodes.push_back(input_node(0, categorical({0, 1})));
    mx.nodes.push_back(input_node(0, categorical({1, 0})));
    mx.nodes.push_back(sum_node({0, 1}, {1.0, 0.0}));
    mx.root = 2;
    for (const auto& s : sample_n(mx, 30, rng::Key{5})) CHECK(s[0] == 1.0);
}

TEST_CASE("conditional expectation") {
    Circuit g = testutil::gauss_product({2.0}, 1.0);
    CHECK(conditional_expectation(g, {0}, {0})[0] == doctest::Approx(2.0));

    Circuit mx = testutil::gauss_mixture(0, 10, 1);
    CHECK(conditional_expectation(mx, {0}, {0})[0] == doctest::Approx(5.0));

    // two-var mixture: evidence on x0 shifts the posterior
    Circuit c;
    c.num_vars = 2;
    c.nodes.push_back(input_node(0, bernoulli(0.9)));
    c.nodes.push_back(input_node(1, bernoulli(0.9)));
    c.nodes.push_back(product_node({0, 1}));
    c.nodes.push_back(input_node(0, bernoulli(0.1)));
    c.nodes.push_back(input_node(1, bernoulli(0.1)));
    c.nodes.push_back(product_node({3, 4}));
    c.nodes.push_back(sum_node({2, 5}, {0.5, 0.5}));
    c.root = 6;
    double ey = conditional_expectation(c, {1, 0}, {1, 0})[1];
    CHECK(ey == doctest::Approx(0.9 * 0.9 + 0.1 * 0.1));  // posterior 0.9 on the first component

    Circuit pm;
    pm.num_vars = 1;
    pm.nodes.push_back(input_node(0, categorical({1, 0})));
    pm.root = 0;
    CHECK_THROWS_AS(conditional_expectation(pm, {1}, {1}), ZeroEvidenceError);
}

TEST_CASE("circuit json round-trips byte-identically") {
    Circuit c = testutil::bern_mixture(0.25, 0.1, 0.9);
    save_circuit("rt1.json", c);
    Circuit back = load_circuit("rt1.json");
    save_circuit("rt2.json", back);

    std::ifstream f1("rt1.json"), f2("rt2.json");
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);
    CHECK(!s1.empty());
    CHECK(circuit_to_json(c) == circuit_to_json(back));
    std::remove("rt1.json");
    std::remove("rt2.json");
}

TEST_CASE("circuit json rejects garbage") {
    {
        std::ofstream f("bad.json");
        f << "{\"nodes\": \"nope\"}";
    }
    CHECK_THROWS_AS(load_circuit("bad.json"), FormatError);
    CHECK_THROWS_AS(load_circuit("no_such_file.json"), FormatError);
    std::remove("bad.json");

    json j = circuit_to_json(testutil::bern_mixture(0.5, 0.1, 0.9));
    j["nodes"][2]["weights"] = {0.5, 0.4};  // off by more than the renorm window
    CHECK_THROWS(circuit_from_json(j));
}

TEST_CASE("csv round trip") {
    Dataset d = {{0, 1, 0.5}, {1, 1, -2.25}};
    save_csv("d.csv", d);
    Dataset back = load_csv("d.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0][2] == doctest::Approx(0.5));
    CHECK(back[1][2] == doctest::Approx(-2.25));
    std::remove("d.csv");
    CHECK_THROWS_AS(load_csv("no_such.csv"), FormatError);
}

TEST_CASE("ppm round trip and parsing") {
    ImageBuffer img;
    img.width = 2;
    img.height = 2;
    img.pixels = {255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};
    save_image(img, "t.ppm");
    ImageBuffer back = load_image("t.ppm");
    CHECK(back.width == 2);
    CHECK(back.height == 2);
    CHECK(back.pixels == img.pixels);
    std::remove("t.ppm");

    {
        std::ofstream f("w.ppm", std::ios::binary);
        f << "P6\n# a comment\n1 1\n255\n";
        f.put(char(255));
        f.put(char(255));
        f.put(char(255));
    }
    ImageBuffer w = load_image("w.ppm");
    CHECK(w.pixels == std::vector<std::uint8_t>{255, 255, 255});
    std::remove("w.ppm");

    {
        std::ofstream f("trunc.ppm", std::ios::binary);
        f << "P6\n2 2\n255\n";
        f.put(char(1));
    }
    CHECK_THROWS_AS(load_image("trunc.ppm"), FormatError);
    std::remove("trunc.ppm");

    {
        std::ofstream f("p3.ppm");
        f << "P3\n1 1\n255\n0 0 0\n";
    }
    CHECK_THROWS_AS(load_image("p3.ppm"), FormatError);
    std::remove("p3.ppm");
}
