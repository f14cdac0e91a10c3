#pragma once
// Builders and brute-force oracles shared across the test binaries.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <pcot/circuit.hpp>
#include <pcot/inference.hpp>
#include <pcot/rng.hpp>

namespace testutil {

// sum(w, 1-w) over Bernoulli(pa), Bernoulli(pb), single variable
inline pcot::Circuit bern_mixture(double w, double pa, double pb) {
    pcot::Circuit c;
    c.num_vars = 1;
    c.nodes.push_back(pcot::input_node(0, pcot::bernoulli(pa)));
    c.nodes.push_back(pcot::input_node(0, pcot::bernoulli(pb)));
    c.nodes.push_back(pcot::sum_node({0, 1}, {w, 1.0 - w}));
    c.root = 2;
    return c;
}

inline pcot::Circuit bern_product(const std::vector<double>& ps) {
    pcot::Circuit c;
    c.num_vars = int(ps.size());
    std::vector<int> kids;
    for (size_t v = 0; v < ps.size(); ++v) {
        c.nodes.push_back(pcot::input_node(int(v), pcot::bernoulli(ps[v])));
        kids.push_back(int(v));
    }
    if (ps.size() == 1) {
        c.root = 0;
    } else {
        c.nodes.push_back(pcot::product_node(kids));
        c.root = int(c.nodes.size()) - 1;
    }
    return c;
}

inline pcot::Circuit gauss_product(const std::vector<double>& mus, double sigma) {
    pcot::Circuit c;
    c.num_vars = int(mus.size());
    std::vector<int> kids;
    for (size_t v = 0; v < mus.size(); ++v) {
        c.nodes.push_back(pcot::input_node(int(v), pcot::gaussian(mus[v], sigma)));
        kids.push_back(int(v));
    }
    if (mus.size() == 1) {
        c.root = 0;
    } else {
        c.nodes.push_back(pcot::product_node(kids));
        c.root = int(c.nodes.size()) - 1;
    }
    return c;
}

// sum(0.5, 0.5) over N(mu1, s) and N(mu2, s), single variable
inline pcot::Circuit gauss_mixture(double mu1, double mu2, double s) {
    pcot::Circuit c;
    c.num_vars = 1;
    c.nodes.push_back(pcot::input_node(0, pcot::gaussian(mu1, s)));
    c.nodes.push_back(pcot::input_node(0, pcot::gaussian(mu2, s)));
    c.nodes.push_back(pcot::sum_node({0, 1}, {0.5, 0.5}));
    c.root = 2;
    return c;
}

// Per-variable support size for circuits of discrete leaves.
inline std::vector<int> supports_of(const pcot::Circuit& c) {
    std::vector<int> s(size_t(c.num_vars), 0);
    for (const pcot::Node& nd : c.nodes)
        if (nd.type == pcot::NodeType::Input)
            s[size_t(nd.var)] = std::max(s[size_t(nd.var)], nd.leaf.support());
    return s;
}

// Visit every assignment, variable 0 outermost.
inline void for_each_assignment(const std::vector<int>& supports,
                                const std::function<void(const std::vector<double>&)>& fn) {
    std::vector<double> x(supports.size(), 0.0);
    while (true) {
        fn(x);
        int i = int(supports.size()) - 1;
        while (i >= 0) {
            x[size_t(i)] += 1;
            if (x[size_t(i)] < supports[size_t(i)]) break;
            x[size_t(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
}

// Transportation minimum by enumerating all candidate bases (arc subsets of
// size m+n-1, solved exactly, kept when the flows are nonnegative). Only for
// tiny instances; this is the ground-truth the simplex gets compared to.
inline double brute_transport(const std::vector<double>& r, const std::vector<double>& c,
                              const std::vector<std::vector<double>>& cost) {
    const int m = int(r.size()), n = int(c.size());
    const int arcs = m * n, b = m + n - 1;
    std::vector<int> comb(size_t(b), 0);
    std::iota(comb.begin(), comb.end(), 0);
    double best = std::numeric_limits<double>::infinity();

    auto try_basis = [&](const std::vector<int>& S) {
        // rows of A: m row-sum constraints then n column-sum constraints
        const int eqs = m + n;
        std::vector<std::vector<double>> A(size_t(eqs), std::vector<double>(size_t(b) + 1, 0.0));
        for (int s = 0; s < b; ++s) {
            int i = S[size_t(s)] / n, j = S[size_t(s)] % n;
            A[size_t(i)][size_t(s)] = 1;
            A[size_t(m + j)][size_t(s)] = 1;
        }
        for (int i = 0; i < m; ++i) A[size_t(i)][size_t(b)] = r[size_t(i)];
        for (int j = 0; j < n; ++j) A[size_t(m + j)][size_t(b)] = c[size_t(j)];

        // gaussian elimination with partial pivoting
        int row = 0;
        std::vector<int> pivot_col;
        for (int col = 0; col < b && row < eqs; ++col) {
            int pr = row;
            for (int i = row + 1; i < eqs; ++i)
                if (std::abs(A[size_t(i)][size_t(col)]) > std::abs(A[size_t(pr)][size_t(col)])) pr = i;
            if (std::abs(A[size_t(pr)][size_t(col)]) < 1e-12) return;  // singular: not a tree
            std::swap(A[size_t(pr)], A[size_t(row)]);
            for (int i = 0; i < eqs; ++i) {
                if (i == row) continue;
                double f = A[size_t(i)][size_t(col)] / A[size_t(row)][size_t(col)];
                if (f == 0) continue;
                for (int k = col; k <= b; ++k) A[size_t(i)][size_t(k)] -= f * A[size_t(row)][size_t(k)];
            }
            pivot_col.push_back(col);
            ++row;
        }
        if (int(pivot_col.size()) < b) return;
        std::vector<double> f(size_t(b), 0.0);
        for (int s = 0; s < b; ++s) f[size_t(pivot_col[size_t(s)])] = A[size_t(s)][size_t(b)] / A[size_t(s)][size_t(pivot_col[size_t(s)])];
        // leftover equations must be satisfied and flows nonnegative
        for (int i = row; i < eqs; ++i)
            if (std::abs(A[size_t(i)][size_t(b)]) > 1e-9) return;
        double obj = 0;
        for (int s = 0; s < b; ++s) {
            if (f[size_t(s)] < -1e-9) return;
            obj += std::max(0.0, f[size_t(s)]) * cost[size_t(S[size_t(s)] / n)][size_t(S[size_t(s)] % n)];
        }
        best = std::min(best, obj);
    };

    while (true) {
        try_basis(comb);
        int i = b - 1;
        while (i >= 0 && comb[size_t(i)] == arcs - b + i) --i;
        if (i < 0) break;
        ++comb[size_t(i)];
        for (int j = i + 1; j < b; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
    }
    return best;
}

// Random point of the transportation polytope: a Dirichlet mixture of
// northwest-corner vertices taken under random row/column orders.
inline std::vector<std::vector<double>> random_feasible_plan(const std::vector<double>& r,
                                                             const std::vector<double>& c,
                                                             pcot::rng::Key key) {
    const int m = int(r.size()), n = int(c.size());
    std::vector<std::vector<double>> out(size_t(m), std::vector<double>(size_t(n), 0.0));
    auto eng = key.engine();
    const int verts = 3;
    std::vector<double> alpha(verts);
    double at = 0;
    std::gamma_distribution<double> g1(1.0, 1.0);
    for (double& a : alpha) {
        a = g1(eng) + 1e-12;
        at += a;
    }
    for (int t = 0; t < verts; ++t) {
        std::vector<int> rp(size_t(m), 0), cp(size_t(n), 0);
        std::iota(rp.begin(), rp.end(), 0);
        std::iota(cp.begin(), cp.end(), 0);
        std::shuffle(rp.begin(), rp.end(), eng);
        std::shuffle(cp.begin(), cp.end(), eng);
        std::vector<double> rr(size_t(m), 0.0), cc(size_t(n), 0.0);
        for (int i = 0; i < m; ++i) rr[size_t(i)] = r[size_t(rp[size_t(i)])];
        for (int j = 0; j < n; ++j) cc[size_t(j)] = c[size_t(cp[size_t(j)])];
        int i = 0, j = 0;
        double w = alpha[size_t(t)] / at;
        while (i < m && j < n) {
            double f = std::min(rr[size_t(i)], cc[size_t(j)]);
            out[size_t(rp[size_t(i)])][size_t(cp[size_t(j)])] += w * f;
            rr[size_t(i)] -= f;
            cc[size_t(j)] -= f;
            if (rr[size_t(i)] <= 1e-15) ++i;
            else ++j;
        }
    }
    return out;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = int(a.size());
    double ma = 0, mb = 0;
    for (int i = 0; i < n; ++i) {
        ma += a[size_t(i)];
        mb += b[size_t(i)];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
        sab += (a[size_t(i)] - ma) * (b[size_t(i)] - mb);
        saa += (a[size_t(i)] - ma) * (a[size_t(i)] - ma);
        sbb += (b[size_t(i)] - mb) * (b[size_t(i)] - mb);
    }
    if (saa <= 0 || sbb <= 0) return 0;
    return sab / std::sqrt(saa * sbb);
}

} // namespace testutil
