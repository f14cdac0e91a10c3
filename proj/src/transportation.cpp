#include "pcot/transportation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "pcot/errors.hpp"

namespace pcot {

namespace {

// Network simplex specialized to the dense transportation problem. Nodes
// 0..m-1 are rows, m..m+n-1 are columns; every basic arc is stored at its
// child endpoint (parent[], arc row/col, flow on the arc to the parent).
struct Solver {
    int m, n, N;
    const std::vector<std::vector<double>>& c;
    std::vector<double> a, b;

    std::vector<int> parent, arc_row, arc_col, depth;
    std::vector<double> flow, pot;
    std::vector<std::vector<int>> adj;

    double eps_rc;
    int block;
    int next_start = 0;

    Solver(std::vector<double> a_, std::vector<double> b_, const std::vector<std::vector<double>>& c_)
        : m(int(a_.size())), n(int(b_.size())), N(m + n), c(c_), a(std::move(a_)), b(std::move(b_)) {
        double cmax = 1.0;
        for (const auto& row : c)
            for (double v : row) cmax = std::max(cmax, std::abs(v));
        eps_rc = 1e-11 * cmax;
        block = std::max(64, int(std::sqrt(double(m) * double(n))) + 1);
    }

    void build_initial_basis() {
        // Northwest corner; ties advance the row only, so exactly m+n-1 arcs
        // (some possibly with zero flow) come out.
        std::vector<double> ra = a, rb = b;
        std::unordered_map<long long, double> f0;
        adj.assign(N, {});
        int i = 0, j = 0;
        while (i < m && j < n) {
            double t = std::max(0.0, std::min(ra[i], rb[j]));
            f0[(long long)i * n + j] = t;
            adj[i].push_back(m + j);
            adj[m + j].push_back(i);
            ra[i] -= t;
            rb[j] -= t;
            if (i == m - 1 && j == n - 1) break;
            if ((ra[i] <= rb[j] && i < m - 1) || j == n - 1)
                ++i;
            else
                ++j;
        }

        parent.assign(N, -1);
        arc_row.assign(N, -1);
        arc_col.assign(N, -1);
        depth.assign(N, 0);
        flow.assign(N, 0.0);
        pot.assign(N, 0.0);
        // BFS from row 0 to orient the tree and set potentials.
        std::vector<int> queue = {0};
        std::vector<char> seen(N, 0);
        seen[0] = 1;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int q = queue[qi];
            for (int z : adj[q]) {
                if (seen[z]) continue;
                seen[z] = 1;
                int r = q < m ? q : z;
                int cn = (q < m ? z : q) - m;
                parent[z] = q;
                arc_row[z] = r;
                arc_col[z] = cn;
                depth[z] = depth[q] + 1;
                pot[z] = c[r][cn] - pot[q];
                flow[z] = f0[(long long)r * n + cn];
                queue.push_back(z);
            }
        }
    }

    double reduced_cost(int e) const {
        int i = e / n, j = e % n;
        return c[i][j] - pot[i] - pot[m + j];
    }

    // Deterministic block search; -1 when optimal.
    int find_entering_block() {
        const long long total = (long long)m * n;
        long long scanned = 0;
        int e = next_start;
        double best = -eps_rc;
        int best_e = -1;
        while (scanned < total) {
            double rc = reduced_cost(e);
            if (rc < best) {
                best = rc;
                best_e = e;
            }
            ++scanned;
            ++e;
            if (e == total) e = 0;
            if (scanned % block == 0 && best_e != -1) break;
        }
        if (best_e != -1) next_start = best_e + 1 == total ? 0 : best_e + 1;
        return best_e;
    }

    int find_entering_bland() {
        const long long total = (long long)m * n;
        for (long long e = 0; e < total; ++e)
            if (reduced_cost(int(e)) < -eps_rc) return int(e);
        return -1;
    }

    // Applies the pivot for entering arc e; returns the amount of flow moved.
    double pivot(int e) {
        const int u = e / n, v = m + e % n;

        // Paths to the lowest common ancestor.
        std::vector<int> path_u, path_v;
        {
            int x = u, y = v;
            while (depth[x] > depth[y]) {
                path_u.push_back(x);
                x = parent[x];
            }
            while (depth[y] > depth[x]) {
                path_v.push_back(y);
                y = parent[y];
            }
            while (x != y) {
                path_u.push_back(x);
                x = parent[x];
                path_v.push_back(y);
                y = parent[y];
            }
        }

        // Signs: walking v's side upward, a row->col arc gains flow; walking
        // u's side downward it is the opposite.
        auto sign_v = [&](int k) { return k < m ? +1 : -1; };
        auto sign_u = [&](int k) { return k < m ? -1 : +1; };

        // Two passes: the exact minimum over the losing arcs first, then the
        // lowest-index arc attaining it (the deterministic tie-break).
        double t = std::numeric_limits<double>::infinity();
        for (int k : path_v)
            if (sign_v(k) == -1) t = std::min(t, flow[k]);
        for (int k : path_u)
            if (sign_u(k) == -1) t = std::min(t, flow[k]);

        int leave = -1;  // node whose parent arc leaves
        long long leave_arc = -1;
        auto consider = [&](int k) {
            long long id = (long long)arc_row[k] * n + arc_col[k];
            if (leave == -1 || id < leave_arc) {
                leave = k;
                leave_arc = id;
            }
        };
        for (int k : path_v)
            if (sign_v(k) == -1 && flow[k] <= t) consider(k);
        for (int k : path_u)
            if (sign_u(k) == -1 && flow[k] <= t) consider(k);

        t = std::max(0.0, t);
        for (int k : path_v) flow[k] += sign_v(k) * t;
        for (int k : path_u) flow[k] += sign_u(k) * t;
        for (int k : path_v) flow[k] = std::max(flow[k], 0.0);
        for (int k : path_u) flow[k] = std::max(flow[k], 0.0);

        // Drop the leaving arc, attach the entering one, reverse the parent
        // chain inside the cut-off component.
        int op = parent[leave];
        auto drop = [&](std::vector<int>& list, int val) {
            list.erase(std::find(list.begin(), list.end(), val));
        };
        drop(adj[leave], op);
        drop(adj[op], leave);
        adj[u].push_back(v);
        adj[v].push_back(u);

        bool leave_on_u = false;
        for (int k : path_u)
            if (k == leave) leave_on_u = true;
        int w = leave_on_u ? u : v;
        int new_parent = leave_on_u ? v : u;

        // Reverse parent pointers from w up to the leaving node.
        int cur = w;
        int prev_parent = parent[cur];
        int pr = arc_row[cur], pc = arc_col[cur];
        double pf = flow[cur];
        parent[cur] = new_parent;
        arc_row[cur] = e / n;
        arc_col[cur] = e % n;
        flow[cur] = t;
        while (cur != leave) {
            int nxt = prev_parent;
            int nr = arc_row[nxt], nc = arc_col[nxt];
            double nf = flow[nxt];
            int npar = parent[nxt];
            parent[nxt] = cur;
            arc_row[nxt] = pr;
            arc_col[nxt] = pc;
            flow[nxt] = pf;
            pr = nr;
            pc = nc;
            pf = nf;
            prev_parent = npar;
            cur = nxt;
        }

        // Refresh depth/potentials across the re-hung component.
        std::vector<int> queue = {w};
        depth[w] = depth[new_parent] + 1;
        pot[w] = c[arc_row[w]][arc_col[w]] - pot[new_parent];
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int q = queue[qi];
            for (int z : adj[q]) {
                if (z == parent[q]) continue;
                depth[z] = depth[q] + 1;
                pot[z] = c[arc_row[z]][arc_col[z]] - pot[q];
                queue.push_back(z);
            }
        }
        return t;
    }

    void run() {
        build_initial_basis();
        bool bland = false;
        int degenerate_streak = 0;
        const int streak_limit = 2 * N + 16;
        while (true) {
            int e = bland ? find_entering_bland() : find_entering_block();
            if (e == -1) {
                if (!bland) {
                    // Block search can miss arcs only through the epsilon
                    // cutoff; one full Bland sweep certifies optimality.
                    e = find_entering_bland();
                    if (e == -1) break;
                } else {
                    break;
                }
            }
            double t = pivot(e);
            if (t > 1e-15) {
                degenerate_streak = 0;
                bland = false;
            } else if (++degenerate_streak >= streak_limit) {
                bland = true;
            }
        }
    }
};

Solver run_solver(const std::vector<double>& row_weights, const std::vector<double>& col_weights,
                  const std::vector<std::vector<double>>& cost) {
    const size_t m = row_weights.size(), n = col_weights.size();
    if (m == 0 || n == 0) throw LengthMismatchError("transportation needs nonempty weight vectors");
    if (cost.size() != m) throw LengthMismatchError("cost matrix has wrong row count");
    for (const auto& row : cost)
        if (row.size() != n) throw LengthMismatchError("cost matrix has wrong column count");

    double sa = 0, sb = 0;
    for (double v : row_weights) {
        if (v < -1e-12) throw InfeasibleError("negative row weight");
        sa += v;
    }
    for (double v : col_weights) {
        if (v < -1e-12) throw InfeasibleError("negative column weight");
        sb += v;
    }
    if (std::abs(sa - 1.0) > 1e-6 || std::abs(sb - 1.0) > 1e-6)
        throw InfeasibleError("weights must sum to one (got " + std::to_string(sa) + " and " +
                              std::to_string(sb) + ")");

    std::vector<double> va(row_weights), vb(col_weights);
    for (double& v : va) v = std::max(v, 0.0) / sa;
    for (double& v : vb) v = std::max(v, 0.0) / sb;

    Solver s(std::move(va), std::move(vb), cost);
    s.run();
    return s;
}

} // namespace

TransportPlan solve_transportation(const std::vector<double>& row_weights,
                                   const std::vector<double>& col_weights,
                                   const std::vector<std::vector<double>>& cost) {
    Solver s = run_solver(row_weights, col_weights, cost);
    const size_t m = row_weights.size(), n = col_weights.size();

    TransportPlan out;
    out.plan.assign(m, std::vector<double>(n, 0.0));
    for (int k = 1; k < s.N; ++k) out.plan[s.arc_row[k]][s.arc_col[k]] = std::max(s.flow[k], 0.0);
    double obj = 0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) obj += out.plan[i][j] * cost[i][j];
    out.objective = obj;
    return out;
}

double transportation_cost(const std::vector<double>& row_weights,
                           const std::vector<double>& col_weights,
                           const std::vector<std::vector<double>>& cost) {
    Solver s = run_solver(row_weights, col_weights, cost);
    // Row-major accumulation keeps the result bit-identical to the
    // plan-based objective above.
    std::vector<std::pair<long long, double>> arcs;
    arcs.reserve(s.N - 1);
    for (int k = 1; k < s.N; ++k)
        arcs.emplace_back((long long)s.arc_row[k] * s.n + s.arc_col[k], std::max(s.flow[k], 0.0));
    std::sort(arcs.begin(), arcs.end());
    double obj = 0;
    for (auto [id, f] : arcs) obj += f * cost[size_t(id / s.n)][size_t(id % s.n)];
    return obj;
}

} // namespace pcot
