#include "pcot/leaf_ot.hpp"

#include <cmath>

namespace pcot {

namespace {

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

double pmf_at(const Leaf& l, size_t x) {
    return l.kind == LeafKind::Bernoulli ? (x == 0 ? 1.0 - l.p : l.p) : l.probs[x];
}

} // namespace

LeafOT leaf_wasserstein(const Leaf& a, const Leaf& b, int p) {
    if (p < 1) throw DomainError("order p must be >= 1");
    if (a.kind != b.kind)
        throw UnsupportedPairError("leaves of different kinds cannot be coupled in closed form");

    LeafOT out;
    if (a.kind == LeafKind::Gaussian) {
        if (p != 2) throw UnsupportedPairError("Gaussian leaves support p=2 only");
        out.cost = (a.mu - b.mu) * (a.mu - b.mu) + (a.sigma - b.sigma) * (a.sigma - b.sigma);
        out.plan.kind = OTPlan::Kind::AffineMap;
        out.plan.a = b.sigma / a.sigma;
        out.plan.b = b.mu - a.mu * (b.sigma / a.sigma);
        return out;
    }
    if (!a.discrete()) throw UnsupportedPairError("unsupported leaf kind for transport");

    // Monotone (quantile) coupling: sweep both CDFs, pairing mass in order.
    std::vector<double> pa = a.pmf(), pb = b.pmf();
    const size_t ma = pa.size(), mb = pb.size();
    out.plan.kind = OTPlan::Kind::DiscreteJoint;
    out.plan.table.assign(ma, std::vector<double>(mb, 0.0));
    size_t i = 0, j = 0;
    double ra = pa[0], rb = pb[0];
    while (i < ma && j < mb) {
        double t = std::min(ra, rb);
        if (t > 0) {
            out.plan.table[i][j] += t;
            out.cost += t * ipow(std::abs(double(i) - double(j)), p);
        }
        ra -= t;
        rb -= t;
        if (ra <= 1e-15) {
            ++i;
            if (i < ma) ra = pa[i];
        }
        if (rb <= 1e-15) {
            ++j;
            if (j < mb) rb = pb[j];
        }
    }
    return out;
}

// Mirrors the sweep above step for step; keep the two in lockstep.
double leaf_wasserstein_cost(const Leaf& a, const Leaf& b, int p) {
    if (p < 1) throw DomainError("order p must be >= 1");
    if (a.kind != b.kind)
        throw UnsupportedPairError("leaves of different kinds cannot be coupled in closed form");

    if (a.kind == LeafKind::Gaussian) {
        if (p != 2) throw UnsupportedPairError("Gaussian leaves support p=2 only");
        return (a.mu - b.mu) * (a.mu - b.mu) + (a.sigma - b.sigma) * (a.sigma - b.sigma);
    }
    if (!a.discrete()) throw UnsupportedPairError("unsupported leaf kind for transport");

    const size_t ma = size_t(a.support()), mb = size_t(b.support());
    double cost = 0;
    size_t i = 0, j = 0;
    double ra = pmf_at(a, 0), rb = pmf_at(b, 0);
    while (i < ma && j < mb) {
        double t = std::min(ra, rb);
        if (t > 0 && i != j) cost += t * ipow(std::abs(double(i) - double(j)), p);
        ra -= t;
        rb -= t;
        if (ra <= 1e-15) {
            ++i;
            if (i < ma) ra = pmf_at(a, i);
        }
        if (rb <= 1e-15) {
            ++j;
            if (j < mb) rb = pmf_at(b, j);
        }
    }
    return cost;
}

} // namespace pcot
