#include "pcot/color_transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "pcot/compatibility.hpp"
#include "pcot/coupling.hpp"
#include "pcot/parallel.hpp"
#include "pcot/rng.hpp"

namespace pcot {

namespace {

constexpr size_t kMaxFitPixels = 50000;

// Normalized RGB triples, strided down to the fitting cap. The stride keeps
// the subsample deterministic and spread over the whole image.
Dataset pixel_cloud(const ImageBuffer& img) {
    const size_t n = size_t(img.width) * img.height;
    const size_t stride = (n + kMaxFitPixels - 1) / kMaxFitPixels;
    Dataset out;
    out.reserve(n / stride + 1);
    for (size_t i = 0; i < n; i += stride)
        out.push_back({img.pixels[3 * i] / 255.0, img.pixels[3 * i + 1] / 255.0,
                       img.pixels[3 * i + 2] / 255.0});
    return out;
}

// Root sum over k components, each a product of three Gaussian leaves.
// Components start at sampled pixels so they begin spread over the cloud.
Circuit color_structure(const Dataset& data, int k, rng::Key key) {
    Circuit c;
    c.num_vars = 3;
    std::vector<int> prods(k);
    for (int j = 0; j < k; ++j) {
        const auto& px = data[size_t(key.child(j).uniform(0) * double(data.size())) % data.size()];
        std::vector<int> leaves(3);
        for (int v = 0; v < 3; ++v) {
            leaves[v] = int(c.nodes.size());
            c.nodes.push_back(input_node(v, gaussian(px[v], 0.25)));
        }
        prods[j] = int(c.nodes.size());
        c.nodes.push_back(product_node(std::move(leaves)));
    }
    c.root = int(c.nodes.size());
    c.nodes.push_back(sum_node(std::move(prods), std::vector<double>(k, 1.0 / k)));
    return c;
}

} // namespace

ImageBuffer color_transfer(const ImageBuffer& src, const ImageBuffer& dst, int components, double t,
                           const WMConfig& cfg) {
    if (components < 1) throw DomainError("component count must be >= 1");
    if (t < 0 || t > 1) throw DomainError("interpolation parameter t must lie in [0,1]");

    Dataset sp = pixel_cloud(src), dp = pixel_cloud(dst);
    const rng::Key key{cfg.seed};
    WMConfig fit_cfg = cfg;
    fit_cfg.p_order = 2;
    Circuit cs = fit_wm(color_structure(sp, components, key.child(0x41)), sp, fit_cfg).circuit;
    Circuit cd = fit_wm(color_structure(dp, components, key.child(0x42)), dp, fit_cfg).circuit;

    CouplingCircuit coupling = couple(cs, cd, identity_bijection(3), 2);

    // Images repeat colors heavily; transport each distinct color once.
    std::unordered_map<std::uint32_t, int> slot;
    std::vector<std::uint32_t> colors;
    const size_t n = size_t(src.width) * src.height;
    std::vector<int> pixel_slot(n);
    for (size_t i = 0; i < n; ++i) {
        std::uint32_t packed = (std::uint32_t(src.pixels[3 * i]) << 16) |
                               (std::uint32_t(src.pixels[3 * i + 1]) << 8) |
                               std::uint32_t(src.pixels[3 * i + 2]);
        auto [it, fresh] = slot.emplace(packed, int(colors.size()));
        if (fresh) colors.push_back(packed);
        pixel_slot[i] = it->second;
    }

    std::vector<std::array<double, 3>> mapped(colors.size());
    const bool par = parallel::enabled() && colors.size() > 1;
    parallel::ExceptionGate gate;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (par)
#endif
    for (size_t ci = 0; ci < colors.size(); ++ci) gate.run([&] {
        std::vector<double> x = {((colors[ci] >> 16) & 0xFF) / 255.0,
                                 ((colors[ci] >> 8) & 0xFF) / 255.0, (colors[ci] & 0xFF) / 255.0};
        std::vector<double> g = geodesic_point(x, transport_point(coupling, x), t);
        for (int v = 0; v < 3; ++v) mapped[ci][v] = std::clamp(g[v], 0.0, 1.0);
    });
    (void)par;
    gate.rethrow();

    ImageBuffer out;
    out.width = src.width;
    out.height = src.height;
    out.pixels.resize(n * 3);
    for (size_t i = 0; i < n; ++i)
        for (int v = 0; v < 3; ++v)
            out.pixels[3 * i + v] = std::uint8_t(std::lround(mapped[pixel_slot[i]][v] * 255.0));
    return out;
}

} // namespace pcot
