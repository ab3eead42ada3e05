// Runs the residual test battery on iid noise and on GARCH noise so the
// two reports can be compared side by side.
#include <iostream>
#include <random>

#include "lpgarch/lpgarch.hpp"

int main() {
    using namespace lpg;
    const std::size_t n = 500;

    auto rng = stream_rng(3, 0);
    std::normal_distribution<double> z;
    std::vector<double> iid(n), walk(n);
    for (std::size_t t = 0; t < n; ++t) {
        iid[t] = z(rng);
        walk[t] = (t ? walk[t - 1] : 0.0) + iid[t];
    }

    // Volatility clustering: alpha1 + alpha2 close to one.
    const ARGARCHParams g{0.0, 0.05, 0.15, 0.8};
    std::vector<double> clustered(n);
    double s2 = g.alpha0 / (1 - g.alpha1 - g.alpha2), prev = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        s2 = g.alpha0 + g.alpha1 * prev * prev + g.alpha2 * s2;
        clustered[t] = prev = std::sqrt(s2) * z(rng);
    }

    DiagnosticsConfig cfg;
    cfg.bds.replications = 200;
    cfg.bds.threads = default_thread_count();
    std::cout << "== iid Gaussian noise, random-walk levels ==\n" << render_diagnostics(run_diagnostics(iid, walk, cfg));
    std::cout << "\n== GARCH noise, stationary levels ==\n"
              << render_diagnostics(run_diagnostics(clustered, clustered, cfg));
    return 0;
}
