// Simulates a bubble with log-periodic trend and AR(1)-GARCH(1,1) noise,
// fits it back and prints the coefficient table and the crash window.
//
//   fit_synthetic_bubble [seed]
#include <cstdlib>
#include <iostream>

#include <fmt/format.h>

#include "lpgarch/lpgarch.hpp"

int main(int argc, char** argv) {
    using namespace lpg;
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 11;
    const FullParams truth{{385.11, -141.15, -12.04, 2.210, 0.37, 6.97, 1.41}, {0.935, 0.023, 0.036, 0.962}};
    const Date origin = make_date(1985, 7, 1);

    try {
        auto rng = stream_rng(seed, 0);
        const auto series = simulate_path(truth, 544, rng, origin).series;
        std::cout << fmt::format("simulated {} prices, {} .. {}\n", series.size(), format_date(series.dates().front()),
                                 format_date(series.dates().back()));

        GsaConfig gsa;
        gsa.seed = seed;
        gsa.threads = default_thread_count();
        const auto fit = fit_extended(series, gsa);
        std::cout << fmt::format("log-likelihood {:.3f}, converged {}\n\n", fit.full.objective, fit.full.converged);

        const auto rep = infer(fit.full.params, series, 0.95, gsa.threads);
        std::cout << render_inference(rep);
        for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';

        const auto [lo, hi] = crash_window(rep, origin);
        std::cout << fmt::format("\ntrue t_c {:.3f}; 95% crash window {} .. {}\n", truth.lp.tc, format_date(lo), format_date(hi));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
