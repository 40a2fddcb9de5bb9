#include "faircurtail/pareto.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "faircurtail/errors.hpp"

namespace faircurtail {

std::vector<SweepRow> pareto_sweep(const Network& net, const RunConfig& base,
                                   const Profiles& profiles,
                                   const std::vector<double>& weights,
                                   const std::vector<std::string>& variants) {
    for (double w : weights)
        if (w < 0.0) throw ConfigError("sweep weights must be non-negative");

    std::vector<double> sorted_w(weights);
    std::sort(sorted_w.begin(), sorted_w.end());

    struct Task {
        std::string variant;
        double w;
    };
    std::vector<Task> tasks;
    for (const std::string& variant : variants)
        for (double w : sorted_w) tasks.push_back({variant, w});

    std::vector<SweepRow> rows(tasks.size());
    auto run_one = [&](size_t i) {
        SweepRow& row = rows[i];
        row.variant = tasks[i].variant;
        row.w = tasks[i].w;
        try {
            RunConfig cfg = base;
            cfg.variant = tasks[i].variant;
            cfg.dispatch.w = tasks[i].w;
            cfg.dump_lp = cfg.dump_sensitivities = false;
            const RunReport rep = run_simulation(net, cfg, profiles);
            const DayMetrics& final_day = rep.day_metrics.back();
            row.day = final_day.day;
            row.curtail_pct = final_day.curtail_pct;
            row.jfi = final_day.jfi;
            row.gini = final_day.gini;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(hw, static_cast<unsigned>(tasks.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&]() {
                while (true) {
                    const size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_one(i);
                }
            });
        for (std::thread& th : pool) th.join();
    }
    return rows;
}

}  // namespace faircurtail
