// Compares the serial reference evaluator against the OpenMP path on a
// freshly generated corpus and checks they agree.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "sqlrl/eval.hpp"

using namespace sqlrl;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "";
    if (dir.empty()) {
        dir = std::filesystem::temp_directory_path() / "sqlrl_bench_data";
        if (!std::filesystem::exists(dir + "/manifest.json")) {
            CorpusConfig cfg;
            cfg.seed = 7;
            cfg.out_dir = dir;
            cfg.sizes.train = 600; // enough work to time
            build_corpus(cfg);
        }
    }
    auto questions = load_split(dir, "train");
    PolicyParams params = PolicyParams::uniform(NodeRegistry::standard());

    auto t0 = Clock::now();
    EvalResult serial = evaluate_serial(params, questions, dir);
    double serial_ms = ms_since(t0);

    int max_threads = omp_get_max_threads();
    std::printf("%-10s %8s %10s %8s\n", "mode", "threads", "time_ms", "ems");
    std::printf("%-10s %8d %10.1f %8.2f\n", "serial", 1, serial_ms, serial.ems);

    for (int threads : {2, 4, max_threads}) {
        if (threads <= 1) continue;
        EvalOptions opts;
        opts.n_threads = threads;
        t0 = Clock::now();
        EvalResult par = evaluate(params, questions, dir, opts);
        double par_ms = ms_since(t0);
        bool same = par.ems == serial.ems && par.rems == serial.rems &&
                    par.error_count == serial.error_count;
        std::printf("%-10s %8d %10.1f %8.2f %s\n", "openmp", threads, par_ms, par.ems,
                    same ? "" : "MISMATCH");
        if (!same) return 1;
    }
    return 0;
}
