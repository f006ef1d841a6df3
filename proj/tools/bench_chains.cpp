// Benchmark: parallel kernels against the serial reference. Chain expansion
// parallelizes over level nodes, the security check over input pairs; both
// paths must agree exactly, which the run verifies before timing is reported.

#include "cardforge/compiler.hpp"
#include "cardforge/io.hpp"

#include <chrono>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cardforge;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

static bool chains_identical(const StepChain& a, const StepChain& b) {
    if (a.steps != b.steps) return false;
    for (int t = 0; t <= a.steps; ++t) {
        if (a.levels[t].size() != b.levels[t].size()) return false;
        for (size_t k = 0; k < a.levels[t].size(); ++k)
            if (a.levels[t][k].state != b.levels[t][k].state) return false;
    }
    for (int t = 0; t < a.steps; ++t) {
        if (a.edges[t].size() != b.edges[t].size()) return false;
        for (size_t k = 0; k < a.edges[t].size(); ++k)
            if (a.edges[t][k].weight != b.edges[t][k].weight || a.edges[t][k].to != b.edges[t][k].to)
                return false;
    }
    return true;
}

int main(int argc, char** argv) {
    int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    Formula and2 = f_and(f_var(Player::Alice, 1), f_var(Player::Bob, 1));
    CompiledProtocol cp = compile_bp_to_protocol(barrington_compile(and2));
    const Protocol& p = cp.protocol;
    TruthTable t = table_from_formula(and2);
    auto inputs = all_inputs(p.layout.n);
    std::cout << "compiled AND2: length " << p.length() << ", " << inputs.size() << " inputs\n";

    ChainOptions serial_opt, parallel_opt;
    serial_opt.parallel = false;

    size_t nodes = 0;
    double t_serial = 0, t_parallel = 0;
    for (int r = 0; r < reps; ++r) {
        auto t0 = Clock::now();
        std::vector<StepChain> serial_chains;
        for (const InputPair& in : inputs) serial_chains.push_back(build_step_chain_serial(p, in, serial_opt));
        t_serial += ms_since(t0);

        t0 = Clock::now();
        std::vector<StepChain> parallel_chains;
        for (const InputPair& in : inputs) parallel_chains.push_back(build_step_chain(p, in, parallel_opt));
        t_parallel += ms_since(t0);

        for (size_t i = 0; i < inputs.size(); ++i)
            if (!chains_identical(serial_chains[i], parallel_chains[i])) {
                std::cerr << "MISMATCH between serial and parallel chains\n";
                return 1;
            }
        nodes = 0;
        for (const auto& lvl : serial_chains[0].levels) nodes += lvl.size();
    }
    std::cout << "chain nodes per input: " << nodes << "\n";
    std::cout << "chain sweep, serial reference: " << t_serial / reps << " ms\n";
    std::cout << "chain sweep, parallel kernel:  " << t_parallel / reps << " ms\n";

    // the heavy axis on these protocols: pairwise equivalence comparisons
    std::string verdict_1t, verdict_nt;
    double sec_1t = 0, sec_nt = 0;
#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
#else
    int max_threads = 1;
#endif
    for (int r = 0; r < reps; ++r) {
#ifdef _OPENMP
        omp_set_num_threads(1);
#endif
        auto t0 = Clock::now();
        verdict_1t = check_security(p, t, SecurityMode::committed()).report_line();
        sec_1t += ms_since(t0);
#ifdef _OPENMP
        omp_set_num_threads(max_threads);
#endif
        t0 = Clock::now();
        verdict_nt = check_security(p, t, SecurityMode::committed()).report_line();
        sec_nt += ms_since(t0);
    }
    if (verdict_1t != verdict_nt) {
        std::cerr << "MISMATCH between single- and multi-threaded verdicts\n";
        return 1;
    }
    std::cout << "committed security (" << verdict_1t << "), 1 thread:  " << sec_1t / reps << " ms\n";
    std::cout << "committed security, " << max_threads << " threads: " << sec_nt / reps << " ms\n";
    return 0;
}
