// Acceptance suite: runs the bundled benchmark pipeline end to end and
// prints one pass/fail line per criterion. Thresholds live in
// default_bench_config() and mirror configs/acceptance.json.

#include <cstdio>
#include <iostream>

#include "ovdbg/bench.hpp"

int main()
{
    using namespace ovdbg;

    BenchConfig cfg = default_bench_config();
    SuiteStats stats = run_bench_suite(
        cfg, [](const std::string &line) { std::cerr << "  [suite] " << line << "\n"; });

    bool all_pass = false;
    std::vector<std::string> lines = evaluate_thresholds(stats, cfg.thresholds, all_pass);
    for (size_t i = 0; i < lines.size(); ++i)
        std::cout << "criterion " << (i + 1) << ": " << lines[i] << "\n";
    std::cout << (all_pass ? "ACCEPTANCE: all criteria pass" : "ACCEPTANCE: FAILURES above")
              << "\n";
    return all_pass ? 0 : 1;
}
