// Acceptance runner: one PASS/FAIL line per criterion.
//
// --expect-fail ID (repeatable) marks a criterion that is known to fail. The
// line still prints FAIL; the exit status is 0 only when the set of failures
// equals the expected set exactly.

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>

#include "darboux_roll/acceptance.hpp"

int main(int argc, char** argv) {
    using namespace darboux_roll::acceptance;
    SuiteOptions opt;
    opt.seed = seed_from_env();
    std::set<int> expected;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--expect-fail" && i + 1 < argc) {
            expected.insert(std::stoi(argv[++i]));
        } else if (arg == "--filter" && i + 1 < argc) {
            opt.filter = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--filter NAME] [--expect-fail ID]...\n", argv[0]);
            return 2;
        }
    }
    std::printf("seed %llu\n", static_cast<unsigned long long>(opt.seed));
    const auto results = run_suite(opt);
    print_table(stdout, results);
    std::set<int> failed;
    for (const auto& r : results) {
        if (!r.passed) failed.insert(r.id);
    }
    std::printf("%zu criteria, %zu passed, %zu failed", results.size(), results.size() - failed.size(),
                failed.size());
    if (!expected.empty()) {
        std::printf(" (expected failures:");
        for (int id : expected) std::printf(" %d", id);
        std::printf(")");
    }
    std::printf("\n");
    for (int id : expected) {
        if (!failed.count(id)) std::printf("note: criterion %d was expected to fail but passed\n", id);
    }
    return failed == expected ? 0 : 1;
}
