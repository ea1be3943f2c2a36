// SPDX-License-Identifier: MIT
//
// Dedicated acceptance runner: executes every criterion at its pinned
// tolerance, prints one pass/fail line per criterion, exits nonzero if any
// fail. Seed comes from PASSAGEKIT_SEED when set.
#include "passagekit/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
    passagekit::AcceptanceOptions opt;
    opt.workers = 4;
    if (const char* env = std::getenv("PASSAGEKIT_SEED")) {
        opt.seed = std::strtoull(env, nullptr, 10);
    }
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::strcmp(argv[i], "--seed") == 0)
            opt.seed = std::strtoull(argv[i + 1], nullptr, 10);
        else if (std::strcmp(argv[i], "--workers") == 0)
            opt.workers = std::atoi(argv[i + 1]);
        else if (std::strcmp(argv[i], "--mc-n") == 0)
            opt.mc_n = std::strtoull(argv[i + 1], nullptr, 10);
    }

    const auto results = passagekit::run_acceptance(opt);
    int failures = 0;
    for (const auto& r : results) {
        std::printf("[%s] %02d %-38s (%6.2fs)  %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}
