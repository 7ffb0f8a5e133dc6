// Runs every acceptance criterion and the sign-mutation check, printing one
// PASS/FAIL line each. Pass --full for the extended resolution sweep.

#include <cstring>
#include <iostream>

#include <zakbench/acceptance.hpp>

int main(int argc, char** argv) {
    using namespace zakbench::acceptance;
    const Level level = (argc > 1 && std::strcmp(argv[1], "--full") == 0) ? Level::full : Level::quick;
    auto results = run_all(level);
    results.push_back(sign_mutation());
    int failed = 0;
    for (const auto& r : results) {
        std::cout << summary_line(r) << '\n';
        if (!r.passed) ++failed;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " check(s) failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
