// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 9).
#include "nehari/acceptance.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>

int main(int argc, char** argv)
{
    nehari::AcceptanceOptions options;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            options.criteria.push_back(std::atoi(argv[++i]));
        } else if (std::strcmp(argv[i], "--inject-corrupt-profile") == 0) {
            options.corrupt_profile = true;
        } else {
            std::cerr << "usage: nehari_acceptance [--criterion k]... [--inject-corrupt-profile]\n";
            return 64;
        }
    }
    int failed = 0;
    for (const auto& r : nehari::run_acceptance(options)) {
        std::cout << nehari::format_result(r) << std::endl;
        if (!r.pass) ++failed;
    }
    return failed;
}
