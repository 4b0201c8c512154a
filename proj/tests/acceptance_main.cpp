#include <iostream>

#include "acceptance.hpp"

int main() {
    const auto results = acceptance::run_all(std::cout);
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << (results.size() - failed) << "/" << results.size() << " acceptance criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
