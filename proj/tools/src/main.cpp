#include <iostream>

#include "mlmagma/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const int rc = mlm::cli::dispatch({argv + 1, argv + argc}, std::cout, std::cerr);
    std::cout.flush();
    return rc;
}
