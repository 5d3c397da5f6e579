#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>

#include "doctest.h"

int main(int argc, char** argv) {
    // keep training progress logs out of test output unless asked for
    setenv("JOSH_LOG", "quiet", /*overwrite=*/0);
    doctest::Context context;
    context.applyCommandLine(argc, argv);
    return context.run();
}
