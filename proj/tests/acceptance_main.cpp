// Acceptance suite: one numbered criterion per function, each printing a
// single PASS/FAIL line. Run all with no arguments or one with
// --criterion N.
#include <cstdlib>
#include <cstring>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 1);
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    }
  }
  return acceptance::run(only);
}
