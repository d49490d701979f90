// Runs the twelve acceptance suites and prints one line per criterion.
// Exit status is 0 only when every criterion passes. With -v the sub-checks
// are printed under each line.
#include <cstring>
#include <iostream>

#include "dualwave/suites.hpp"

int main(int argc, char** argv) {
  const bool verbose = argc > 1 && std::strcmp(argv[1], "-v") == 0;
  int failed = 0;
  for (const auto& s : dualwave::suites::all()) {
    const auto o = dualwave::suites::execute(s);
    std::cout << (o.passed ? "PASS" : "FAIL") << "  criterion " << o.id << "  " << o.name << "  (" << o.seconds
              << " s)\n";
    if (verbose || !o.passed)
      for (const auto& line : o.lines) std::cout << "        " << line << '\n';
    std::cout.flush();
    if (!o.passed) ++failed;
  }
  std::cout << (12 - failed) << "/12 criteria passed\n";
  return failed == 0 ? 0 : 1;
}
