#include <cstdlib>
#include <iostream>
#include <string>

#include "rdpq/harness/acceptance.hpp"

int main(int argc, char** argv) {
  rdpq::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--tolerance-scale" && i + 1 < argc) {
      options.toleranceScale = std::strtod(argv[++i], nullptr);
    } else {
      options.only.push_back(std::atoi(argv[i]));
    }
  }
  return rdpq::runAcceptance(options, std::cout).allPassed() ? 0 : 1;
}
