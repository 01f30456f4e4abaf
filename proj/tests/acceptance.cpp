#include "rotatm/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  rotatm::AcceptanceConfig cfg;
  int failed = 0;
  auto report = [&](const rotatm::CriterionResult& r) {
    std::printf("%s\n", r.line().c_str());
    std::fflush(stdout);
    if (!r.pass()) ++failed;
  };
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) report(rotatm::run_criterion(std::atoi(argv[i]), cfg));
  } else {
    rotatm::run_acceptance(cfg, report);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
