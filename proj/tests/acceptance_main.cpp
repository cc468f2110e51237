// Acceptance runner: one criterion per invocation (--criterion N) for ctest,
// or the whole suite by default.
#include <cstdio>
#include <cstring>
#include <string>

#include "tcmc/paper_examples.hpp"

int main(int argc, char** argv) {
  tcmc::AcceptanceOptions opts;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--window") == 0 && i + 1 < argc) opts.window = std::atoi(argv[++i]);
  }
  bool all_pass = true;
  auto run = [&](int n) {
    auto r = tcmc::run_criterion(n, opts);
    std::puts(tcmc::format_criterion_line(r).c_str());
    for (const auto& d : r.details) std::printf("        %s\n", d.c_str());
    all_pass = all_pass && r.pass;
  };
  if (only) {
    run(only);
  } else {
    for (int n = 1; n <= 12; ++n) run(n);
  }
  return all_pass ? 0 : 1;
}
