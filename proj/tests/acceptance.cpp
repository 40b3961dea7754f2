#include "bwb/suite.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  auto reports = bwb::run_suite(bwb::all_criteria(), seed);
  int failed = 0;
  for (const auto& r : reports) {
    std::string budget = r.budget_seconds > 0 ? std::to_string(int(r.budget_seconds)) + " s" : "-";
    std::printf("%s  C%-2d %-30s %8.2f s / %s%s%s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                budget.c_str(), r.note.empty() ? "" : "  ", r.note.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed (seed %llu)\n", int(reports.size()) - failed, reports.size(),
              static_cast<unsigned long long>(seed));
  return failed ? 1 : 0;
}
