#pragma once

#include "bwb/descriptor_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bwb {

struct CriterionReport {
  int id = 0;
  std::string name;
  bool pass = false;
  bool randomized = false;
  double seconds = 0;
  double budget_seconds = 0;
  Json payload;  // everything except timing; compared byte-for-byte by the determinism check
  std::string note;
};

// ids 1..12
std::vector<int> all_criteria();
std::string criterion_name(int id);

CriterionReport run_criterion(int id, std::uint64_t seed);

// Runs the requested criteria in order. Criterion 12 reruns every randomized
// criterion from the same call (running the missing ones first) and compares payloads.
std::vector<CriterionReport> run_suite(const std::vector<int>& ids, std::uint64_t seed);

Json to_json(const CriterionReport& r, bool with_timing = true);
// the payload as compared by the determinism check
std::string canonical_payload(const CriterionReport& r);

}  // namespace bwb
