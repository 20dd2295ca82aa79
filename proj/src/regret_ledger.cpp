#include "fairalloc/regret_ledger.hpp"

namespace fairalloc {

void RegretLedger::push(double regret) {
  instantaneous.push_back(regret);
  cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + regret);
}

void RegretLedger::push_stability(double regret, bool delta_bit, bool type_one_error, bool type_two_error,
                                  bool infeasible_output) {
  auto bump = [](std::vector<std::uint64_t>& v, bool inc) { v.push_back((v.empty() ? 0 : v.back()) + (inc ? 1 : 0)); };
  push(regret);
  delta.push_back(delta_bit ? 1 : 0);
  bump(type_one, type_one_error);
  bump(type_two, type_two_error);
  bump(infeasible, infeasible_output);
}

}  // namespace fairalloc
