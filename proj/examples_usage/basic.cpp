// Build the weight 13/2 coefficients, count sign changes and evaluate one twisted L-value.
#include <cstdio>

#include "halfint/halfint.hpp"

int main() {
  using namespace halfint;
  const CoeffTable c = delta_halfintegral(20000);
  std::printf("alpha(1..8):");
  for (std::uint64_t n = 1; n <= 8; ++n) std::printf(" %s", to_string(c.alpha[n]).c_str());
  std::printf("\n");

  const auto r = cmd_signchanges(20000, IndexSet::nflat, c);
  std::printf("sign changes over odd squarefree multiples of 8 up to 2e4: %llu of %llu\n",
              (unsigned long long)r.S, (unsigned long long)r.N_set);

  const HeckeTable h = build_hecke(2000);
  const auto L = central_lvalue(8, h);
  std::printf("L(1/2, f x chi_8) = %.12f using %llu terms\n", L.value, (unsigned long long)L.terms_used);
  return 0;
}
