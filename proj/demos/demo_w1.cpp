// Builds the four-atom reference portfolio in code and prints the text
// reports for every model, plus a short capital sweep.

#include <iostream>

#include "surplus/surplus.hpp"

int main() {
  using namespace surplus;

  ProbSpace space({"w1", "w2", "w3", "w4"}, {0.25, 0.25, 0.25, 0.25});
  Portfolio pf{space,
               {"a1", "a2"},
               {RandomVar({0, 1, 1, 2}), RandomVar({0, 0, 1, 2})},
               1.0,
               std::nullopt,
               Distortion::power(2),
               Distortion::power(3),
               {Distortion::power(4), Distortion::power(4)}};

  std::cout << io::report_to_text(model1_run(pf), space) << "\n";
  std::cout << io::report_to_text(model2_run(pf), space) << "\n";

  // Charge the reinsurance fair premia so models 3 and 4 apply.
  pf.premia = fair_premia(space, *pf.fr, pf.claims).per_agent;
  std::cout << io::report_to_text(model3_run(pf), space) << "\n";
  std::cout << io::report_to_text(model4_run(pf), space) << "\n";

  std::cout << io::sweep_to_text(capital_sweep(pf, {0.5, 1.0, 2.0, 4.0, 8.0}));
  return 0;
}
