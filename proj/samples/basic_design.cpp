// Compares the no-AN closed form, MRT and the AN-aided alternating design on
// the default scene and prints their secrecy and estimation rates.

#include <cstdio>

#include "dfrc/dfrc.hpp"

int main() {
  const dfrc::ScenarioConfig cfg;
  const dfrc::ChannelSet ch = dfrc::build_channels(cfg);

  const dfrc::Design cf = dfrc::closed_form_design(cfg, ch);
  const dfrc::Design mrt = dfrc::mrt_beamformer(cfg, ch);
  const dfrc::AoResult ao = dfrc::ao_solve(cfg, ch);

  std::printf("%-12s %16s %16s %10s\n", "method", "secrecy [b/s]", "estim. [b/s]", "p2 [W]");
  for (const auto& [name, d] : {std::pair{"closed_form", cf}, std::pair{"mrt", mrt},
                                std::pair{"ao_an", ao.design}}) {
    std::printf("%-12s %16.6e %16.6e %10.4f\n", name, d.secrecy_rate, d.estimation_rate, d.p2);
  }
  std::printf("ao iterations: %d\n", ao.iterations);
  return 0;
}
