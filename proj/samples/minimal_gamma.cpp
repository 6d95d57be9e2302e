// Gamma(t) for both probe models in a 3D gas, printed as a small table.

#include <becprobe.hpp>

#include <cstdio>

int main() {
  using namespace becprobe;
  GasParameters gas;
  gas.dimension = 3;
  gas.density = 10e18;  // 10 per um^3

  ProbeGeometry well;
  well.model = ProbeModel::double_well;
  well.sigma = 120e-9;
  well.separation = 180e-9;
  ProbeGeometry site = well;
  site.model = ProbeModel::internal_state;
  site.separation = 0.0;

  const auto m1 = reduce(gas, well);
  const auto m2 = reduce(gas, site);
  std::printf("nu = %.4g, prefactor = %.4g\n", m1.nu, m1.prefactor);
  std::printf("%8s %14s %14s\n", "t", "Gamma_I", "Gamma_II");
  for (double t : {0.1, 1.0, 5.0, 20.0, 50.0}) {
    std::printf("%8.2f %14.6e %14.6e\n", t, gamma_at(m1, t).value, gamma_at(m2, t).value);
  }
  const auto rep = find_backflow(m1);
  std::printf("Model I backflow: N = %.3e over %zu interval(s)\n", rep.measure, rep.intervals.size());
}
