#include "scan_common.hpp"

namespace beamloc::kernels::detail {

void run_scalar(const Workspace& ws, std::span<double> out) {
  for (int i = 0; i < ws.grid.n; ++i) out[i] = scalar_point(ws, i);
}

}  // namespace beamloc::kernels::detail
