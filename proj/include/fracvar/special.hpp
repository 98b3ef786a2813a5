#pragma once

namespace fracvar {

// Gamma function via the Lanczos approximation (g = 7, 9 terms) with the
// reflection formula below 1/2. Relative error is below 1e-13 on (0, 5].
double gamma_fn(double x);

}  // namespace fracvar
