#pragma once

#include <iosfwd>

namespace cvx {

// Compact self-check battery on small grids: quadrature identities, geometry
// oracles, conservation and descent on a short run, parallel/serial agreement.
// Prints one [ok]/[FAIL] line per property and returns the failure count.
int verify_all(std::ostream& out, bool verbose = false);

} // namespace cvx
