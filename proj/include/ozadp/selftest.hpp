#pragma once

#include <iosfwd>

namespace ozadp {

// Fast curated property checks spanning all modules: encoding exactness,
// ESC safety, dispatch behavior, exceptional-value fallback, the exponent
// -span test identity, QR residuals, file round-trips and serial/parallel
// kernel parity. Prints one line per check and a summary; returns true when
// everything passed. Completes in a few seconds.
bool selftest(std::ostream& os);

}  // namespace ozadp
