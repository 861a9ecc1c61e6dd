#pragma once

#include <iosfwd>
#include <string>

#include "ozadp/matrix.hpp"

namespace ozadp {

// Two on-disk formats:
//  - Matrix Market array (text): header line
//    `%%MatrixMarket matrix array real general`, optional % comments, a
//    `rows cols` line, then one value per line in column-major order.
//    Values render with shortest round-trip decimals, so finite values and
//    signed zeros survive exactly; NaN payloads do not (text reads back as a
//    quiet NaN).
//  - ADPM (binary): magic "ADPM", u32 little-endian version = 1, u64 LE rows,
//    u64 LE cols, then rows*cols FP64 values row-major little-endian.
//    Bitwise lossless for every payload including NaN bits.
// Format and I/O failures throw std::runtime_error.

void write_matrix_market(std::ostream& os, const MatrixF64& m);
MatrixF64 read_matrix_market(std::istream& is);

void write_adpm(std::ostream& os, const MatrixF64& m);
MatrixF64 read_adpm(std::istream& is);

// Reads either format, sniffing the ADPM magic.
MatrixF64 read_matrix(const std::string& path);

// Picks the format by extension: .mtx and .mm write Matrix Market text,
// anything else writes ADPM binary.
void write_matrix(const std::string& path, const MatrixF64& m);

}  // namespace ozadp
