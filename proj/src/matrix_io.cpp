#include "ozadp/matrix_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ozadp {

static_assert(std::endian::native == std::endian::little,
              "the ADPM reader/writer assumes a little-endian host");

namespace {

// 2^28 elements (2 GiB of FP64) is far beyond anything the tools handle.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 28;

[[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

void check_dims(std::uint64_t rows, std::uint64_t cols) {
    if (rows > kMaxElements || cols > kMaxElements || rows * cols > kMaxElements)
        fail("matrix file: dimensions out of range");
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

}  // namespace

void write_matrix_market(std::ostream& os, const MatrixF64& m) {
    os << "%%MatrixMarket matrix array real general\n";
    os << m.rows() << ' ' << m.cols() << '\n';
    char buf[64];
    for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
            os.write(buf, p - buf);
            os.put('\n');
        }
    }
    if (!os) fail("matrix market: write failed");
}

MatrixF64 read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) fail("matrix market: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "array" ||
        lower(field) != "real" || lower(symmetry) != "general")
        fail("matrix market: unsupported header: " + line);

    do {
        if (!std::getline(is, line)) fail("matrix market: missing dimensions");
        if (!line.empty() && line.back() == '\r') line.pop_back();
    } while (line.empty() || line[0] == '%');

    std::istringstream dims(line);
    std::uint64_t rows = 0, cols = 0;
    if (!(dims >> rows >> cols)) fail("matrix market: bad dimension line: " + line);
    check_dims(rows, cols);

    MatrixF64 m(rows, cols);
    std::string token;
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            if (!(is >> token)) fail("matrix market: not enough values");
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size())
                fail("matrix market: bad value: " + token);
            m(i, j) = v;
        }
    }
    return m;
}

void write_adpm(std::ostream& os, const MatrixF64& m) {
    const char magic[4] = {'A', 'D', 'P', 'M'};
    const std::uint32_t version = 1;
    const std::uint64_t rows = m.rows(), cols = m.cols();
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    os.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    os.write(reinterpret_cast<const char*>(m.data()),
             std::streamsize(m.size() * sizeof(double)));
    if (!os) fail("adpm: write failed");
}

MatrixF64 read_adpm(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "ADPM", 4) != 0) fail("adpm: bad magic");
    std::uint32_t version = 0;
    is.read(reinterpret_cast<char*>(&version), sizeof version);
    if (!is || version != 1) fail("adpm: unsupported version");
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), sizeof rows);
    is.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!is) fail("adpm: truncated header");
    check_dims(rows, cols);
    MatrixF64 m(rows, cols);
    const std::streamsize want = std::streamsize(m.size() * sizeof(double));
    is.read(reinterpret_cast<char*>(m.data()), want);
    if (is.gcount() != want) fail("adpm: truncated payload");
    return m;
}

MatrixF64 read_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail("cannot open " + path);
    char magic[4] = {};
    f.read(magic, 4);
    const bool is_adpm = f.gcount() == 4 && std::memcmp(magic, "ADPM", 4) == 0;
    f.clear();
    f.seekg(0);
    return is_adpm ? read_adpm(f) : read_matrix_market(f);
}

void write_matrix(const std::string& path, const MatrixF64& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail("cannot open " + path + " for writing");
    const std::size_t dot = path.rfind('.');
    const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
    if (ext == "mtx" || ext == "mm")
        write_matrix_market(f, m);
    else
        write_adpm(f, m);
    f.flush();
    if (!f) fail("write failed: " + path);
}

}  // namespace ozadp
