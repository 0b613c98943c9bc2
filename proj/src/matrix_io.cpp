#include "ionspec/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

namespace {

constexpr char kMagic[8] = {'I', 'O', 'N', 'S', 'P', 'E', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error("io", "truncated matrix file");
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

std::ofstream open_out(const std::string& path, std::uint32_t kind, Eigen::Index r, Eigen::Index c) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("io", "cannot write " + path);
    os.write(kMagic, 8);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, kind);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(r));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(c));
    return os;
}

}  // namespace

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream os = open_out(path, 0, m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(os, m(i, j));
    if (!os) throw Error("io", "write failed for " + path);
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m) {
    std::ofstream os = open_out(path, 1, m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            put<double>(os, m(i, j).real());
            put<double>(os, m(i, j).imag());
        }
    if (!os) throw Error("io", "write failed for " + path);
}

MatrixFile read_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("io", "cannot read " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
        throw Error("io", path + " is not a matrix file");
    if (get<std::uint32_t>(is) != kVersion) throw Error("io", "unsupported matrix file version");
    const std::uint32_t kind = get<std::uint32_t>(is);
    const auto r = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    const auto c = static_cast<Eigen::Index>(get<std::uint64_t>(is));
    MatrixFile f;
    f.complex = kind == 1;
    if (f.complex) {
        f.cplx.resize(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) {
                double re = get<double>(is);
                double im = get<double>(is);
                f.cplx(i, j) = {re, im};
            }
    } else {
        f.real.resize(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) f.real(i, j) = get<double>(is);
    }
    return f;
}

}  // namespace ionspec
