#pragma once

#include <string>

#include <Eigen/Dense>

namespace ionspec {

// Layout: 8-byte magic "IONSPECM", u32 version, u32 kind (0 real, 1 complex),
// u64 rows, u64 cols, then row-major little-endian f64 (re/im interleaved).
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);
void write_matrix(const std::string& path, const Eigen::MatrixXcd& m);

struct MatrixFile {
    bool complex = false;
    Eigen::MatrixXd real;
    Eigen::MatrixXcd cplx;
};

MatrixFile read_matrix(const std::string& path);

}  // namespace ionspec
