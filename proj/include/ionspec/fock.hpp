#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ionspec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct ModeOperators {
    CMat a, adag, n;
};

ModeOperators mode_operators(int dim);

// exp(alpha a^dag - conj(alpha) a) on the truncated space.
CMat displacement(cplx alpha, int dim);

struct ThermalState {
    CMat rho;
    double captured = 1;  // probability inside the truncation before renormalizing
};

ThermalState thermal_state(double nbar, int dim);

struct FockRegister {
    std::vector<int> dims;
    std::vector<std::string> labels;

    FockRegister() = default;
    FockRegister(std::vector<int> d, std::vector<std::string> l = {});
    int modes() const { return static_cast<int>(dims.size()); }
    int total() const;
};

CMat kron(const CMat& a, const CMat& b);
CMat embed(const CMat& op, int slot, const FockRegister& reg);
// Tensor product of one density matrix per slot, in register order.
CMat product_state(const std::vector<CMat>& factors);

// Throws NumericalConsistencyError if rho is not a valid density matrix.
void check_density(const CMat& rho, double tol = 1e-10);

}  // namespace ionspec
