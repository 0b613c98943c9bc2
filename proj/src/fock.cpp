#include "ionspec/fock.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

ModeOperators mode_operators(int dim) {
    if (dim < 2) throw Error("fock", "mode dimension must be >= 2");
    ModeOperators ops;
    ops.a = CMat::Zero(dim, dim);
    for (int k = 1; k < dim; ++k) ops.a(k - 1, k) = std::sqrt(double(k));
    ops.adag = ops.a.adjoint();
    ops.n = ops.adag * ops.a;
    return ops;
}

CMat displacement(cplx alpha, int dim) {
    if (3 * std::norm(alpha) > dim) {
        std::ostringstream os;
        os << "displacement |alpha|=" << std::abs(alpha) << " is large for dimension " << dim;
        warn("fock", os.str());
    }
    ModeOperators ops = mode_operators(dim);
    CMat gen = alpha * ops.adag - std::conj(alpha) * ops.a;
    return gen.exp();
}

ThermalState thermal_state(double nbar, int dim) {
    if (nbar < 0) throw Error("fock", "nbar must be >= 0");
    if (dim < 1) throw Error("fock", "dimension must be >= 1");
    ThermalState st;
    st.rho = CMat::Zero(dim, dim);
    const double x = nbar / (1 + nbar);
    double p = 1.0 / (1 + nbar);
    double sum = 0;
    for (int k = 0; k < dim; ++k) {
        st.rho(k, k) = p;
        sum += p;
        p *= x;
    }
    st.captured = sum;
    st.rho /= sum;
    return st;
}

FockRegister::FockRegister(std::vector<int> d, std::vector<std::string> l)
    : dims(std::move(d)), labels(std::move(l)) {
    for (int x : dims)
        if (x < 2) throw Error("fock", "register dimensions must be >= 2");
    if (labels.empty())
        for (std::size_t i = 0; i < dims.size(); ++i) labels.push_back("mode" + std::to_string(i));
    if (labels.size() != dims.size()) throw Error("fock", "one label per mode required");
}

int FockRegister::total() const {
    int t = 1;
    for (int x : dims) t *= x;
    return t;
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat embed(const CMat& op, int slot, const FockRegister& reg) {
    if (slot < 0 || slot >= reg.modes()) throw Error("fock", "slot out of range");
    if (op.rows() != reg.dims[slot] || op.cols() != reg.dims[slot])
        throw Error("fock", "operator dimension does not match slot");
    CMat out = CMat::Identity(1, 1);
    for (int s = 0; s < reg.modes(); ++s)
        out = kron(out, s == slot ? op : CMat(CMat::Identity(reg.dims[s], reg.dims[s])));
    return out;
}

CMat product_state(const std::vector<CMat>& factors) {
    CMat out = CMat::Identity(1, 1);
    for (const CMat& f : factors) out = kron(out, f);
    return out;
}

void check_density(const CMat& rho, double tol) {
    double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    double tr = std::abs(rho.trace() - 1.0);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    if (herm > tol || tr > tol || lo < -tol) {
        std::ostringstream os;
        os << "invalid density matrix: hermiticity " << herm << ", trace error " << tr
           << ", min eigenvalue " << lo;
        throw NumericalConsistencyError("fock", os.str());
    }
}

}  // namespace ionspec
