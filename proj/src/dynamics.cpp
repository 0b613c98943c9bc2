#include "ionspec/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ionspec/diagnostics.hpp"

namespace ionspec {

void LindbladModel::validate() const {
    if (H.rows() != H.cols() || H.rows() != reg.total())
        throw Error("dynamics", "Hamiltonian dimension does not match the register");
    double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error("dynamics", "Hamiltonian is not Hermitian");
    for (const auto& c : collapse) {
        if (c.rate < 0) throw Error("dynamics", "negative collapse rate");
        if (c.op.rows() != H.rows() || c.op.cols() != H.cols())
            throw Error("dynamics", "collapse operator dimension mismatch");
    }
}

bool LindbladModel::dissipative() const {
    for (const auto& c : collapse)
        if (c.rate > 0) return true;
    return false;
}

std::vector<CollapseOp> heating_dissipator(int slot, double ndot, const FockRegister& reg) {
    if (ndot < 0) throw Error("dynamics", "heating rate must be >= 0");
    if (ndot == 0) return {};
    ModeOperators ops = mode_operators(reg.dims.at(slot));
    return {{embed(ops.a, slot, reg), ndot}, {embed(ops.adag, slot, reg), ndot}};
}

CMat liouvillian(const LindbladModel& model) {
    const Eigen::Index d = model.H.rows();
    const CMat id = CMat::Identity(d, d);
    const cplx i(0, 1);
    CMat L = -i * (kron(id, model.H) - kron(model.H.transpose(), id));
    for (const auto& c : model.collapse) {
        if (c.rate == 0) continue;
        CMat ldl = c.op.adjoint() * c.op;
        L += c.rate * (kron(c.op.conjugate(), c.op) - 0.5 * kron(id, ldl) -
                       0.5 * kron(ldl.transpose(), id));
    }
    return L;
}

Propagator build_propagator(const LindbladModel& model, double dt, const PropagatorOptions& opts) {
    if (!(dt > 0)) throw Error("dynamics", "dt must be positive");
    model.validate();
    Propagator p;
    p.dt_ = dt;
    p.dim_ = static_cast<int>(model.H.rows());
    const cplx i(0, 1);

    if (!model.dissipative()) {
        CMat off = model.H;
        off.diagonal().setZero();
        if (opts.allow_diagonal && off.cwiseAbs().maxCoeff() == 0.0) {
            p.kind_ = Propagator::Kind::Diagonal;
            p.phases_ = (-i * dt * model.H.diagonal().real().cast<cplx>()).array().exp();
            return p;
        }
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (model.H + model.H.adjoint()));
        CVec ph = (-i * dt * es.eigenvalues().cast<cplx>()).array().exp();
        p.kind_ = Propagator::Kind::Unitary;
        p.unitary_ = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        return p;
    }

    const double d2 = double(p.dim_) * p.dim_;
    const double bytes = d2 * d2 * sizeof(cplx);
    if (bytes > double(opts.memory_budget)) {
        std::ostringstream os;
        os << "superoperator of dimension " << p.dim_ * p.dim_ << " needs " << bytes / 1e9
           << " GB, budget is " << double(opts.memory_budget) / 1e9 << " GB";
        throw SizeError("dynamics", os.str());
    }
    p.kind_ = Propagator::Kind::Superoperator;
    CMat gen = liouvillian(model) * dt;
    p.super_ = gen.exp();
    return p;
}

CMat Propagator::apply(const CMat& rho) const {
    switch (kind_) {
    case Kind::Diagonal:
        return phases_.asDiagonal() * rho * phases_.conjugate().asDiagonal();
    case Kind::Unitary:
        return unitary_ * rho * unitary_.adjoint();
    case Kind::Superoperator: {
        CMat out(dim_, dim_);
        Eigen::Map<CVec>(out.data(), out.size()) =
            super_ * Eigen::Map<const CVec>(rho.data(), rho.size());
        return out;
    }
    }
    return rho;
}

CMat Propagator::apply_adjoint(const CMat& op) const {
    switch (kind_) {
    case Kind::Diagonal:
        return phases_.conjugate().asDiagonal() * op * phases_.asDiagonal();
    case Kind::Unitary:
        return unitary_.adjoint() * op * unitary_;
    case Kind::Superoperator: {
        // tr(O S rho) = vec(O^T)^T S vec(rho)
        CMat ot = op.transpose();
        CMat out(dim_, dim_);
        Eigen::Map<CVec>(out.data(), out.size()) =
            super_.transpose() * Eigen::Map<const CVec>(ot.data(), ot.size());
        return out.transpose();
    }
    }
    return op;
}

CMat evolve(CMat rho, const Propagator& prop, int steps) {
    if (rho.rows() != prop.dim()) throw Error("dynamics", "state dimension mismatch");
    for (int s = 0; s < steps; ++s) {
        cplx before = rho.trace();
        rho = prop.apply(rho);
        rho = 0.5 * (rho + rho.adjoint()).eval();
        double drift = std::abs(rho.trace() - before);
        if (drift > 1e-9) {
            std::ostringstream os;
            os << "trace drift " << drift << " at step " << s;
            throw PropagatorAccuracyError("dynamics", os.str());
        }
    }
    return rho;
}

}  // namespace ionspec
