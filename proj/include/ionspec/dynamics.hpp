#pragma once

#include <cstddef>
#include <vector>

#include "ionspec/fock.hpp"

namespace ionspec {

struct CollapseOp {
    CMat op;
    double rate = 0;  // 1/s, dissipator rate * D[op]
};

struct LindbladModel {
    CMat H;  // rad/s, hbar = 1
    std::vector<CollapseOp> collapse;
    FockRegister reg;

    // Throws if H is not Hermitian or a rate is negative.
    void validate() const;
    bool dissipative() const;
};

// Infinite-temperature heating: sqrt(ndot) a and sqrt(ndot) a^dag.
std::vector<CollapseOp> heating_dissipator(int slot, double ndot, const FockRegister& reg);

// Column-stacked generator: d vec(rho)/dt = L vec(rho).
CMat liouvillian(const LindbladModel& model);

struct PropagatorOptions {
    std::size_t memory_budget = std::size_t(1) << 30;  // bytes for the superoperator
    bool allow_diagonal = true;
};

class Propagator {
public:
    enum class Kind { Diagonal, Unitary, Superoperator };

    Kind kind() const { return kind_; }
    double dt() const { return dt_; }
    int dim() const { return dim_; }

    CMat apply(const CMat& rho) const;
    // Heisenberg picture: tr(O apply(rho)) = tr(apply_adjoint(O) rho).
    CMat apply_adjoint(const CMat& op) const;

    const CVec& phases() const { return phases_; }
    const CMat& unitary() const { return unitary_; }
    const CMat& superoperator() const { return super_; }

private:
    friend Propagator build_propagator(const LindbladModel&, double, const PropagatorOptions&);
    Kind kind_ = Kind::Unitary;
    double dt_ = 0;
    int dim_ = 0;
    CVec phases_;
    CMat unitary_;
    CMat super_;
};

Propagator build_propagator(const LindbladModel& model, double dt,
                            const PropagatorOptions& opts = {});

// Applies the propagator `steps` times, re-symmetrizing after each step.
CMat evolve(CMat rho, const Propagator& prop, int steps);

}  // namespace ionspec
