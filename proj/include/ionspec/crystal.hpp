#pragma once

#include <Eigen/Dense>

namespace ionspec {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double e_charge = 1.602176634e-19;     // C
inline constexpr double epsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double amu = 1.66053906660e-27;        // kg
inline constexpr double m_electron = 9.1093837015e-31;  // kg
// 40Ca+ : neutral atomic mass minus one electron.
inline constexpr double mass_ca40_ion = 39.962590866 * amu - m_electron;
}  // namespace constants

struct TrapConfig {
    int n_ions = 3;
    double mass = constants::mass_ca40_ion;  // kg
    double omega_x = 0;                      // rad/s
    double omega_y = 0;
    double omega_z = 0;

    double alpha_x() const { return (omega_z / omega_x) * (omega_z / omega_x); }
    double alpha_y() const { return (omega_z / omega_y) * (omega_z / omega_y); }
};

// Trap of the reference simulation: 3 ions, 2 / 3.1012 / 5 MHz.
TrapConfig reference_trap();

struct EquilibriumChain {
    Eigen::VectorXd u;  // dimensionless, ascending
    double l_z = 0;     // m
};

// Dimensionless axial potential 1/2 sum u^2 + 1/2 sum_{i!=j} 1/|u_i-u_j|.
double axial_potential(const Eigen::VectorXd& u);
Eigen::VectorXd axial_gradient(const Eigen::VectorXd& u);

Eigen::VectorXd solve_equilibrium(int n_ions);
double length_scale(double mass, double omega_z);
EquilibriumChain equilibrium_chain(const TrapConfig& trap);

struct Hessians {
    Eigen::MatrixXd vz, vx, vy;
    double alpha_x = 0, alpha_y = 0;
};

Hessians hessians(const Eigen::VectorXd& u, double alpha_x, double alpha_y);

struct NormalModes {
    Eigen::VectorXd lambda_z;  // ascending, lambda_z[0] = 1
    Eigen::VectorXd gamma_x;   // descending in n
    Eigen::VectorXd gamma_y;
    Eigen::MatrixXd M;         // columns are modes, shared by all directions
    double alpha_x = 0, alpha_y = 0;

    int size() const { return static_cast<int>(lambda_z.size()); }
    // Transverse zigzag mode: highest index, softest radial mode.
    int zigzag() const { return size() - 1; }
};

NormalModes normal_modes(const Hessians& h);

// Anisotropy at which the x zigzag mode goes soft.
double critical_anisotropy(int n_ions);

struct Crystal {
    TrapConfig trap;
    EquilibriumChain chain;
    NormalModes modes;

    // z0 / (4 l_z) with z0 = sqrt(hbar / (2 m omega_z)).
    double epsilon() const;
    double omega_axial(int n) const;
    double omega_x(int n) const;
    double omega_y(int n) const;
};

Crystal build_crystal(const TrapConfig& trap);

}  // namespace ionspec
