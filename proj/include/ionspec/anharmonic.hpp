#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionspec/crystal.hpp"

namespace ionspec {

// Dense N^R tensor, row-major in its indices.
template <int R>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(int n) : n_(n), data_(ipow(n), 0.0) {}

    int size() const { return n_; }
    template <typename... I>
    double& operator()(I... idx) { return data_[flat(idx...)]; }
    template <typename... I>
    double operator()(I... idx) const { return data_[flat(idx...)]; }
    const std::vector<double>& data() const { return data_; }

private:
    static std::size_t ipow(int n) {
        std::size_t p = 1;
        for (int r = 0; r < R; ++r) p *= static_cast<std::size_t>(n);
        return p;
    }
    template <typename... I>
    std::size_t flat(I... idx) const {
        static_assert(sizeof...(I) == R);
        std::size_t f = 0;
        ((f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
        return f;
    }
    int n_ = 0;
    std::vector<double> data_;
};

using Tensor3 = Tensor<3>;
using Tensor4 = Tensor<4>;

// Position-basis coupling tensors. C3(i,j,k): i,j transverse, k axial.
Tensor3 c3_tensor(const Eigen::VectorXd& u);
Tensor4 c4_tensor(const Eigen::VectorXd& u);

struct ModeTensors {
    Tensor3 d3;
    Tensor4 d4;
};

ModeTensors mode_tensors(const Tensor3& c3, const Tensor4& c4, const Eigen::MatrixXd& M);

enum class Dir { X = 0, Y = 1, Z = 2 };

// Kerr-form parameters of one perturbative order, all in rad/s.
//   omega_si  coefficient of (a^dag)^2 a^2 is omega_si / 2
//   delta_zz  zigzag frequency shift
//   omega_d[d][n]  cross-Kerr n_zz n_{d,n}; the zigzag and COM entries stay 0
//   delta[d][n]    shift of mode (d, n)
struct KerrParams {
    double omega_si = 0;
    double delta_zz = 0;
    std::array<std::vector<double>, 3> omega_d;
    std::array<std::vector<double>, 3> delta;

    explicit KerrParams(int n = 0);
};

KerrParams operator+(const KerrParams& a, const KerrParams& b);

struct EffectiveParams {
    KerrParams third, fourth, effective;
};

struct ResonantCoupling {
    double omega_t = 0;   // rad/s, sign follows D3(zz,zz,str)
    double detuning = 0;  // 2 omega_zz - omega_str, rad/s
};

// Fourth-order (diagonal) part. Throws if the zigzag mode is too soft for
// the expansion.
KerrParams effective_kerr(const Crystal& crystal, const ModeTensors& t);

// Second-order perturbation theory of the third-order terms that involve the
// x zigzag mode, fitted to the Kerr form on a grid of occupations 0..max_n.
KerrParams perturbative_third_order(const Crystal& crystal, const ModeTensors& t, int max_n = 3);

KerrParams combine_orders(const KerrParams& third, const KerrParams& fourth);

EffectiveParams effective_params(const Crystal& crystal, const ModeTensors& t);

// Anisotropy where 2 omega_zz = omega_str for N = 3.
inline constexpr double resonant_alpha = 20.0 / 63.0;

ResonantCoupling resonant_coupling(const Crystal& crystal, const ModeTensors& t,
                                   double alpha_window = 1e-3);

struct RwaTerm {
    std::string id;        // e.g. "xxxx[2,2,2,2]+++-"
    double coefficient;    // rad/s
    double frequency;      // rad/s in the interaction picture
    double ratio;          // |c/omega|, 0 for secular terms
    bool secular;
};

struct RwaReport {
    std::vector<RwaTerm> terms;
    double max_ratio = 0;
    std::string worst;
};

// Enumerates the fourth-order operator products that involve the x zigzag
// mode, 16 per index quartet.
RwaReport rwa_report(const Crystal& crystal, const ModeTensors& t);

struct Manifold {
    int charge;                               // n_zz + 2 n_str
    std::vector<std::array<int, 2>> basis;    // (n_str, n_zz)
    std::vector<double> eigenvalues;          // ascending, rad/s
};

// Blocks of Omega_T (a_zz^2 a_str^dag + h.c.) for charges 2..max_quanta.
std::vector<Manifold> resonant_manifolds(double omega_t, int max_quanta);

}  // namespace ionspec
