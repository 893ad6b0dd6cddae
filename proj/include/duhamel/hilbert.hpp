#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace duhamel::hilbert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Largest N accepted by the dense operator constructors (2^N-dimensional
/// solves); override with the DUHAMEL_MAX_SITES environment variable.
int size_cap();

/// Dense operator on the 2^N spin-1/2 Hilbert space.  Site 1 is the most
/// significant tensor factor: basis index b assigns site j the bit (N-j).
struct DenseOperator {
    int n_sites = 0;
    Matrix mat;
    bool hermitian_hint = false;

    Eigen::Index dim() const { return mat.rows(); }
};

DenseOperator identity_op(int n_sites);
DenseOperator pauli(int site, char axis, int n_sites);

/// Product of single-site Paulis, e.g. {{1,'x'},{3,'z'}} for X1*Z3.
DenseOperator pauli_string(int n_sites, const std::vector<std::pair<int, char>>& factors);

DenseOperator dagger(const DenseOperator& a);
DenseOperator multiply(const DenseOperator& a, const DenseOperator& b);
DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);
DenseOperator anticommutator(const DenseOperator& a, const DenseOperator& b);

/// H = -(1/sqrt(N)) sum_{i<j} g_ij Z_i Z_j - h sum_j Z_j - b1 sum_j X_j.
/// Only the strict upper triangle of g is read.
DenseOperator build_tfsk(int n_sites, const Eigen::MatrixXd& g, double h, double b1);

/// Interpolated Hamiltonian: couplings weighted sqrt(s/N), longitudinal field
/// sqrt(q(1-s)) z_j + h, transverse field b(s) = b1 s + b0 (1-s).
DenseOperator build_interpolated(int n_sites, double s, const Eigen::MatrixXd& g,
                                 const Eigen::VectorXd& z, double q, double h, double b0, double b1);

struct EigenSystem {
    int n_sites = 0;
    Eigen::VectorXd energies;  // ascending
    Matrix basis;              // unitary, columns are eigenvectors
};

EigenSystem eigendecompose(const DenseOperator& op);

/// Immutable Gibbs-state context: eigensystem, beta, normalized Boltzmann
/// weights (computed after subtracting the minimum energy).
struct GibbsContext {
    EigenSystem eig;
    double beta = 0.0;
    Eigen::VectorXd weights;

    Eigen::Index dim() const { return eig.energies.size(); }
    /// Operator in the energy eigenbasis, V^dag A V.
    Matrix to_eigenbasis(const DenseOperator& a) const;
};

GibbsContext make_gibbs(EigenSystem eig, double beta);
GibbsContext make_gibbs(const DenseOperator& h, double beta);

std::complex<double> thermal_expectation(const GibbsContext& ctx, const DenseOperator& a);

/// Finite spectral measure of Q_{A,B}: atoms (omega, weight) at the energy
/// gaps omega = E_mu - E_nu with weight <nu|A|mu><mu|B|nu>(w_nu + w_mu),
/// aggregated over degenerate gaps and pruned of negligible weights.
struct SpectralMeasure {
    std::vector<std::pair<double, Complex>> atoms;
    double beta = 0.0;

    Complex total_weight() const;
    double total_abs() const;
};

SpectralMeasure spectral_measure(const GibbsContext& ctx, const DenseOperator& a,
                                 const DenseOperator& b);

/// Duhamel two-point function (A,B) evaluated with the closed-form kernel
/// exp(-beta (E_mu+E_nu)/2) sinhc(beta (E_mu-E_nu)/2) / Z.
std::complex<double> duhamel(const GibbsContext& ctx, const DenseOperator& a,
                             const DenseOperator& b);

/// Independent oracle: direct composite Gauss-Legendre integration of
/// <e^{beta t H} A e^{-beta t H} B> over t in [0,1]; `steps` panels.
std::complex<double> duhamel_by_quadrature(const DenseOperator& h, double beta,
                                           const DenseOperator& a, const DenseOperator& b,
                                           int steps);

/// k-fold nested commutator [H,...,[H,A]...]; k = 0 returns A.
DenseOperator nested_commutator(const DenseOperator& h, const DenseOperator& a, int k);

struct BilinearExpectations {
    Complex anticomm;     // <{A,B}>
    Complex comm;         // <[A,B]>
    Complex double_comm;  // <[A,[H,B]]>
};

/// Reference values from plain matrix algebra in the eigenbasis (independent
/// of the spectral-measure code path).
BilinearExpectations bilinear_expectations(const GibbsContext& ctx, const DenseOperator& a,
                                           const DenseOperator& b);

/// sinh(u)/u and tanh(u)/u with series fallback for small |u|.
double sinhc(double u);
double tanhc(double u);

/// log sum_mu exp(-beta E_mu), shifted against overflow.
double log_partition(const Eigen::VectorXd& energies, double beta);

}  // namespace duhamel::hilbert
