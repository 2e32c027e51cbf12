#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

struct LinearPair {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

struct Eigenvalue {
  std::complex<double> value;
  std::size_t multiplicity = 1;
};

/// Eigenvalues grouped by value (within 1e-6), sorted by decreasing modulus.
std::vector<Eigenvalue> spectrum(const Eigen::MatrixXd& A);

/// Σ log2|λ| over eigenvalues (with multiplicity) with |λ| > 1 + 1e-9.
double unstable_entropy(const Eigen::MatrixXd& A);

/// True if some eigenvalue lies within 1e-9 of the unit circle; such
/// eigenvalues contribute nothing to unstable_entropy.
bool near_unit_circle(const Eigen::MatrixXd& A);

struct Controllability {
  bool controllable = false;
  std::size_t rank = 0;
  /// Kronecker indices: per input column, how many of b_j, A b_j, … were
  /// selected scanning [B, AB, A²B, …] column by column.
  std::vector<std::size_t> indices;
};

Controllability controllable(const LinearPair& pair);

/// Linear transformation of a system. State: y = T x with control values
/// mapped by V. Feedback: y = T x, applied control u = F x + V⁻¹ v.
struct Transformation {
  enum class Kind { kState, kFeedback };
  Kind kind = Kind::kState;
  Eigen::MatrixXd T;
  Eigen::MatrixXd V;
  Eigen::MatrixXd F;

  static Transformation state(Eigen::MatrixXd T, Eigen::MatrixXd V);
  static Transformation feedback(Eigen::MatrixXd T, Eigen::MatrixXd V, Eigen::MatrixXd F);
};

struct BrunovskyForm {
  Transformation transformation;  // feedback kind
  LinearPair canonical;           // T(A+BF)T⁻¹, T B V⁻¹
  std::vector<std::size_t> indices;
};

/// Feedback transformation to Brunovsky canonical form (Luenberger
/// construction). Requires a controllable pair with B of full column rank.
BrunovskyForm brunovsky(const LinearPair& pair);

/// Canonical pair for the given chain lengths: shift blocks and unit input
/// columns at the end of each chain.
LinearPair brunovsky_canonical(const std::vector<std::size_t>& indices);

/// System conjugated by `t`: trajectories from T x under a word equal T times
/// the original trajectories from x under the same word. Throws InputError
/// when T or V is singular or ill-conditioned (condition number > 1e12).
SystemDef apply_transformation(const SystemDef& system, const Transformation& t);

/// Image of a transformation applied to the closed-loop linear pair.
LinearPair transform_pair(const LinearPair& pair, const Transformation& t);

struct EntropySet {
  std::vector<double> thresholds;  // H(Q) = Π [threshold_i, ∞)
  std::vector<std::string> warnings;
};

/// Per-component lower corners of the rectangular network entropy set.
EntropySet rectangular_entropy_set(const std::vector<LinearPair>& pairs);

Eigen::MatrixXd blockdiag(const std::vector<Eigen::MatrixXd>& blocks);

struct VolumeGrowth {
  double measured = 0.0;  // (1/τ) log2 of the lattice-count ratio
  double expected = 0.0;  // log2 |det| of the unstable part
  bool within(double relative) const;
};

/// Lattice-count volume growth of A^τ(box) on the unstable axes of a diagonal
/// A, at lattice spacing (upper - lower) / (resolution - 1) per axis.
VolumeGrowth volume_growth(const Eigen::MatrixXd& A, const std::vector<double>& lower,
                           const std::vector<double>& upper, std::size_t resolution,
                           std::size_t tau);

struct InvarianceCertificate {
  bool holds = false;
  std::vector<std::size_t> failures;  // grid points of Q with no control into int K
};

/// Grid sufficient condition for strong controlled invariance: every grid
/// point of Q has a control sending it into K shrunk by K's margin.
InvarianceCertificate strong_invariance_certificate(const SystemDef& system, const GridRegion& Q,
                                                    const GridRegion& K);

}  // namespace invarion
