#include "invarion/linear.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

constexpr double kUnstableBand = 1e-9;
constexpr double kGroupTol = 1e-6;
constexpr double kMaxCondition = 1e12;

void require_square(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw InputError(std::string(what) + ": matrix must be square and nonempty");
  }
}

void require_pair(const LinearPair& p) {
  require_square(p.A, "pair");
  if (p.B.rows() != p.A.rows() || p.B.cols() == 0) {
    throw InputError("pair: B must have as many rows as A and at least one column");
  }
}

double condition(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo == 0.0 ? INFINITY : s(0) / lo;
}

double rank_tolerance(const Eigen::MatrixXd& M) {
  return 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff());
}

Eigen::Index rank_of(const Eigen::MatrixXd& M) {
  if (M.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  qr.setThreshold(rank_tolerance(M) / std::max(1.0, M.cwiseAbs().maxCoeff()));
  return qr.rank();
}

}  // namespace

std::vector<Eigenvalue> spectrum(const Eigen::MatrixXd& A) {
  require_square(A, "spectrum");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw InputError("spectrum: eigenvalue iteration failed");
  std::vector<Eigenvalue> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    auto it = std::find_if(out.begin(), out.end(), [&](const Eigenvalue& e) {
      return std::abs(e.value - z) <= kGroupTol * std::max(1.0, std::abs(z));
    });
    if (it == out.end()) {
      out.push_back({z, 1});
    } else {
      ++it->multiplicity;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

double unstable_entropy(const Eigen::MatrixXd& A) {
  require_square(A, "unstable_entropy");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw InputError("unstable_entropy: eigenvalue iteration failed");
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double r = std::abs(es.eigenvalues()(i));
    if (r > 1.0 + kUnstableBand) h += std::log2(r);
  }
  return h;
}

bool near_unit_circle(const Eigen::MatrixXd& A) {
  require_square(A, "near_unit_circle");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::fabs(std::abs(es.eigenvalues()(i)) - 1.0) <= kUnstableBand) return true;
  }
  return false;
}

Controllability controllable(const LinearPair& pair) {
  require_pair(pair);
  const Eigen::Index d = pair.A.rows();
  const Eigen::Index m = pair.B.cols();
  Controllability out;
  out.indices.assign(static_cast<std::size_t>(m), 0);
  Eigen::MatrixXd kept(d, 0);
  Eigen::MatrixXd power = pair.B;  // A^k B
  std::vector<bool> alive(static_cast<std::size_t>(m), true);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!alive[static_cast<std::size_t>(j)]) continue;
      Eigen::MatrixXd trial(d, kept.cols() + 1);
      trial << kept, power.col(j);
      if (rank_of(trial) > kept.cols()) {
        kept = std::move(trial);
        ++out.indices[static_cast<std::size_t>(j)];
      } else {
        // Once A^k b_j depends on earlier columns, so do all higher powers.
        alive[static_cast<std::size_t>(j)] = false;
      }
    }
    power = pair.A * power;
  }
  out.rank = static_cast<std::size_t>(kept.cols());
  out.controllable = out.rank == static_cast<std::size_t>(d);
  return out;
}

Transformation Transformation::state(Eigen::MatrixXd T, Eigen::MatrixXd V) {
  return {Kind::kState, std::move(T), std::move(V), Eigen::MatrixXd()};
}

Transformation Transformation::feedback(Eigen::MatrixXd T, Eigen::MatrixXd V, Eigen::MatrixXd F) {
  return {Kind::kFeedback, std::move(T), std::move(V), std::move(F)};
}

LinearPair brunovsky_canonical(const std::vector<std::size_t>& indices) {
  std::size_t d = 0;
  for (auto k : indices) d += k;
  const auto n = static_cast<Eigen::Index>(d);
  LinearPair c{Eigen::MatrixXd::Zero(n, n),
               Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(indices.size()))};
  Eigen::Index start = 0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const auto len = static_cast<Eigen::Index>(indices[j]);
    for (Eigen::Index r = 0; r + 1 < len; ++r) c.A(start + r, start + r + 1) = 1.0;
    if (len > 0) c.B(start + len - 1, static_cast<Eigen::Index>(j)) = 1.0;
    start += len;
  }
  return c;
}

BrunovskyForm brunovsky(const LinearPair& pair) {
  require_pair(pair);
  const Eigen::Index d = pair.A.rows();
  const Eigen::Index m = pair.B.cols();
  if (rank_of(pair.B) < m) throw InputError("brunovsky: B must have full column rank");
  const Controllability ctrl = controllable(pair);
  if (!ctrl.controllable) {
    throw InputError("brunovsky: pair is not controllable (controllability matrix rank " +
                     std::to_string(ctrl.rank) + " < " + std::to_string(d) + ")");
  }
  // C = [b1, A b1, …, A^{κ1-1} b1, b2, …] and its inverse.
  Eigen::MatrixXd C(d, d);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd v = pair.B.col(j);
    for (std::size_t k = 0; k < ctrl.indices[static_cast<std::size_t>(j)]; ++k) {
      C.col(col++) = v;
      v = pair.A * v;
    }
  }
  const Eigen::MatrixXd Cinv = C.inverse();
  Eigen::MatrixXd T(d, d), R(m, d), G(m, m);
  Eigen::Index row = 0, sigma = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto kj = static_cast<Eigen::Index>(ctrl.indices[static_cast<std::size_t>(j)]);
    sigma += kj;
    Eigen::RowVectorXd q = Cinv.row(sigma - 1);
    for (Eigen::Index k = 0; k < kj; ++k) {
      T.row(row++) = q;
      q = q * pair.A;
    }
    R.row(j) = q;                                     // q_j A^{κ_j}
    G.row(j) = T.row(row - 1) * pair.B;               // q_j A^{κ_j - 1} B
  }
  const Eigen::MatrixXd Ginv = G.inverse();
  BrunovskyForm out;
  out.indices = ctrl.indices;
  out.transformation = Transformation::feedback(T, G, -Ginv * R);
  out.canonical = transform_pair(pair, out.transformation);
  return out;
}

LinearPair transform_pair(const LinearPair& pair, const Transformation& t) {
  require_pair(pair);
  const Eigen::MatrixXd Tinv = t.T.inverse();
  const Eigen::MatrixXd Vinv = t.V.inverse();
  Eigen::MatrixXd closed = pair.A;
  if (t.kind == Transformation::Kind::kFeedback) closed += pair.B * t.F;
  return {t.T * closed * Tinv, t.T * pair.B * Vinv};
}

SystemDef apply_transformation(const SystemDef& system, const Transformation& t) {
  const auto d = static_cast<Eigen::Index>(system.state_dim());
  if (t.T.rows() != d || t.T.cols() != d) throw InputError("transformation: T has wrong shape");
  if (t.V.rows() != t.V.cols() || t.V.rows() == 0) {
    throw InputError("transformation: V must be square");
  }
  if (condition(t.T) > kMaxCondition) throw InputError("transformation: T is singular");
  if (condition(t.V) > kMaxCondition) throw InputError("transformation: V is singular");
  Eigen::MatrixXd F = t.F;
  if (t.kind == Transformation::Kind::kState || F.size() == 0) {
    F = Eigen::MatrixXd::Zero(t.V.cols(), d);
  }
  if (F.rows() != t.V.cols() || F.cols() != d) {
    throw InputError("transformation: F has wrong shape");
  }
  return SystemDef::conjugate(system, t.T, t.V, F);
}

EntropySet rectangular_entropy_set(const std::vector<LinearPair>& pairs) {
  EntropySet out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (!controllable(p).controllable) {
      out.warnings.push_back("component " + std::to_string(i) +
                             ": pair is not controllable; the formula's hypothesis fails");
    }
    if (near_unit_circle(p.A)) {
      out.warnings.push_back("component " + std::to_string(i) +
                             ": eigenvalue within 1e-9 of the unit circle counted as stable");
    }
    out.thresholds.push_back(unstable_entropy(p.A));
  }
  return out;
}

Eigen::MatrixXd blockdiag(const std::vector<Eigen::MatrixXd>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

bool VolumeGrowth::within(double relative) const {
  return std::fabs(measured - expected) <= relative * std::max(expected, 1e-12);
}

VolumeGrowth volume_growth(const Eigen::MatrixXd& A, const std::vector<double>& lower,
                           const std::vector<double>& upper, std::size_t resolution,
                           std::size_t tau) {
  require_square(A, "volume_growth");
  const auto d = static_cast<std::size_t>(A.rows());
  if (!A.isDiagonal()) throw InputError("volume_growth: only diagonal A is supported");
  if (lower.size() != d || upper.size() != d) throw InputError("volume_growth: box dimension");
  if (resolution < 2 || tau == 0) throw InputError("volume_growth: resolution ≥ 2, tau ≥ 1");
  VolumeGrowth out;
  double log_ratio = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double lambda = A(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
    if (std::fabs(lambda) <= 1.0 + kUnstableBand) continue;
    out.expected += std::log2(std::fabs(lambda));
    const double h = (upper[a] - lower[a]) / static_cast<double>(resolution - 1);
    const double scale = std::pow(std::fabs(lambda), static_cast<double>(tau));
    // Lattice points y = j h whose preimage y / λ^τ lies in [lower, upper].
    const double lo = std::min(lower[a] * scale, upper[a] * scale);
    const double hi = std::max(lower[a] * scale, upper[a] * scale);
    const double n_tau = std::floor(hi / h + 1e-9) - std::ceil(lo / h - 1e-9) + 1.0;
    const double n_0 = static_cast<double>(resolution);
    log_ratio += std::log2(n_tau / n_0);
  }
  out.measured = log_ratio / static_cast<double>(tau);
  return out;
}

InvarianceCertificate strong_invariance_certificate(const SystemDef& system, const GridRegion& Q,
                                                    const GridRegion& K) {
  if (system.state_dim() != Q.dim() || Q.dim() != K.dim()) {
    throw InputError("certificate: system, Q and K dimensions differ");
  }
  const Grid grid = discretize(Q);
  InvarianceCertificate out;
  std::vector<double> y(grid.dim());
  for (std::size_t e = 0; e < grid.size(); ++e) {
    bool ok = false;
    for (std::uint64_t u = 0; u < system.alphabet_size() && !ok; ++u) {
      system.step_into(grid.point(e), static_cast<ControlIndex>(u), y);
      ok = K.in_interior(y);
    }
    if (!ok) out.failures.push_back(e);
  }
  out.holds = out.failures.empty();
  return out;
}

}  // namespace invarion
