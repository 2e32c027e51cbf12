#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace invarion {

using ControlIndex = std::uint32_t;
using State = std::vector<double>;

/// Finite ordered set of control values. Every value has length `input_dim`.
struct ControlAlphabet {
  std::size_t input_dim = 1;
  std::vector<std::vector<double>> values;

  std::size_t size() const { return values.size(); }

  /// `levels` equally spaced scalars from `lower` to `upper` inclusive.
  static ControlAlphabet uniform(double lower, double upper, std::size_t levels);
  /// Cartesian grid of per-input uniform levels, first input most significant.
  static ControlAlphabet uniform_grid(const std::vector<double>& lower,
                                      const std::vector<double>& upper,
                                      std::size_t levels);
  static ControlAlphabet from_values(std::vector<std::vector<double>> values);

  /// Index of the value with the smallest Euclidean norm (lowest index on ties).
  ControlIndex rest_index() const;
};

/// A finite control sequence of indices into an alphabet. For product systems
/// the entries are joint (mixed-radix) indices; see SystemDef::joint_control.
struct ControlWord {
  std::vector<ControlIndex> entries;

  ControlWord() = default;
  explicit ControlWord(std::vector<ControlIndex> e) : entries(std::move(e)) {}

  std::size_t horizon() const { return entries.size(); }
  ControlIndex operator[](std::size_t k) const { return entries[k]; }

  friend auto operator<=>(const ControlWord&, const ControlWord&) = default;
};

/// (ω ⋆ μ): ω followed by μ.
ControlWord concat(const ControlWord& first, const ControlWord& second);

/// Constant word of length `horizon`.
ControlWord constant_word(ControlIndex u, std::size_t horizon);

/// Discrete-time control system x_{k+1} = f(x_k, u_k). Immutable; copies share
/// state.
class SystemDef {
 public:
  enum class Kind { kLinear, kCircleMultiplier, kProduct, kConjugate };

  /// x' = A x + B u. A is d×d, B is d×m, every control value has length m.
  static SystemDef linear(Eigen::MatrixXd A, Eigen::MatrixXd B,
                          ControlAlphabet alphabet);
  /// x' = (alpha x + u) mod 1 on the circle, |alpha| >= 2.
  static SystemDef circle_multiplier(int alpha, ControlAlphabet alphabet);
  /// Direct product. The joint alphabet is the Cartesian product of the
  /// component alphabets, addressed by mixed-radix index (first component
  /// most significant); it is never materialized.
  static SystemDef product(std::vector<SystemDef> components);
  /// y' = T f(T⁻¹ y, u) where the applied control value reported at state y
  /// is V (u − F T⁻¹ y). Produced by linear-analysis transformations; F = 0
  /// for pure state transformations.
  static SystemDef conjugate(SystemDef base, Eigen::MatrixXd T,
                             Eigen::MatrixXd V, Eigen::MatrixXd F);

  Kind kind() const;
  std::size_t state_dim() const;
  std::uint64_t alphabet_size() const;

  /// Top-level components; a non-product system is its own single component.
  std::size_t component_count() const;
  const SystemDef& component(std::size_t i) const;
  std::size_t component_offset(std::size_t i) const;
  ControlIndex component_control(ControlIndex joint, std::size_t i) const;
  ControlIndex joint_control(std::span<const ControlIndex> parts) const;
  ControlWord project_word(const ControlWord& word, std::size_t i) const;
  ControlWord joint_word(std::span<const ControlWord> parts) const;

  /// Alphabet of a non-product system.
  const ControlAlphabet& alphabet() const;
  const Eigen::MatrixXd& A() const;
  const Eigen::MatrixXd& B() const;
  int alpha() const;
  const SystemDef& base() const;
  const Eigen::MatrixXd& T() const;
  const Eigen::MatrixXd& T_inverse() const;
  const Eigen::MatrixXd& V() const;
  const Eigen::MatrixXd& F() const;

  /// Control value actually applied at `state` (state-dependent only for
  /// feedback-conjugated systems). Non-product systems only.
  std::vector<double> control_value(std::span<const double> state,
                                    ControlIndex u) const;

  /// f(x, u) written to `out`. No validation and no allocation on the linear
  /// and circle paths; `x` and `out` must not overlap.
  void step_into(std::span<const double> x, ControlIndex u,
                 std::span<double> out) const;
  /// Checked f(x, u); throws InputError on dimension or index mismatch.
  State step(std::span<const double> x, ControlIndex u) const;

  struct Impl;

 private:
  explicit SystemDef(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline SystemDef product(std::vector<SystemDef> components) {
  return SystemDef::product(std::move(components));
}

inline State step(const SystemDef& system, std::span<const double> x,
                  ControlIndex u) {
  return system.step(x, u);
}

/// φ(k, x0, ω) for k = 0..τ; entry 0 is x0.
std::vector<State> trajectory(const SystemDef& system, std::span<const double> x0,
                              const ControlWord& word);

}  // namespace invarion
