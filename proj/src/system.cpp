#include "invarion/system.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

struct LinearData {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  ControlAlphabet alphabet;
  std::vector<double> a_rowmajor;
  std::vector<double> bu;  // B·u for every control, d entries each
};

struct CircleData {
  int alpha = 2;
  ControlAlphabet alphabet;
  std::vector<double> u;
};

struct ProductData {
  std::vector<SystemDef> components;
  std::vector<std::size_t> offsets;
  std::vector<std::uint64_t> radix;
  std::vector<std::uint64_t> strides;
};

struct ConjugateData {
  std::vector<SystemDef> base;  // exactly one; vector to avoid incomplete type
  Eigen::MatrixXd T, T_inv, V, F;
  std::vector<double> t_rowmajor, tinv_rowmajor;
};

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    }
  }
  return out;
}

void mat_vec(const std::vector<double>& m, std::size_t n,
             std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = m.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    out[i] = s;
  }
}

}  // namespace

struct SystemDef::Impl {
  Kind kind;
  std::size_t dim;
  std::uint64_t alphabet_size;
  std::variant<LinearData, CircleData, ProductData, ConjugateData> data;
};

ControlAlphabet ControlAlphabet::uniform(double lower, double upper,
                                         std::size_t levels) {
  if (levels == 0) throw InputError("control alphabet needs at least one level");
  ControlAlphabet a;
  a.input_dim = 1;
  if (levels == 1) {
    a.values.push_back({lower});
    return a;
  }
  const double step = (upper - lower) / static_cast<double>(levels - 1);
  for (std::size_t k = 0; k < levels; ++k) {
    a.values.push_back({k + 1 == levels ? upper : lower + static_cast<double>(k) * step});
  }
  return a;
}

ControlAlphabet ControlAlphabet::uniform_grid(const std::vector<double>& lower,
                                              const std::vector<double>& upper,
                                              std::size_t levels) {
  if (lower.size() != upper.size() || lower.empty()) {
    throw InputError("control grid bounds must be nonempty and of equal length");
  }
  std::vector<ControlAlphabet> axes;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    axes.push_back(uniform(lower[i], upper[i], levels));
  }
  ControlAlphabet a;
  a.input_dim = lower.size();
  std::size_t total = 1;
  for (const auto& ax : axes) total *= ax.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> v(lower.size());
    std::size_t rem = idx;
    for (std::size_t i = lower.size(); i-- > 0;) {
      v[i] = axes[i].values[rem % levels][0];
      rem /= levels;
    }
    a.values.push_back(std::move(v));
  }
  return a;
}

ControlAlphabet ControlAlphabet::from_values(std::vector<std::vector<double>> values) {
  if (values.empty()) throw InputError("control alphabet must be nonempty");
  ControlAlphabet a;
  a.input_dim = values.front().size();
  for (const auto& v : values) {
    if (v.size() != a.input_dim) {
      throw InputError("control values must all have the same length");
    }
  }
  a.values = std::move(values);
  return a;
}

ControlIndex ControlAlphabet::rest_index() const {
  ControlIndex best = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < values.size(); ++k) {
    double n = 0.0;
    for (double v : values[k]) n += v * v;
    if (n < best_norm) {
      best_norm = n;
      best = static_cast<ControlIndex>(k);
    }
  }
  return best;
}

ControlWord concat(const ControlWord& first, const ControlWord& second) {
  ControlWord w;
  w.entries.reserve(first.horizon() + second.horizon());
  w.entries.insert(w.entries.end(), first.entries.begin(), first.entries.end());
  w.entries.insert(w.entries.end(), second.entries.begin(), second.entries.end());
  return w;
}

ControlWord constant_word(ControlIndex u, std::size_t horizon) {
  return ControlWord(std::vector<ControlIndex>(horizon, u));
}

SystemDef SystemDef::linear(Eigen::MatrixXd A, Eigen::MatrixXd B,
                            ControlAlphabet alphabet) {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw InputError("linear system: A must be square and nonempty");
  }
  if (B.rows() != A.rows()) throw InputError("linear system: B must have as many rows as A");
  if (alphabet.size() == 0) throw InputError("linear system: empty control alphabet");
  for (const auto& v : alphabet.values) {
    if (static_cast<Eigen::Index>(v.size()) != B.cols()) {
      throw InputError("linear system: control value length " + std::to_string(v.size()) +
                       " does not match B columns " + std::to_string(B.cols()));
    }
  }
  LinearData d;
  d.A = std::move(A);
  d.B = std::move(B);
  d.alphabet = std::move(alphabet);
  d.a_rowmajor = row_major(d.A);
  const auto n = static_cast<std::size_t>(d.A.rows());
  d.bu.resize(n * d.alphabet.size());
  for (std::size_t k = 0; k < d.alphabet.size(); ++k) {
    const Eigen::Map<const Eigen::VectorXd> u(d.alphabet.values[k].data(), d.B.cols());
    const Eigen::VectorXd bu = d.B * u;
    for (std::size_t i = 0; i < n; ++i) d.bu[k * n + i] = bu(static_cast<Eigen::Index>(i));
  }
  const std::uint64_t size = d.alphabet.size();
  return SystemDef(std::make_shared<const Impl>(Impl{Kind::kLinear, n, size, std::move(d)}));
}

SystemDef SystemDef::circle_multiplier(int alpha, ControlAlphabet alphabet) {
  if (std::abs(alpha) < 2) throw InputError("circle multiplier: |alpha| must be at least 2");
  if (alphabet.size() == 0 || alphabet.input_dim != 1) {
    throw InputError("circle multiplier: alphabet must be nonempty and scalar");
  }
  CircleData d;
  d.alpha = alpha;
  d.alphabet = std::move(alphabet);
  for (const auto& v : d.alphabet.values) d.u.push_back(v[0]);
  const std::uint64_t size = d.alphabet.size();
  return SystemDef(std::make_shared<const Impl>(Impl{Kind::kCircleMultiplier, 1, size, std::move(d)}));
}

SystemDef SystemDef::product(std::vector<SystemDef> components) {
  if (components.empty()) throw InputError("product: component list must be nonempty");
  ProductData d;
  std::size_t dim = 0;
  std::uint64_t size = 1;
  for (const auto& c : components) {
    d.offsets.push_back(dim);
    dim += c.state_dim();
    d.radix.push_back(c.alphabet_size());
    size *= c.alphabet_size();
    if (size > std::numeric_limits<ControlIndex>::max()) {
      throw InputError("product: joint alphabet exceeds the control index range");
    }
  }
  d.strides.assign(components.size(), 1);
  for (std::size_t i = components.size() - 1; i-- > 0;) {
    d.strides[i] = d.strides[i + 1] * d.radix[i + 1];
  }
  d.components = std::move(components);
  return SystemDef(std::make_shared<const Impl>(Impl{Kind::kProduct, dim, size, std::move(d)}));
}

SystemDef SystemDef::conjugate(SystemDef base, Eigen::MatrixXd T, Eigen::MatrixXd V,
                               Eigen::MatrixXd F) {
  if (base.kind() == Kind::kProduct) {
    throw InputError("conjugate: transform product components individually");
  }
  const auto n = static_cast<Eigen::Index>(base.state_dim());
  const auto m = static_cast<Eigen::Index>(base.alphabet().input_dim);
  if (T.rows() != n || T.cols() != n) throw InputError("conjugate: T must be d×d");
  if (V.rows() != m || V.cols() != m) throw InputError("conjugate: V must be m×m");
  if (F.rows() != m || F.cols() != n) throw InputError("conjugate: F must be m×d");
  ConjugateData d;
  d.T_inv = T.inverse();
  d.T = std::move(T);
  d.V = std::move(V);
  d.F = std::move(F);
  d.t_rowmajor = row_major(d.T);
  d.tinv_rowmajor = row_major(d.T_inv);
  const std::uint64_t size = base.alphabet_size();
  d.base.push_back(std::move(base));
  return SystemDef(std::make_shared<const Impl>(
      Impl{Kind::kConjugate, static_cast<std::size_t>(n), size, std::move(d)}));
}

SystemDef::Kind SystemDef::kind() const { return impl_->kind; }
std::size_t SystemDef::state_dim() const { return impl_->dim; }
std::uint64_t SystemDef::alphabet_size() const { return impl_->alphabet_size; }

std::size_t SystemDef::component_count() const {
  if (impl_->kind != Kind::kProduct) return 1;
  return std::get<ProductData>(impl_->data).components.size();
}

const SystemDef& SystemDef::component(std::size_t i) const {
  if (impl_->kind != Kind::kProduct) {
    if (i != 0) throw InputError("component index out of range");
    return *this;
  }
  const auto& p = std::get<ProductData>(impl_->data);
  if (i >= p.components.size()) throw InputError("component index out of range");
  return p.components[i];
}

std::size_t SystemDef::component_offset(std::size_t i) const {
  if (impl_->kind != Kind::kProduct) return 0;
  return std::get<ProductData>(impl_->data).offsets.at(i);
}

ControlIndex SystemDef::component_control(ControlIndex joint, std::size_t i) const {
  if (impl_->kind != Kind::kProduct) return joint;
  const auto& p = std::get<ProductData>(impl_->data);
  return static_cast<ControlIndex>((joint / p.strides[i]) % p.radix[i]);
}

ControlIndex SystemDef::joint_control(std::span<const ControlIndex> parts) const {
  if (impl_->kind != Kind::kProduct) {
    if (parts.size() != 1) throw InputError("joint_control: expected one part");
    return parts[0];
  }
  const auto& p = std::get<ProductData>(impl_->data);
  if (parts.size() != p.components.size()) {
    throw InputError("joint_control: expected one part per component");
  }
  std::uint64_t joint = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] >= p.radix[i]) throw InputError("joint_control: index out of range");
    joint += parts[i] * p.strides[i];
  }
  return static_cast<ControlIndex>(joint);
}

ControlWord SystemDef::project_word(const ControlWord& word, std::size_t i) const {
  ControlWord out;
  out.entries.reserve(word.horizon());
  for (auto u : word.entries) out.entries.push_back(component_control(u, i));
  return out;
}

ControlWord SystemDef::joint_word(std::span<const ControlWord> parts) const {
  if (parts.empty()) throw InputError("joint_word: no parts");
  const std::size_t horizon = parts[0].horizon();
  for (const auto& p : parts) {
    if (p.horizon() != horizon) throw InputError("joint_word: horizons differ");
  }
  ControlWord out;
  out.entries.resize(horizon);
  std::vector<ControlIndex> tuple(parts.size());
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < parts.size(); ++i) tuple[i] = parts[i][k];
    out.entries[k] = joint_control(tuple);
  }
  return out;
}

const ControlAlphabet& SystemDef::alphabet() const {
  switch (impl_->kind) {
    case Kind::kLinear: return std::get<LinearData>(impl_->data).alphabet;
    case Kind::kCircleMultiplier: return std::get<CircleData>(impl_->data).alphabet;
    case Kind::kConjugate: return std::get<ConjugateData>(impl_->data).base[0].alphabet();
    case Kind::kProduct: break;
  }
  throw InputError("alphabet(): product systems have no materialized alphabet");
}

const Eigen::MatrixXd& SystemDef::A() const {
  if (impl_->kind != Kind::kLinear) throw InputError("A(): not a linear system");
  return std::get<LinearData>(impl_->data).A;
}

const Eigen::MatrixXd& SystemDef::B() const {
  if (impl_->kind != Kind::kLinear) throw InputError("B(): not a linear system");
  return std::get<LinearData>(impl_->data).B;
}

int SystemDef::alpha() const {
  if (impl_->kind != Kind::kCircleMultiplier) throw InputError("alpha(): not a circle multiplier");
  return std::get<CircleData>(impl_->data).alpha;
}

const SystemDef& SystemDef::base() const {
  if (impl_->kind != Kind::kConjugate) throw InputError("base(): not a conjugated system");
  return std::get<ConjugateData>(impl_->data).base[0];
}

const Eigen::MatrixXd& SystemDef::T() const {
  if (impl_->kind != Kind::kConjugate) throw InputError("T(): not a conjugated system");
  return std::get<ConjugateData>(impl_->data).T;
}

const Eigen::MatrixXd& SystemDef::T_inverse() const {
  if (impl_->kind != Kind::kConjugate) throw InputError("T_inverse(): not a conjugated system");
  return std::get<ConjugateData>(impl_->data).T_inv;
}

const Eigen::MatrixXd& SystemDef::V() const {
  if (impl_->kind != Kind::kConjugate) throw InputError("V(): not a conjugated system");
  return std::get<ConjugateData>(impl_->data).V;
}

const Eigen::MatrixXd& SystemDef::F() const {
  if (impl_->kind != Kind::kConjugate) throw InputError("F(): not a conjugated system");
  return std::get<ConjugateData>(impl_->data).F;
}

std::vector<double> SystemDef::control_value(std::span<const double> state,
                                             ControlIndex u) const {
  if (u >= alphabet_size()) throw InputError("control index out of range");
  if (impl_->kind != Kind::kConjugate) return alphabet().values[u];
  const auto& c = std::get<ConjugateData>(impl_->data);
  const Eigen::Map<const Eigen::VectorXd> y(state.data(), static_cast<Eigen::Index>(state.size()));
  const auto& uv = c.base[0].alphabet().values[u];
  const Eigen::Map<const Eigen::VectorXd> uvec(uv.data(), static_cast<Eigen::Index>(uv.size()));
  const Eigen::VectorXd v = c.V * (uvec - c.F * (c.T_inv * y));
  return std::vector<double>(v.data(), v.data() + v.size());
}

void SystemDef::step_into(std::span<const double> x, ControlIndex u,
                          std::span<double> out) const {
  switch (impl_->kind) {
    case Kind::kLinear: {
      const auto& d = std::get<LinearData>(impl_->data);
      const std::size_t n = impl_->dim;
      const double* bu = d.bu.data() + static_cast<std::size_t>(u) * n;
      for (std::size_t i = 0; i < n; ++i) {
        double s = bu[i];
        const double* row = d.a_rowmajor.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
        out[i] = s;
      }
      return;
    }
    case Kind::kCircleMultiplier: {
      const auto& d = std::get<CircleData>(impl_->data);
      const double v = d.alpha * x[0] + d.u[u];
      double r = v - std::floor(v);
      if (r >= 1.0) r = 0.0;
      out[0] = r;
      return;
    }
    case Kind::kProduct: {
      const auto& p = std::get<ProductData>(impl_->data);
      for (std::size_t i = 0; i < p.components.size(); ++i) {
        const auto& c = p.components[i];
        const auto ui = static_cast<ControlIndex>((u / p.strides[i]) % p.radix[i]);
        c.step_into(x.subspan(p.offsets[i], c.state_dim()), ui,
                    out.subspan(p.offsets[i], c.state_dim()));
      }
      return;
    }
    case Kind::kConjugate: {
      const auto& c = std::get<ConjugateData>(impl_->data);
      const std::size_t n = impl_->dim;
      thread_local std::vector<double> pre, post;
      pre.resize(n);
      post.resize(n);
      mat_vec(c.tinv_rowmajor, n, x, pre);
      c.base[0].step_into(pre, u, post);
      mat_vec(c.t_rowmajor, n, post, out);
      return;
    }
  }
}

State SystemDef::step(std::span<const double> x, ControlIndex u) const {
  if (x.size() != state_dim()) {
    throw InputError("step: state has length " + std::to_string(x.size()) +
                     ", expected " + std::to_string(state_dim()));
  }
  if (u >= alphabet_size()) {
    throw InputError("step: control index " + std::to_string(u) + " out of range");
  }
  State out(state_dim());
  step_into(x, u, out);
  return out;
}

std::vector<State> trajectory(const SystemDef& system, std::span<const double> x0,
                              const ControlWord& word) {
  std::vector<State> traj;
  traj.reserve(word.horizon() + 1);
  traj.emplace_back(x0.begin(), x0.end());
  for (auto u : word.entries) {
    traj.push_back(system.step(traj.back(), u));
  }
  return traj;
}

}  // namespace invarion
