#include "invarion/kernels.hpp"

#include <algorithm>
#include <map>

#include <omp.h>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

// Lattice frame over every axis outside [first, first + count).
GridFrame complement_frame(const GridFrame& frame, std::size_t first, std::size_t count,
                           std::vector<std::size_t>& axes) {
  if (frame.map) (void)frame.sub(first, count);  // throws unless block diagonal
  axes.clear();
  GridFrame f;
  for (std::size_t a = 0; a < frame.dim(); ++a) {
    if (a >= first && a < first + count) continue;
    axes.push_back(a);
    f.lower.push_back(frame.lower[a]);
    f.spacing.push_back(frame.spacing[a]);
    f.counts.push_back(frame.counts[a]);
    f.periodic.push_back(frame.periodic[a]);
  }
  if (frame.map && !axes.empty()) {
    const auto n = static_cast<Eigen::Index>(axes.size());
    Eigen::MatrixXd m(n, n), mi(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        const auto ar = static_cast<Eigen::Index>(axes[static_cast<std::size_t>(r)]);
        const auto ac = static_cast<Eigen::Index>(axes[static_cast<std::size_t>(c)]);
        m(r, c) = (*frame.map)(ar, ac);
        mi(r, c) = (*frame.map_inverse)(ar, ac);
      }
    }
    f.map = m;
    f.map_inverse = mi;
  }
  return f;
}

bool stays(const SystemDef& system, const GridRegion& region, std::span<const double> x0,
           std::span<const ControlIndex> word, std::vector<double>& a, std::vector<double>& b) {
  std::copy(x0.begin(), x0.end(), a.begin());
  for (auto u : word) {
    system.step_into(a, u, b);
    if (!region.in_interior(b)) return false;
    a.swap(b);
  }
  return true;
}

void stay_into(const SystemDef& system, const GridRegion& region, const Grid& grid,
               std::span<const ControlIndex> word, Bitset& out) {
  std::vector<double> a(grid.dim()), b(grid.dim());
  for (std::size_t e = 0; e < grid.size(); ++e) {
    if (stays(system, region, grid.point(e), word, a, b)) out.set(e);
  }
}

// Evaluates `eval(j, bitset)` for candidates in chunks; with early exit the
// chunk size doubles until a full bitset appears. The lowest full index is
// the same for any thread count.
template <typename Eval>
CoverageRun run_pool(std::size_t candidates, std::size_t elements, bool parallel,
                     const KernelOptions& options, Eval eval) {
  CoverageRun run;
  run.coverage.assign(candidates, Bitset(elements));
  std::size_t begin = 0;
  std::size_t chunk = options.stop_at_full ? 1 : candidates;
  while (begin < candidates) {
    const std::size_t end = std::min(candidates, begin + chunk);
    const auto lo = static_cast<std::int64_t>(begin);
    const auto hi = static_cast<std::int64_t>(end);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::int64_t j = lo; j < hi; ++j) {
      eval(static_cast<std::size_t>(j), run.coverage[static_cast<std::size_t>(j)]);
    }
    for (std::size_t j = begin; j < end; ++j) {
      if (run.coverage[j].all()) {
        run.full = j;
        break;
      }
    }
    begin = end;
    if (options.stop_at_full && run.full) {
      run.coverage.resize(end);
      break;
    }
    chunk = std::min<std::size_t>(chunk * 2, 4096);
  }
  return run;
}

const SystemDef& checked_component(const SystemDef& system, const GridRegion& region,
                                   std::size_t component) {
  if (system.state_dim() != region.dim()) {
    throw InputError("system and region dimensions differ");
  }
  if (system.component_count() < 2) {
    throw InputError("subsystem feasibility needs a product of at least two systems");
  }
  if (component >= system.component_count()) throw InputError("subsystem index out of range");
  return system.component(component);
}

}  // namespace

Bitset stay_set(const SystemDef& system, const GridRegion& region, const Grid& grid,
                std::span<const ControlIndex> word) {
  if (system.state_dim() != region.dim()) {
    throw InputError("system and region dimensions differ");
  }
  Bitset out(grid.size());
  stay_into(system, region, grid, word, out);
  return out;
}

CoverageRun stay_coverage(const SystemDef& system, const GridRegion& region, const Grid& grid,
                          const WordPool& pool, const KernelOptions& options) {
  if (system.state_dim() != region.dim()) {
    throw InputError("system and region dimensions differ");
  }
  return run_pool(pool.size(), grid.size(), true, options, [&](std::size_t j, Bitset& out) {
    stay_into(system, region, grid, pool.word(j), out);
  });
}

std::vector<Bitset> pair_coverage(const SystemDef& system, const GridRegion& region,
                                  const Grid& grid, const WordPool& first,
                                  const WordPool& second) {
  if (system.component_count() != 2) throw InputError("pair coverage needs two components");
  if (first.horizon() != second.horizon()) throw InputError("pool horizons differ");
  const std::size_t nb = second.size();
  const std::size_t tau = first.horizon();
  std::vector<Bitset> out(first.size() * nb, Bitset(grid.size()));
  const auto total = static_cast<std::int64_t>(out.size());
#pragma omp parallel
  {
    std::vector<ControlIndex> joint(tau);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t p = 0; p < total; ++p) {
      const auto a = static_cast<std::size_t>(p) / nb;
      const auto b = static_cast<std::size_t>(p) % nb;
      for (std::size_t k = 0; k < tau; ++k) {
        const ControlIndex parts[2] = {first.word(a)[k], second.word(b)[k]};
        joint[k] = system.joint_control(parts);
      }
      stay_into(system, region, grid, joint, out[static_cast<std::size_t>(p)]);
    }
  }
  return out;
}

SubsystemModel::SubsystemModel(const SystemDef& system, const GridRegion& region,
                               const Grid& grid, std::size_t component)
    : region_(&region), component_(component),
      component_system_(checked_component(system, region, component)) {
  const std::size_t n = system.component_count();
  offset_ = system.component_offset(component);
  dim_i_ = component_system_.state_dim();
  dim_ = system.state_dim();

  std::vector<SystemDef> others;
  for (std::size_t c = 0; c < n; ++c) {
    if (c != component) others.push_back(system.component(c));
  }
  const SystemDef other = others.size() == 1 ? others.front() : SystemDef::product(others);
  other_controls_ = other.alphabet_size();
  if (other_controls_ > (std::uint64_t{1} << 24)) {
    throw InputError("other components' joint alphabet too large for the subsystem abstraction");
  }

  const GridFrame& frame = region.frame();
  const GridFrame of = complement_frame(frame, offset_, dim_i_, other_axes_);
  const std::size_t dim_o = other_axes_.size();
  const std::uint64_t cells = of.cell_count();
  if (cells > (std::uint64_t{1} << 24)) {
    throw InputError("other components' lattice too large for the subsystem abstraction");
  }
  other_cells_ = static_cast<std::size_t>(cells);

  cell_points_.resize(other_cells_ * dim_o);
  std::vector<std::int64_t> idx(dim_o);
  for (std::size_t c = 0; c < other_cells_; ++c) {
    of.unlinear_index(c, idx);
    const State p = of.point(idx);
    std::copy(p.begin(), p.end(), cell_points_.begin() + static_cast<std::ptrdiff_t>(c * dim_o));
  }

  next_.assign(other_cells_ * other_controls_, -1);
  const auto total = static_cast<std::int64_t>(other_cells_);
#pragma omp parallel
  {
    std::vector<double> y(dim_o);
    std::vector<std::int64_t> sidx(dim_o);
#pragma omp for schedule(static)
    for (std::int64_t c = 0; c < total; ++c) {
      const std::span<const double> x(cell_points_.data() + c * static_cast<std::int64_t>(dim_o),
                                      dim_o);
      for (std::uint64_t u = 0; u < other_controls_; ++u) {
        other.step_into(x, static_cast<ControlIndex>(u), y);
        if (of.snap(y, sidx)) {
          next_[static_cast<std::size_t>(c) * other_controls_ + u] =
              static_cast<std::int32_t>(of.linear_index(sidx));
        }
      }
    }
  }

  // Group elements by their component-i lattice coordinates.
  const GridFrame fi = frame.sub(offset_, dim_i_);
  std::map<std::uint64_t, std::size_t> group_of;
  element_cell_.resize(grid.size());
  element_group_.resize(grid.size());
  std::vector<std::int64_t> iidx(dim_i_), oidx(dim_o);
  for (std::size_t e = 0; e < grid.size(); ++e) {
    const auto gi = grid.index(e);
    for (std::size_t a = 0; a < dim_i_; ++a) iidx[a] = gi[offset_ + a];
    for (std::size_t a = 0; a < dim_o; ++a) oidx[a] = gi[other_axes_[a]];
    const auto key = fi.linear_index(iidx);
    auto [it, inserted] = group_of.emplace(key, group_elements_.size());
    if (inserted) {
      group_elements_.emplace_back();
      const auto p = grid.point(e);
      group_states_.insert(group_states_.end(), p.begin() + static_cast<std::ptrdiff_t>(offset_),
                           p.begin() + static_cast<std::ptrdiff_t>(offset_ + dim_i_));
    }
    group_elements_[it->second].push_back(e);
    element_group_[e] = it->second;
    element_cell_[e] = static_cast<std::size_t>(of.linear_index(oidx));
  }
}

void SubsystemModel::trajectory_of_group(std::size_t group, std::span<const ControlIndex> word,
                                         std::vector<double>& out) const {
  const std::size_t tau = word.size();
  out.resize((tau + 1) * dim_i_);
  std::copy(group_states_.begin() + static_cast<std::ptrdiff_t>(group * dim_i_),
            group_states_.begin() + static_cast<std::ptrdiff_t>((group + 1) * dim_i_),
            out.begin());
  for (std::size_t k = 0; k < tau; ++k) {
    component_system_.step_into(std::span<const double>(out.data() + k * dim_i_, dim_i_), word[k],
                                std::span<double>(out.data() + (k + 1) * dim_i_, dim_i_));
  }
}

bool SubsystemModel::slice_contains(std::span<const double> xi, std::size_t cell,
                                    std::vector<double>& scratch) const {
  scratch.resize(dim_);
  for (std::size_t a = 0; a < dim_i_; ++a) scratch[offset_ + a] = xi[a];
  const std::size_t dim_o = other_axes_.size();
  for (std::size_t a = 0; a < dim_o; ++a) {
    scratch[other_axes_[a]] = cell_points_[cell * dim_o + a];
  }
  return region_->in_interior(scratch);
}

Bitset SubsystemModel::feasible(std::span<const ControlIndex> word) const {
  if (word.empty()) throw InputError("empty word");
  const std::size_t tau = word.size();
  Bitset out(element_count());
  std::vector<double> traj, scratch;
  std::vector<char> good(other_cells_), prev(other_cells_);
  for (std::size_t g = 0; g < group_elements_.size(); ++g) {
    trajectory_of_group(g, word, traj);
    // good = G_k: cells from which the remaining steps k+1..τ can be survived
    // while sitting in the interior slice at step k.
    bool any = false;
    for (std::size_t k = tau; k >= 1; --k) {
      const std::span<const double> xi(traj.data() + k * dim_i_, dim_i_);
      any = false;
      for (std::size_t c = 0; c < other_cells_; ++c) {
        bool ok = true;
        if (k < tau) {
          ok = false;
          const std::int32_t* row = next_.data() + c * other_controls_;
          for (std::uint64_t u = 0; u < other_controls_ && !ok; ++u) {
            ok = row[u] >= 0 && prev[static_cast<std::size_t>(row[u])];
          }
        }
        good[c] = ok && slice_contains(xi, c, scratch);
        any = any || good[c];
      }
      good.swap(prev);
      if (!any) break;
    }
    if (!any) continue;
    for (auto e : group_elements_[g]) {
      const std::int32_t* row = next_.data() + element_cell_[e] * other_controls_;
      for (std::uint64_t u = 0; u < other_controls_; ++u) {
        if (row[u] >= 0 && prev[static_cast<std::size_t>(row[u])]) {
          out.set(e);
          break;
        }
      }
    }
  }
  return out;
}

bool SubsystemModel::feasible_element(std::size_t element,
                                      std::span<const ControlIndex> word) const {
  if (word.empty()) throw InputError("empty word");
  if (element >= element_count()) throw InputError("element index out of range");
  std::vector<double> traj, scratch;
  trajectory_of_group(element_group_[element], word, traj);
  Bitset reach(other_cells_), next(other_cells_);
  reach.set(element_cell_[element]);
  for (std::size_t k = 1; k <= word.size(); ++k) {
    next.clear();
    for (std::size_t c = reach.find_first(); c < other_cells_; c = reach.find_next(c + 1)) {
      for (std::uint64_t u = 0; u < other_controls_; ++u) {
        const std::int32_t t = next_[c * other_controls_ + u];
        if (t >= 0) next.set(static_cast<std::size_t>(t));
      }
    }
    const std::span<const double> xi(traj.data() + k * dim_i_, dim_i_);
    for (std::size_t c = next.find_first(); c < other_cells_; c = next.find_next(c + 1)) {
      if (!slice_contains(xi, c, scratch)) next.reset(c);
    }
    if (next.none()) return false;
    std::swap(reach, next);
  }
  return true;
}

CoverageRun subsystem_coverage(const SubsystemModel& model, const WordPool& pool,
                               const KernelOptions& options) {
  return run_pool(pool.size(), model.element_count(), true, options,
                  [&](std::size_t j, Bitset& out) { out = model.feasible(pool.word(j)); });
}

namespace reference {

CoverageRun stay_coverage(const SystemDef& system, const GridRegion& region, const Grid& grid,
                          const WordPool& pool, const KernelOptions& options) {
  return run_pool(pool.size(), grid.size(), false, options, [&](std::size_t j, Bitset& out) {
    stay_into(system, region, grid, pool.word(j), out);
  });
}

std::vector<Bitset> pair_coverage(const SystemDef& system, const GridRegion& region,
                                  const Grid& grid, const WordPool& first,
                                  const WordPool& second) {
  if (system.component_count() != 2) throw InputError("pair coverage needs two components");
  if (first.horizon() != second.horizon()) throw InputError("pool horizons differ");
  std::vector<Bitset> out;
  out.reserve(first.size() * second.size());
  for (std::size_t a = 0; a < first.size(); ++a) {
    for (std::size_t b = 0; b < second.size(); ++b) {
      const ControlWord parts[2] = {first.control_word(a), second.control_word(b)};
      const ControlWord joint = system.joint_word(parts);
      Bitset s(grid.size());
      stay_into(system, region, grid, joint.entries, s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

CoverageRun subsystem_coverage(const SubsystemModel& model, const WordPool& pool,
                               const KernelOptions& options) {
  return run_pool(pool.size(), model.element_count(), false, options,
                  [&](std::size_t j, Bitset& out) {
                    for (std::size_t e = 0; e < model.element_count(); ++e) {
                      if (model.feasible_element(e, pool.word(j))) out.set(e);
                    }
                  });
}

}  // namespace reference

}  // namespace invarion
