#include "invarion/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

std::int64_t wrap(std::int64_t i, std::int64_t n) {
  const std::int64_t r = i % n;
  return r < 0 ? r + n : r;
}

GridFrame axis_frame(const std::vector<double>& lower, const std::vector<double>& upper,
                     std::size_t resolution) {
  GridFrame f;
  f.lower = lower;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    f.spacing.push_back((upper[i] - lower[i]) / static_cast<double>(resolution - 1));
    f.counts.push_back(static_cast<std::int64_t>(resolution));
    f.periodic.push_back(false);
  }
  return f;
}

GridFrame periodic_frame(std::size_t dims, std::size_t resolution) {
  GridFrame f;
  for (std::size_t i = 0; i < dims; ++i) {
    f.lower.push_back(0.0);
    f.spacing.push_back(1.0 / static_cast<double>(resolution));
    f.counts.push_back(static_cast<std::int64_t>(resolution));
    f.periodic.push_back(true);
  }
  return f;
}

void check_resolution(std::size_t resolution) {
  if (resolution < 2) throw ConfigError("resolution", "must be at least 2 points per axis");
}

void check_bounds(const std::vector<double>& lower, const std::vector<double>& upper) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw ConfigError("region", "box bounds must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw ConfigError("region", "box requires lower < upper on every axis");
    }
  }
}

bool box_contains(const std::vector<double>& lower, const std::vector<double>& upper,
                  std::span<const double> p) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  }
  return true;
}

bool box_interior(const std::vector<double>& lower, const std::vector<double>& upper,
                  std::span<const double> p, double margin) {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(p[i] - lower[i] > margin && upper[i] - p[i] > margin)) return false;
  }
  return true;
}

bool is_block_diagonal(const Eigen::MatrixXd& m, std::size_t first, std::size_t count) {
  const auto lo = static_cast<Eigen::Index>(first);
  const auto hi = static_cast<Eigen::Index>(first + count);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const bool in_i = i >= lo && i < hi;
      const bool in_j = j >= lo && j < hi;
      if (in_i != in_j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

double circle_distance(double a, double b) {
  double t = std::fabs(a - b);
  t -= std::floor(t);
  return std::min(t, 1.0 - t);
}

std::uint64_t GridFrame::cell_count() const {
  std::uint64_t n = 1;
  for (auto c : counts) n *= static_cast<std::uint64_t>(c);
  return n;
}

State GridFrame::point(std::span<const std::int64_t> idx) const {
  State p(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    p[a] = lower[a] + spacing[a] * static_cast<double>(idx[a]);
  }
  if (!map) return p;
  State y(dim(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) {
      y[i] += (*map)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * p[j];
    }
  }
  return y;
}

bool GridFrame::snap(std::span<const double> y, std::span<std::int64_t> idx) const {
  for (std::size_t a = 0; a < dim(); ++a) {
    double p = y[a];
    if (map_inverse) {
      p = 0.0;
      for (std::size_t j = 0; j < dim(); ++j) {
        p += (*map_inverse)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(j)) * y[j];
      }
    }
    const double t = (p - lower[a]) / spacing[a];
    if (!std::isfinite(t) || std::fabs(t) > 1e15) return false;
    std::int64_t i = std::llround(t);
    if (periodic[a]) {
      i = wrap(i, counts[a]);
    } else if (i < 0 || i >= counts[a]) {
      return false;
    }
    idx[a] = i;
  }
  return true;
}

std::uint64_t GridFrame::linear_index(std::span<const std::int64_t> idx) const {
  std::uint64_t linear = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    linear = linear * static_cast<std::uint64_t>(counts[a]) + static_cast<std::uint64_t>(idx[a]);
  }
  return linear;
}

void GridFrame::unlinear_index(std::uint64_t linear, std::span<std::int64_t> idx) const {
  for (std::size_t a = dim(); a-- > 0;) {
    const auto n = static_cast<std::uint64_t>(counts[a]);
    idx[a] = static_cast<std::int64_t>(linear % n);
    linear /= n;
  }
}

GridFrame GridFrame::sub(std::size_t first, std::size_t count) const {
  if (first + count > dim() || count == 0) throw InputError("sub-frame range out of bounds");
  GridFrame f;
  f.lower.assign(lower.begin() + static_cast<std::ptrdiff_t>(first),
                 lower.begin() + static_cast<std::ptrdiff_t>(first + count));
  f.spacing.assign(spacing.begin() + static_cast<std::ptrdiff_t>(first),
                   spacing.begin() + static_cast<std::ptrdiff_t>(first + count));
  f.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(first),
                  counts.begin() + static_cast<std::ptrdiff_t>(first + count));
  f.periodic.assign(periodic.begin() + static_cast<std::ptrdiff_t>(first),
                    periodic.begin() + static_cast<std::ptrdiff_t>(first + count));
  if (map) {
    if (!is_block_diagonal(*map, first, count)) {
      throw InputError("sub-frame requires a block-diagonal lattice map");
    }
    const auto f0 = static_cast<Eigen::Index>(first);
    const auto n = static_cast<Eigen::Index>(count);
    f.map = map->block(f0, f0, n, n);
    f.map_inverse = map_inverse->block(f0, f0, n, n);
  }
  return f;
}

GridRegion::GridRegion(Shape shape, std::size_t resolution, GridFrame frame, double margin)
    : shape_(std::move(shape)), resolution_(resolution), frame_(std::move(frame)),
      margin_(margin) {
  if (margin_ < 0.0 || !std::isfinite(margin_)) {
    throw ConfigError("region.margin", "must be a finite nonnegative number");
  }
}

double GridRegion::cell_size() const {
  return *std::max_element(frame_.spacing.begin(), frame_.spacing.end());
}

GridRegion GridRegion::box(std::vector<double> lower, std::vector<double> upper,
                           std::size_t resolution, std::optional<double> margin) {
  check_bounds(lower, upper);
  check_resolution(resolution);
  GridFrame f = axis_frame(lower, upper, resolution);
  const double m = margin.value_or(*std::max_element(f.spacing.begin(), f.spacing.end()));
  return GridRegion(Box{std::move(lower), std::move(upper)}, resolution, std::move(f), m);
}

GridRegion GridRegion::circle(std::size_t resolution, std::optional<double> margin) {
  check_resolution(resolution);
  GridFrame f = periodic_frame(1, resolution);
  const double m = margin.value_or(f.spacing[0]);
  return GridRegion(Circle{}, resolution, std::move(f), m);
}

GridRegion GridRegion::circle_band(double delta, std::size_t resolution,
                                   std::optional<double> margin) {
  if (!(delta > 0.0 && delta < 0.25)) {
    throw ConfigError("region.delta", "circle band requires 0 < delta < 0.25");
  }
  check_resolution(resolution);
  GridFrame f = periodic_frame(2, resolution);
  const double m = margin.value_or(f.spacing[0]);
  return GridRegion(CircleBand{delta}, resolution, std::move(f), m);
}

GridRegion GridRegion::ball(std::vector<double> center, double radius,
                            std::size_t resolution, std::optional<double> margin) {
  if (center.empty()) throw ConfigError("region.center", "must be nonempty");
  if (!(radius > 0.0)) throw ConfigError("region.radius", "must be positive");
  check_resolution(resolution);
  std::vector<double> lo, hi;
  for (double c : center) {
    lo.push_back(c - radius);
    hi.push_back(c + radius);
  }
  GridFrame f = axis_frame(lo, hi, resolution);
  const double m = margin.value_or(*std::max_element(f.spacing.begin(), f.spacing.end()));
  return GridRegion(Ball{std::move(center), radius}, resolution, std::move(f), m);
}

GridRegion GridRegion::linear_image(Eigen::MatrixXd map, std::vector<double> lower,
                                    std::vector<double> upper, std::size_t resolution,
                                    std::optional<double> margin) {
  check_bounds(lower, upper);
  check_resolution(resolution);
  const auto n = static_cast<Eigen::Index>(lower.size());
  if (map.rows() != n || map.cols() != n) {
    throw ConfigError("region.map", "must be a square matrix matching the box dimension");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(map);
  if (!lu.isInvertible()) throw ConfigError("region.map", "must be invertible");
  GridFrame f = axis_frame(lower, upper, resolution);
  f.map = map;
  f.map_inverse = lu.inverse();
  const double m = margin.value_or(*std::max_element(f.spacing.begin(), f.spacing.end()));
  return GridRegion(LinearImage{std::move(map), std::move(lower), std::move(upper)},
                    resolution, std::move(f), m);
}

std::string GridRegion::shape_name() const {
  switch (shape_.index()) {
    case 0: return "box";
    case 1: return "circle";
    case 2: return "circle_band";
    case 3: return "ball";
    default: return "linear_image";
  }
}

bool GridRegion::is_predicate() const {
  return std::holds_alternative<Ball>(shape_) || std::holds_alternative<LinearImage>(shape_);
}

GridRegion GridRegion::with_margin(double margin) const {
  return GridRegion(shape_, resolution_, frame_, margin);
}

bool GridRegion::contains_preimage(std::span<const double> p) const {
  if (const auto* li = std::get_if<LinearImage>(&shape_)) {
    return box_contains(li->lower, li->upper, p);
  }
  return contains(p);
}

bool GridRegion::contains(std::span<const double> x) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Box>) {
          return box_contains(s.lower, s.upper, x);
        } else if constexpr (std::is_same_v<S, Circle>) {
          return true;
        } else if constexpr (std::is_same_v<S, CircleBand>) {
          return circle_distance(x[0], x[1]) <= s.delta;
        } else if constexpr (std::is_same_v<S, Ball>) {
          double r2 = 0.0;
          for (std::size_t i = 0; i < s.center.size(); ++i) {
            r2 += (x[i] - s.center[i]) * (x[i] - s.center[i]);
          }
          return r2 <= s.radius * s.radius;
        } else {
          State p(x.size(), 0.0);
          for (std::size_t i = 0; i < x.size(); ++i) {
            for (std::size_t j = 0; j < x.size(); ++j) {
              p[i] += (*frame_.map_inverse)(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j)) * x[j];
            }
          }
          return box_contains(s.lower, s.upper, p);
        }
      },
      shape_);
}

bool GridRegion::in_interior(std::span<const double> x, double margin) const {
  switch (shape_.index()) {
    case 0: {
      const auto& s = std::get<Box>(shape_);
      return box_interior(s.lower, s.upper, x, margin);
    }
    case 1:
      return true;
    case 2:
      return circle_distance(x[0], x[1]) < std::get<CircleBand>(shape_).delta - margin;
    case 3: {
      const auto& s = std::get<Ball>(shape_);
      double r2 = 0.0;
      for (std::size_t i = 0; i < s.center.size(); ++i) {
        r2 += (x[i] - s.center[i]) * (x[i] - s.center[i]);
      }
      const double r = s.radius - margin;
      return r > 0.0 && r2 < r * r;
    }
    default: {
      const auto& s = std::get<LinearImage>(shape_);
      const std::size_t n = x.size();
      double p[16];
      std::vector<double> heap;
      double* pp = p;
      if (n > 16) {
        heap.resize(n);
        pp = heap.data();
      }
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          v += (*frame_.map_inverse)(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j)) * x[j];
        }
        pp[i] = v;
      }
      return box_interior(s.lower, s.upper, std::span<const double>(pp, n), margin);
    }
  }
}

Grid::Grid(std::size_t dim, std::vector<double> coords, std::vector<std::int64_t> indices)
    : dim_(dim), coords_(std::move(coords)), indices_(std::move(indices)) {}

Grid discretize(const GridRegion& region) {
  const GridFrame& f = region.frame();
  const std::size_t d = f.dim();
  std::vector<double> coords;
  std::vector<std::int64_t> indices;
  std::vector<std::int64_t> idx(d, 0);
  std::vector<double> p(d);
  const std::uint64_t total = f.cell_count();
  for (std::uint64_t linear = 0; linear < total; ++linear) {
    f.unlinear_index(linear, idx);
    for (std::size_t a = 0; a < d; ++a) {
      p[a] = f.lower[a] + f.spacing[a] * static_cast<double>(idx[a]);
    }
    if (!region.contains_preimage(p)) continue;
    if (f.map) {
      for (std::size_t i = 0; i < d; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          v += (*f.map)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * p[j];
        }
        coords.push_back(v);
      }
    } else {
      coords.insert(coords.end(), p.begin(), p.end());
    }
    indices.insert(indices.end(), idx.begin(), idx.end());
  }
  if (coords.empty()) {
    throw ConfigError("region.resolution", "grid is empty; resolution too coarse for this set");
  }
  return Grid(d, std::move(coords), std::move(indices));
}

GridLookup::GridLookup(const GridRegion& region, const Grid& grid) : frame_(region.frame()) {
  for (std::size_t e = 0; e < grid.size(); ++e) {
    ids_.emplace(frame_.linear_index(grid.index(e)), e);
  }
}

std::optional<std::size_t> GridLookup::nearest(std::span<const double> state) const {
  std::vector<std::int64_t> idx(frame_.dim());
  if (!frame_.snap(state, idx)) return std::nullopt;
  const auto it = ids_.find(frame_.linear_index(idx));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

GridRegion project(const GridRegion& region, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > region.dim()) {
    throw InputError("project: index range outside the region's dimensions");
  }
  const auto begin = static_cast<std::ptrdiff_t>(first);
  const auto end = static_cast<std::ptrdiff_t>(first + count);
  const double margin = region.margin();
  if (const auto* b = std::get_if<GridRegion::Box>(&region.shape())) {
    return GridRegion::box({b->lower.begin() + begin, b->lower.begin() + end},
                           {b->upper.begin() + begin, b->upper.begin() + end},
                           region.resolution(), margin);
  }
  if (std::holds_alternative<GridRegion::Circle>(region.shape())) return region;
  if (std::holds_alternative<GridRegion::CircleBand>(region.shape())) {
    if (count == 2) return region;
    return GridRegion::circle(region.resolution(), margin);
  }
  if (const auto* li = std::get_if<GridRegion::LinearImage>(&region.shape())) {
    if (is_block_diagonal(li->map, first, count)) {
      const auto n = static_cast<Eigen::Index>(count);
      return GridRegion::linear_image(li->map.block(begin, begin, n, n),
                                      {li->lower.begin() + begin, li->lower.begin() + end},
                                      {li->upper.begin() + begin, li->upper.begin() + end},
                                      region.resolution(), margin);
    }
  }
  // Bounding box of the projected grid points.
  const Grid grid = discretize(region);
  std::vector<double> lo(count, std::numeric_limits<double>::infinity());
  std::vector<double> hi(count, -std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < grid.size(); ++e) {
    const auto p = grid.point(e);
    for (std::size_t a = 0; a < count; ++a) {
      lo[a] = std::min(lo[a], p[first + a]);
      hi[a] = std::max(hi[a], p[first + a]);
    }
  }
  for (std::size_t a = 0; a < count; ++a) {
    if (!(lo[a] < hi[a])) {
      lo[a] -= region.cell_size();
      hi[a] += region.cell_size();
    }
  }
  return GridRegion::box(std::move(lo), std::move(hi), region.resolution(), margin);
}

}  // namespace invarion
