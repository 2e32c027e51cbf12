#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "invarion/system.hpp"

namespace invarion {

/// Integer lattice behind a region's grid. Lattice point `idx` has pre-image
/// coordinates p = lower + spacing ⊙ idx and state coordinates y = M p, where
/// M is the optional linear map (identity when absent). Periodic axes wrap
/// modulo `counts` and have period 1.
struct GridFrame {
  std::vector<double> lower;
  std::vector<double> spacing;
  std::vector<std::int64_t> counts;
  std::vector<bool> periodic;
  std::optional<Eigen::MatrixXd> map;
  std::optional<Eigen::MatrixXd> map_inverse;

  std::size_t dim() const { return lower.size(); }
  /// Number of lattice points in the index box.
  std::uint64_t cell_count() const;

  State point(std::span<const std::int64_t> idx) const;
  /// Nearest lattice index of `y`; false when it falls outside the index box
  /// on a non-periodic axis.
  bool snap(std::span<const double> y, std::span<std::int64_t> idx) const;

  /// Row-major linear index over the index box, axis 0 most significant.
  std::uint64_t linear_index(std::span<const std::int64_t> idx) const;
  void unlinear_index(std::uint64_t linear, std::span<std::int64_t> idx) const;

  /// Frame of the axes [first, first + count). Requires the map, if any, to be
  /// block diagonal with respect to that range.
  GridFrame sub(std::size_t first, std::size_t count) const;
};

/// Compact target set Q with a grid discretization and an interior margin ε.
class GridRegion {
 public:
  struct Box {
    std::vector<double> lower, upper;
  };
  /// The whole circle R/Z (one axis); every state is interior.
  struct Circle {};
  /// {(x¹, x²) on the torus : d(x¹, x²) ≤ δ}.
  struct CircleBand {
    double delta = 0.1;
  };
  /// Built-in predicate: closed Euclidean ball.
  struct Ball {
    std::vector<double> center;
    double radius = 1.0;
  };
  /// Built-in predicate: image M(box) of a box under an invertible linear
  /// map. Interior and margin are measured in box (pre-image) coordinates.
  struct LinearImage {
    Eigen::MatrixXd map;
    std::vector<double> lower, upper;
  };
  using Shape = std::variant<Box, Circle, CircleBand, Ball, LinearImage>;

  /// `margin` defaults to one grid cell (the largest lattice spacing).
  static GridRegion box(std::vector<double> lower, std::vector<double> upper,
                        std::size_t resolution, std::optional<double> margin = {});
  static GridRegion circle(std::size_t resolution, std::optional<double> margin = {});
  static GridRegion circle_band(double delta, std::size_t resolution,
                                std::optional<double> margin = {});
  static GridRegion ball(std::vector<double> center, double radius,
                         std::size_t resolution, std::optional<double> margin = {});
  static GridRegion linear_image(Eigen::MatrixXd map, std::vector<double> lower,
                                 std::vector<double> upper, std::size_t resolution,
                                 std::optional<double> margin = {});

  std::size_t dim() const { return frame_.dim(); }
  const Shape& shape() const { return shape_; }
  std::string shape_name() const;
  bool is_predicate() const;
  std::size_t resolution() const { return resolution_; }
  double margin() const { return margin_; }
  double cell_size() const;
  const GridFrame& frame() const { return frame_; }
  GridRegion with_margin(double margin) const;

  /// Closed membership.
  bool contains(std::span<const double> state) const;
  /// Membership in Q shrunk by the region's margin.
  bool in_interior(std::span<const double> state) const {
    return in_interior(state, margin_);
  }
  bool in_interior(std::span<const double> state, double margin) const;

  /// Closed membership of a lattice point given by its pre-image coordinates.
  bool contains_preimage(std::span<const double> p) const;

 private:
  GridRegion(Shape shape, std::size_t resolution, GridFrame frame, double margin);

  Shape shape_;
  std::size_t resolution_;
  GridFrame frame_;
  double margin_;
};

/// Grid states inside a region, in lexicographic lattice order.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t dim, std::vector<double> coords, std::vector<std::int64_t> indices);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const std::int64_t> index(std::size_t i) const {
    return {indices_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::int64_t> indices_;
};

/// Maps states to the nearest grid element.
class GridLookup {
 public:
  GridLookup(const GridRegion& region, const Grid& grid);
  /// Element id of the lattice point nearest `state`, if that point is in the
  /// grid.
  std::optional<std::size_t> nearest(std::span<const double> state) const;

 private:
  GridFrame frame_;
  std::unordered_map<std::uint64_t, std::size_t> ids_;
};

/// All grid points of Q (closed membership). Throws ConfigError when the grid
/// is empty.
Grid discretize(const GridRegion& region);

inline bool in_interior(const GridRegion& region, std::span<const double> state) {
  return region.in_interior(state);
}

/// Region over the axes [first, first + count). Boxes project exactly; a
/// circle band projects onto the whole circle; a linear image with a block
/// diagonal map projects exactly; other predicates project to the bounding
/// box of the projected grid points (an over-approximation of the projection).
GridRegion project(const GridRegion& region, std::size_t first, std::size_t count);

/// Torus distance on R/Z.
double circle_distance(double a, double b);

}  // namespace invarion
