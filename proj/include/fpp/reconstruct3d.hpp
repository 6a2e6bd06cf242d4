// Absolute phase to projector correspondence, epipolar completion and
// linear triangulation.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fpp/formats.hpp"

namespace fpp {

using Matrix34 = Eigen::Matrix<double, 3, 4>;

struct SystemCalibration {
  Matrix34 camera = Matrix34::Zero();
  Matrix34 projector = Matrix34::Zero();
  Eigen::Matrix3d fundamental = Eigen::Matrix3d::Zero();  // projector^T F camera = 0
  FringeDirection direction = FringeDirection::Vertical;
  double period = 1.0;  // projector pixels per fringe
  int order_offset = 0;

  /// Rank checks: both projections rank 3, F rank 2.
  void validate() const;
};

class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProjectorPoint {
  double x = 0.0;
  double y = 0.0;
};

struct CloudPoint {
  Eigen::Vector3d position;
  Pixel source;
};

using PointCloud = std::vector<CloudPoint>;

/// (Phi / 2 pi + offset) * period.
double phase_to_projector_coord(double phase, double period, int offset);

/// Intersects the epipolar line F (x_c, y_c, 1)^T with the projector line
/// fixed by the phase. Throws DegenerateGeometry if the two are parallel.
ProjectorPoint epipolar_complete(double projector_coord, double camera_x, double camera_y,
                                 const Eigen::Matrix3d& fundamental, FringeDirection direction);

/// Direct linear transform: smallest right singular vector of the stacked
/// 4x4 system. Throws DegenerateGeometry for points at infinity.
Eigen::Vector3d triangulate(double camera_x, double camera_y, double projector_x, double projector_y,
                            const Matrix34& camera, const Matrix34& projector);

struct Reconstruction {
  PointCloud cloud;
  FloatMap depth;  // Z per pixel, invalid (0) where no point was produced
};

/// Per valid pixel (x = column, y = row): projector coordinate, epipolar
/// completion, triangulation. Degenerate pixels are dropped.
Reconstruction reconstruct(const FloatMap& phase, const SystemCalibration& calib);

/// F with x_p^T F x_c = 0 for the two projection matrices.
Eigen::Matrix3d fundamental_from_projections(const Matrix34& camera, const Matrix34& projector);

/// Projects a 3D point through P and dehomogenizes.
Eigen::Vector2d project(const Matrix34& p, const Eigen::Vector3d& point);

/// ASCII PLY, float vertex properties x y z printed with 6 decimals.
std::string export_ply(const PointCloud& cloud);

/// Whitespace-separated text: 12 camera values (row-major), 12 projector
/// values, 9 fundamental values, then direction, period and order offset.
/// '#' starts a comment.
SystemCalibration parse_calibration(const std::string& text);
std::string format_calibration(const SystemCalibration& calib);
SystemCalibration load_calibration(const std::filesystem::path& path);

}  // namespace fpp
