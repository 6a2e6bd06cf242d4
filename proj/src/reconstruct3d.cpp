#include "fpp/reconstruct3d.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fpp/phase_decode.hpp"

namespace fpp {

void SystemCalibration::validate() const {
  Eigen::JacobiSVD<Matrix34> svd_c(camera);
  Eigen::JacobiSVD<Matrix34> svd_p(projector);
  if (svd_c.rank() < 3) throw std::invalid_argument("calibration: camera matrix is not rank 3");
  if (svd_p.rank() < 3) throw std::invalid_argument("calibration: projector matrix is not rank 3");
  Eigen::JacobiSVD<Eigen::Matrix3d> svd_f(fundamental);
  const auto s = svd_f.singularValues();
  if (!(s(1) > 0.0) || s(2) > 1e-9 * s(0)) throw std::invalid_argument("calibration: fundamental matrix is not rank 2");
  if (!(period > 0.0)) throw std::invalid_argument("calibration: period must be positive");
}

double phase_to_projector_coord(double phase, double period, int offset) {
  return (phase / kTwoPi + offset) * period;
}

ProjectorPoint epipolar_complete(double projector_coord, double camera_x, double camera_y,
                                 const Eigen::Matrix3d& fundamental, FringeDirection direction) {
  const Eigen::Vector3d line = fundamental * Eigen::Vector3d(camera_x, camera_y, 1.0);
  if (direction == FringeDirection::Vertical) {
    if (std::abs(line(1)) < 1e-12) throw DegenerateGeometry("epipolar line parallel to the fringe axis");
    return {projector_coord, -(line(0) * projector_coord + line(2)) / line(1)};
  }
  if (std::abs(line(0)) < 1e-12) throw DegenerateGeometry("epipolar line parallel to the fringe axis");
  return {-(line(1) * projector_coord + line(2)) / line(0), projector_coord};
}

Eigen::Vector3d triangulate(double camera_x, double camera_y, double projector_x, double projector_y,
                            const Matrix34& camera, const Matrix34& projector) {
  Eigen::Matrix4d design;
  design.row(0) = camera_x * camera.row(2) - camera.row(0);
  design.row(1) = camera_y * camera.row(2) - camera.row(1);
  design.row(2) = projector_x * projector.row(2) - projector.row(0);
  design.row(3) = projector_y * projector.row(2) - projector.row(1);
  // Row scaling does not move the null vector but keeps the SVD well conditioned.
  for (int r = 0; r < 4; ++r) {
    const double n = design.row(r).norm();
    if (n > 0.0) design.row(r) /= n;
  }
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(design, Eigen::ComputeFullV);
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h(3)) < 1e-12) throw DegenerateGeometry("triangulated point at infinity");
  return h.head<3>() / h(3);
}

Eigen::Vector2d project(const Matrix34& p, const Eigen::Vector3d& point) {
  const Eigen::Vector3d h = p * point.homogeneous();
  return h.hnormalized();
}

Reconstruction reconstruct(const FloatMap& phase, const SystemCalibration& calib) {
  Reconstruction out{{}, FloatMap(phase.width(), phase.height())};
  for (int y = 0; y < phase.height(); ++y) {
    for (int x = 0; x < phase.width(); ++x) {
      const std::size_t i = phase.index(x, y);
      if (!phase.valid(i)) {
        out.depth.invalidate(i);
        continue;
      }
      try {
        const double u = phase_to_projector_coord(phase[i], calib.period, calib.order_offset);
        const auto pp = epipolar_complete(u, x, y, calib.fundamental, calib.direction);
        const Eigen::Vector3d point = triangulate(x, y, pp.x, pp.y, calib.camera, calib.projector);
        if (!point.allFinite()) throw DegenerateGeometry("non-finite point");
        out.cloud.push_back({point, {x, y}});
        out.depth[i] = point.z();
      } catch (const DegenerateGeometry&) {
        out.depth.invalidate(i);
      }
    }
  }
  return out;
}

Eigen::Matrix3d fundamental_from_projections(const Matrix34& camera, const Matrix34& projector) {
  // Camera centre: null vector of P_c.
  Eigen::JacobiSVD<Matrix34> svd(camera, Eigen::ComputeFullV);
  const Eigen::Vector4d centre = svd.matrixV().col(3);
  const Eigen::Vector3d epipole = projector * centre;
  Eigen::Matrix3d skew;
  skew << 0, -epipole(2), epipole(1), epipole(2), 0, -epipole(0), -epipole(1), epipole(0), 0;
  const Eigen::Matrix<double, 4, 3> pinv =
      camera.transpose() * (camera * camera.transpose()).inverse();
  return skew * projector * pinv;
}

std::string export_ply(const PointCloud& cloud) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  char line[128];
  for (const auto& p : cloud) {
    std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", static_cast<double>(static_cast<float>(p.position.x())),
                  static_cast<double>(static_cast<float>(p.position.y())),
                  static_cast<double>(static_cast<float>(p.position.z())));
    out << line;
  }
  return out.str();
}

SystemCalibration parse_calibration(const std::string& text) {
  std::istringstream lines(text);
  std::ostringstream stripped;
  for (std::string line; std::getline(lines, line);) {
    stripped << line.substr(0, line.find('#')) << '\n';
  }
  std::istringstream in(stripped.str());
  SystemCalibration calib;
  auto read_number = [&](const char* what) {
    double v;
    if (!(in >> v)) throw std::invalid_argument(std::string("calibration: expected ") + what);
    return v;
  };
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) calib.camera(r, c) = read_number("camera matrix entry");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) calib.projector(r, c) = read_number("projector matrix entry");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) calib.fundamental(r, c) = read_number("fundamental matrix entry");
  std::string direction;
  if (!(in >> direction)) throw std::invalid_argument("calibration: expected fringe direction");
  if (direction == "vertical") {
    calib.direction = FringeDirection::Vertical;
  } else if (direction == "horizontal") {
    calib.direction = FringeDirection::Horizontal;
  } else {
    throw std::invalid_argument("calibration: direction must be vertical or horizontal");
  }
  calib.period = read_number("fringe period");
  double offset = read_number("order offset");
  if (offset != std::floor(offset)) throw std::invalid_argument("calibration: order offset must be an integer");
  calib.order_offset = static_cast<int>(offset);
  std::string extra;
  if (in >> extra) throw std::invalid_argument("calibration: trailing content");
  calib.validate();
  return calib;
}

std::string format_calibration(const SystemCalibration& calib) {
  std::ostringstream out;
  out.precision(17);
  out << "# camera matrix (3x4)\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) out << calib.camera(r, c) << (c < 3 ? ' ' : '\n');
  }
  out << "# projector matrix (3x4)\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) out << calib.projector(r, c) << (c < 3 ? ' ' : '\n');
  }
  out << "# fundamental matrix (3x3)\n";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out << calib.fundamental(r, c) << (c < 2 ? ' ' : '\n');
  }
  out << "# direction period offset\n"
      << (calib.direction == FringeDirection::Vertical ? "vertical" : "horizontal") << ' ' << calib.period << ' '
      << calib.order_offset << '\n';
  return out.str();
}

SystemCalibration load_calibration(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  return parse_calibration(std::string(bytes.begin(), bytes.end()));
}

}  // namespace fpp
