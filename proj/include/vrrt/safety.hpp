#pragma once

#include <optional>
#include <span>

#include "vrrt/barrier.hpp"
#include "vrrt/world.hpp"

namespace vrrt {

/// Cone half-opening is fov/2 about the heading, radius is `range`.
struct SensorSpec {
  double fov = M_PI / 4.0;  // full cone angle, rad
  double range = 3.0;       // m
};

SensorSpec sensor_from_config(const Config& cfg);

/// One sensing footprint: the closed circular sector swept from a pose.
struct Footprint {
  Eigen::Vector2d position{0.0, 0.0};
  double heading = 0.0;
  SensorSpec spec;
};

/// Bearing of p as seen from (position, heading), wrapped to (-pi, pi].
/// Zero when p coincides with the origin.
double relative_bearing(const Eigen::Vector2d& position, double heading,
                        const Eigen::Vector2d& p);

bool point_visible(const Footprint& fp, const Eigen::Vector2d& p);

/// Euclidean distance from p to the sector (0 when inside).
double sector_distance(const Footprint& fp, const Eigen::Vector2d& p);

/// Closest point of (disk intersect sector) to the sensor origin, or
/// nullopt when they do not intersect. This is the detection point of a
/// hidden obstacle.
std::optional<Eigen::Vector2d> sector_disk_closest(const Footprint& fp, const Obstacle& disk);

struct CriticalPoint {
  Eigen::Vector2d point{0.0, 0.0};
  int index = 0;
  bool fully_visible = false;
};

/// First trajectory sample that leaves the footprint; the final sample
/// (flagged fully_visible) when none does.
CriticalPoint critical_point(std::span<const State> traj, const Footprint& fp);

/// Chain gains for the collision HOCBF, config-exposed.
struct BarrierGains {
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

/// h_col(s) = (s.x - cx)^2 + (s.y - cy)^2 - rho^2 with
/// rho = obstacle radius + inflation; relative degree 2 under the unicycle.
BarrierSpec collision_barrier(const Obstacle& obs, double inflation, const BarrierGains& gains);

/// Planning-time barrier: inflation = l_robot + eps.
BarrierSpec collision_barrier(const Obstacle& obs, const WorldModel& world,
                              const BarrierGains& gains);

/// Allocation-free closed form of the collision chain, for the steering
/// hot path. Matches eval_psi_series on the equivalent BarrierSpec to
/// machine precision (asserted in tests).
struct CollisionChain {
  Eigen::Vector2d center{0.0, 0.0};
  double rho = 0.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;

  struct Eval {
    double psi0, psi1;     // set-membership levels
    double c0, ca, comega;  // psi_2(u) = c0 + ca * a + comega * omega
  };
  Eval eval(const State& s) const;
};

CollisionChain collision_chain(const Obstacle& obs, double inflation,
                               const BarrierGains& gains);

struct VisibilityParams {
  SensorSpec sensor;
  double brake_decel = 1.0;  // m/s^2 available for stopping
  double margin = 0.1;       // m
};

/// h_vis at traj[index] given the remaining trajectory. min of
///   h_range = range - v^2/(2 a) - margin, and
///   h_fov   = fov/2 - max bearing over the samples within braking
///             distance (clamped to the trajectory end).
/// Nonnegative h_vis means everything the robot would traverse before it
/// can stop is inside the current footprint, so a worst-case obstacle at
/// the boundary of the sensed set is seen early enough to stop.
double visibility_constraint(std::span<const State> traj, std::span<const double> arc,
                             int index, const VisibilityParams& vp);

/// Convenience overload that computes cumulative arc lengths itself.
double visibility_constraint(std::span<const State> traj, int index,
                             const VisibilityParams& vp);

/// Cumulative chord-length along a sample sequence (arc[0] = 0).
std::vector<double> cumulative_arc(std::span<const State> traj);

/// Accumulated sensed region B_t: append-only footprint list. A point is a
/// member iff some stored footprint sees it, so membership only grows.
/// Past 1000 footprints a uniform grid shortlists candidates; answers stay
/// bit-equal to the linear scan.
class LocalFreeSet {
 public:
  void append(const Footprint& fp);
  bool contains(const Eigen::Vector2d& p) const;
  size_t size() const { return footprints_.size(); }
  const std::vector<Footprint>& footprints() const { return footprints_; }

 private:
  static constexpr size_t kGridThreshold = 1000;

  void build_grid() const;
  void insert_into_grid(int index) const;

  std::vector<Footprint> footprints_;

  mutable bool grid_built_ = false;
  mutable double cell_ = 1.0;
  mutable double gx0_ = 0.0, gy0_ = 0.0;
  mutable int nx_ = 0, ny_ = 0;
  mutable std::vector<std::vector<int>> cells_;
};

}  // namespace vrrt
