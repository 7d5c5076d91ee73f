#include "vrrt/safety.hpp"

#include <algorithm>
#include <cmath>

namespace vrrt {

namespace {
constexpr double kTinyDist = 1e-12;

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < kTinyDist) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}
}  // namespace

SensorSpec sensor_from_config(const Config& cfg) {
  SensorSpec s;
  s.fov = cfg.number_or("fov_deg", 45.0) * M_PI / 180.0;
  s.range = cfg.number_or("range", 3.0);
  if (s.fov <= 0.0 || s.fov > 2.0 * M_PI + 1e-12)
    throw ConfigError("fov_deg must be in (0, 360]");
  if (s.range <= 0.0) throw ConfigError("range must be > 0");
  return s;
}

double relative_bearing(const Eigen::Vector2d& position, double heading,
                        const Eigen::Vector2d& p) {
  const Eigen::Vector2d rel = p - position;
  if (rel.squaredNorm() < kTinyDist) return 0.0;
  return wrap_angle(std::atan2(rel.y(), rel.x()) - heading);
}

bool point_visible(const Footprint& fp, const Eigen::Vector2d& p) {
  // 1e-9 slack keeps points constructed exactly on the sector boundary
  // (e.g. detection points) inside despite rounding.
  constexpr double kGeomTol = 1e-9;
  const Eigen::Vector2d rel = p - fp.position;
  if (rel.squaredNorm() < kTinyDist) return true;
  if (rel.norm() > fp.spec.range + kGeomTol) return false;
  return std::abs(relative_bearing(fp.position, fp.heading, p)) <=
         fp.spec.fov / 2.0 + kGeomTol;
}

double sector_distance(const Footprint& fp, const Eigen::Vector2d& p) {
  const Eigen::Vector2d rel = p - fp.position;
  const double rho = rel.norm();
  if (rho < kTinyDist) return 0.0;
  const double bear = relative_bearing(fp.position, fp.heading, p);
  if (std::abs(bear) <= fp.spec.fov / 2.0) return std::max(0.0, rho - fp.spec.range);
  // Angularly outside: nearest sector point lies on one of the edge rays.
  double best = std::numeric_limits<double>::infinity();
  for (double sign : {-1.0, 1.0}) {
    const double ang = fp.heading + sign * fp.spec.fov / 2.0;
    const Eigen::Vector2d tip =
        fp.position + fp.spec.range * Eigen::Vector2d{std::cos(ang), std::sin(ang)};
    best = std::min(best, point_segment_distance(p, fp.position, tip));
  }
  return best;
}

std::optional<Eigen::Vector2d> sector_disk_closest(const Footprint& fp, const Obstacle& disk) {
  if (sector_distance(fp, disk.center) > disk.radius) return std::nullopt;

  const Eigen::Vector2d rel = disk.center - fp.position;
  const double d = rel.norm();
  if (d <= disk.radius) return fp.position;  // sensor origin inside the disk

  double best_norm = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best{0.0, 0.0};
  auto consider = [&](const Eigen::Vector2d& q) {
    const double n = (q - fp.position).norm();
    if (n < best_norm) {
      best_norm = n;
      best = q;
    }
  };

  // Near rim point along the ray to the disk center.
  const Eigen::Vector2d rim = fp.position + rel * (1.0 - disk.radius / d);
  if (point_visible(fp, rim)) consider(rim);

  // Entry points of the two edge rays into the disk.
  for (double sign : {-1.0, 1.0}) {
    const double ang = fp.heading + sign * fp.spec.fov / 2.0;
    const Eigen::Vector2d e{std::cos(ang), std::sin(ang)};
    const double along = e.dot(rel);
    const double perp2 = rel.squaredNorm() - along * along;
    const double disc = disk.radius * disk.radius - perp2;
    if (disc < 0.0) continue;
    const double t_lo = std::max(0.0, along - std::sqrt(disc));
    const double t_hi = std::min(fp.spec.range, along + std::sqrt(disc));
    if (t_lo <= t_hi) consider(fp.position + t_lo * e);
  }

  // Arc point nearest the disk center.
  const double half = fp.spec.fov / 2.0;
  const double bear = relative_bearing(fp.position, fp.heading, disk.center);
  const double ang = fp.heading + std::clamp(bear, -half, half);
  const Eigen::Vector2d arc_pt =
      fp.position + fp.spec.range * Eigen::Vector2d{std::cos(ang), std::sin(ang)};
  if ((arc_pt - disk.center).norm() <= disk.radius) consider(arc_pt);

  if (!std::isfinite(best_norm)) return std::nullopt;  // grazing contact below tolerance
  return best;
}

CriticalPoint critical_point(std::span<const State> traj, const Footprint& fp) {
  for (size_t i = 0; i < traj.size(); ++i) {
    if (!point_visible(fp, traj[i].position()))
      return CriticalPoint{traj[i].position(), static_cast<int>(i), false};
  }
  const State& last = traj.back();
  return CriticalPoint{last.position(), static_cast<int>(traj.size()) - 1, true};
}

BarrierSpec collision_barrier(const Obstacle& obs, double inflation, const BarrierGains& gains) {
  const double rho = obs.radius + inflation;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(4, 4);
  Q(0, 0) = 1.0;
  Q(1, 1) = 1.0;
  Eigen::VectorXd b(4);
  b << -2.0 * obs.center.x(), -2.0 * obs.center.y(), 0.0, 0.0;
  const double c = obs.center.squaredNorm() - rho * rho;
  return make_barrier(std::make_shared<QuadraticField>(std::move(Q), std::move(b), c), 2,
                      {ClassK{gains.gamma1}, ClassK{gains.gamma2}});
}

BarrierSpec collision_barrier(const Obstacle& obs, const WorldModel& world,
                              const BarrierGains& gains) {
  return collision_barrier(obs, world.plan_inflation(), gains);
}

CollisionChain::Eval CollisionChain::eval(const State& s) const {
  const double dx = s.x - center.x();
  const double dy = s.y - center.y();
  const double ex = std::cos(s.theta);
  const double ey = std::sin(s.theta);
  const double h = dx * dx + dy * dy - rho * rho;
  const double hdot = 2.0 * s.v * (dx * ex + dy * ey);  // L_f h
  Eval out;
  out.psi0 = h;
  out.psi1 = hdot + gamma1 * h;
  // L_f^2 h = 2 v^2; L_g L_f h = (2 (d.e), 2 v (dy ex - dx ey))
  out.c0 = 2.0 * s.v * s.v + (gamma1 + gamma2) * hdot + gamma1 * gamma2 * h;
  out.ca = 2.0 * (dx * ex + dy * ey);
  out.comega = 2.0 * s.v * (dy * ex - dx * ey);
  return out;
}

CollisionChain collision_chain(const Obstacle& obs, double inflation,
                               const BarrierGains& gains) {
  return CollisionChain{obs.center, obs.radius + inflation, gains.gamma1, gains.gamma2};
}

std::vector<double> cumulative_arc(std::span<const State> traj) {
  std::vector<double> arc(traj.size(), 0.0);
  for (size_t i = 1; i < traj.size(); ++i)
    arc[i] = arc[i - 1] + (traj[i].position() - traj[i - 1].position()).norm();
  return arc;
}

double visibility_constraint(std::span<const State> traj, std::span<const double> arc,
                             int index, const VisibilityParams& vp) {
  const State& s = traj[index];
  const double d_brake = s.v * s.v / (2.0 * vp.brake_decel);
  const double h_range = vp.sensor.range - d_brake - vp.margin;

  // the bearing branch covers exactly the braking window: everything the
  // robot traverses before it can stop must lie inside the cone
  const double window = d_brake;
  double max_bear = 0.0;
  for (size_t j = index + 1; j < traj.size(); ++j) {
    max_bear = std::max(
        max_bear, std::abs(relative_bearing(s.position(), s.theta, traj[j].position())));
    if (arc[j] - arc[index] >= window) break;
  }
  const double h_fov = vp.sensor.fov / 2.0 - max_bear;
  return std::min(h_range, h_fov);
}

double visibility_constraint(std::span<const State> traj, int index,
                             const VisibilityParams& vp) {
  const std::vector<double> arc = cumulative_arc(traj);
  return visibility_constraint(traj, arc, index, vp);
}

void LocalFreeSet::append(const Footprint& fp) {
  footprints_.push_back(fp);
  const int idx = static_cast<int>(footprints_.size()) - 1;
  if (footprints_.size() == kGridThreshold + 1) {
    build_grid();
  } else if (grid_built_) {
    const double r = fp.spec.range;
    if (fp.position.x() - r < gx0_ || fp.position.y() - r < gy0_ ||
        fp.position.x() + r > gx0_ + nx_ * cell_ ||
        fp.position.y() + r > gy0_ + ny_ * cell_) {
      build_grid();  // footprint escapes the grid extent; rebuild
    } else {
      insert_into_grid(idx);
    }
  }
}

void LocalFreeSet::build_grid() const {
  double x_lo = std::numeric_limits<double>::infinity(), y_lo = x_lo;
  double x_hi = -x_lo, y_hi = -x_lo;
  double max_range = 0.0;
  for (const auto& fp : footprints_) {
    x_lo = std::min(x_lo, fp.position.x());
    y_lo = std::min(y_lo, fp.position.y());
    x_hi = std::max(x_hi, fp.position.x());
    y_hi = std::max(y_hi, fp.position.y());
    max_range = std::max(max_range, fp.spec.range);
  }
  // Pad by one range plus slack so appends rarely force a rebuild.
  const double pad = 2.0 * max_range + 1.0;
  gx0_ = x_lo - pad;
  gy0_ = y_lo - pad;
  cell_ = std::max(max_range / 2.0, 1e-3);
  nx_ = std::max(1, static_cast<int>(std::ceil((x_hi + pad - gx0_) / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil((y_hi + pad - gy0_) / cell_)));
  cells_.assign(static_cast<size_t>(nx_) * ny_, {});
  grid_built_ = true;
  for (size_t i = 0; i < footprints_.size(); ++i) insert_into_grid(static_cast<int>(i));
}

void LocalFreeSet::insert_into_grid(int index) const {
  const Footprint& fp = footprints_[index];
  const double r = fp.spec.range;
  const int cx0 = std::max(0, static_cast<int>((fp.position.x() - r - gx0_) / cell_));
  const int cy0 = std::max(0, static_cast<int>((fp.position.y() - r - gy0_) / cell_));
  const int cx1 = std::min(nx_ - 1, static_cast<int>((fp.position.x() + r - gx0_) / cell_));
  const int cy1 = std::min(ny_ - 1, static_cast<int>((fp.position.y() + r - gy0_) / cell_));
  for (int cy = cy0; cy <= cy1; ++cy)
    for (int cx = cx0; cx <= cx1; ++cx)
      cells_[static_cast<size_t>(cy) * nx_ + cx].push_back(index);
}

bool LocalFreeSet::contains(const Eigen::Vector2d& p) const {
  if (!grid_built_) {
    for (const auto& fp : footprints_)
      if (point_visible(fp, p)) return true;
    return false;
  }
  const int cx = static_cast<int>((p.x() - gx0_) / cell_);
  const int cy = static_cast<int>((p.y() - gy0_) / cell_);
  if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return false;
  for (int idx : cells_[static_cast<size_t>(cy) * nx_ + cx])
    if (point_visible(footprints_[idx], p)) return true;
  return false;
}

}  // namespace vrrt
