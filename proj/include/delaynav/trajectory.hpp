#ifndef DELAYNAV_TRAJECTORY_HPP
#define DELAYNAV_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "delaynav/geo.hpp"

namespace delaynav {

/// Ground-truth pose, velocity, and the ideal inertial measurements at one
/// epoch.
struct TrajectorySample {
    double time = 0.0;  // s
    GeodeticPosition pos;
    Vec3 vel_ned = Vec3::Zero();     // m/s
    Mat3 att_bn = Mat3::Identity();  // body -> NED
    Vec3 specific_force_b = Vec3::Zero();  // m/s^2
    Vec3 angular_rate_b = Vec3::Zero();    // rad/s
};

/// One IMU integration interval: angular and velocity increments over
/// (t_start, t_end].
struct ImuIncrement {
    double t_start = 0.0;
    double t_end = 0.0;
    Vec3 gyro = Vec3::Zero();   // rad
    Vec3 accel = Vec3::Zero();  // m/s
};

/// Helical descent parameters. The turn rate and acceleration profile are
/// free parameters of the scenario; defaults give a horizontal radius of
/// roughly 150 m at cruise speed.
struct HelixParams {
    GeodeticPosition start;
    double pitch = -15.0 * kDegToRad;       // rad, negative = descending
    double target_speed = 6.0 * kKnotsToMps; // m/s
    double final_depth = 470.0;             // m, positive down
    double turn_rate = 0.02;                // rad/s
    double accel_duration = 60.0;           // s
    double imu_rate = 200.0;                // Hz
    // Optional hard stop; required for level/static profiles that never
    // reach final_depth.
    double max_duration = std::numeric_limits<double>::infinity();
};

/// Generate the helical descent truth. Throws NonTerminating when the
/// profile cannot reach final_depth and no max_duration is given.
std::vector<TrajectorySample> generate_helix(const HelixParams& params,
                                             const EarthModel& earth);

/// Inverse strapdown mechanization: per-interval gyro/accel increments that
/// reproduce the trajectory exactly when integrated by mechanize_step.
/// Throws NonUniformRate if sample spacing deviates by more than 1e-6 s.
std::vector<ImuIncrement> ideal_imu(const std::vector<TrajectorySample>& traj,
                                    const EarthModel& earth);

/// Linear interpolation of pose/velocity at time t (attitude re-orthonormalized).
TrajectorySample interpolate(const std::vector<TrajectorySample>& traj, double t);

/// CSV export with header t,lat_deg,lon_deg,alt_m,vn,ve,vd,roll_deg,pitch_deg,yaw_deg.
void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& traj);

/// Inverse of write_trajectory_csv; ideal IMU fields are refilled by inverse
/// mechanization when at least two samples are present.
std::vector<TrajectorySample> read_trajectory_csv(const std::string& path,
                                                  const EarthModel& earth);

}  // namespace delaynav

#endif  // DELAYNAV_TRAJECTORY_HPP
