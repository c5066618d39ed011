#ifndef DELAYNAV_INS_HPP
#define DELAYNAV_INS_HPP

#include <Eigen/Dense>

#include "delaynav/geo.hpp"

namespace delaynav {

using Vec26 = Eigen::Matrix<double, 26, 1>;
using Mat26 = Eigen::Matrix<double, 26, 26>;

// Frozen ordering of the 26-state error vector. The measurement matrix
// column layout depends on these indices; tests assert the table.
namespace idx {
constexpr int kPos = 0;         // NED position error, m
constexpr int kVel = 3;         // NED velocity error, m/s
constexpr int kAtt = 6;         // attitude error phi, rad
constexpr int kGyroBias = 9;    // rad/s
constexpr int kAccelBias = 12;  // m/s^2
constexpr int kGyroScale = 15;  // fraction
constexpr int kAccelScale = 18; // fraction
constexpr int kMisalign = 21;   // rad
constexpr int kRangeScale = 24; // fraction
constexpr int kDepthBias = 25;  // m
constexpr int kStates = 26;
}  // namespace idx

/// Full navigation solution plus the accumulated sensor-error estimates fed
/// back after every measurement update (closed-loop configuration).
struct NavState {
    double time = 0.0;
    GeodeticPosition pos;
    Vec3 vel_ned = Vec3::Zero();
    Mat3 att_bn = Mat3::Identity();  // body -> NED

    Vec3 gyro_bias_est = Vec3::Zero();    // rad/s
    Vec3 accel_bias_est = Vec3::Zero();   // m/s^2
    Vec3 gyro_scale_est = Vec3::Zero();   // fraction
    Vec3 accel_scale_est = Vec3::Zero();  // fraction
    Vec3 misalign_est = Vec3::Zero();     // rad
    double range_scale_est = 0.0;         // fraction
    double depth_bias_est = 0.0;          // m
};

/// Error state mean and covariance. The mean stays zero in the closed-loop
/// configuration; it is kept explicit so the update machinery is standard.
struct ErrorState26 {
    Vec26 x = Vec26::Zero();
    Mat26 P = Mat26::Zero();
};

/// Continuous-time process noise PSDs, all in SI units.
struct ProcessNoiseSpec {
    double vel_psd = 0.0;          // (m/s)^2 / s   (VRW^2)
    double att_psd = 0.0;          // rad^2 / s     (ARW^2)
    double gyro_bias_psd = 0.0;    // (rad/s)^2 / s
    double accel_bias_psd = 0.0;   // (m/s^2)^2 / s
    double gyro_scale_psd = 0.0;   // 1/s
    double accel_scale_psd = 0.0;  // 1/s
    // Small stabilizing PSDs for the augmented constant states; the source
    // model keeps them at exactly zero dynamics.
    double misalign_psd = 1e-12;
    double range_scale_psd = 1e-12;
    double depth_bias_psd = 1e-12;

    /// Derive PSDs from sensor sigmas: random walks enter as their squares,
    /// constant biases/scales get a slow wander reaching the spec level in
    /// about an hour.
    static ProcessNoiseSpec from_sensor_sigmas(double gyro_arw, double accel_vrw,
                                               double gyro_bias, double accel_bias,
                                               double gyro_scale, double accel_scale);
};

/// Earth-rate and transport-rate vectors plus local gravity, all in NED.
struct FrameRates {
    Vec3 omega_ie_n = Vec3::Zero();
    Vec3 omega_en_n = Vec3::Zero();
    Vec3 gravity_n = Vec3::Zero();
};
FrameRates frame_rates(const GeodeticPosition& pos, const Vec3& vel_ned, const EarthModel& earth);

/// Canonical position update shared by the mechanization and the trajectory
/// generator, so that inverse mechanization closes the loop exactly.
GeodeticPosition integrate_position(const GeodeticPosition& pos, const Vec3& v_old,
                                    const Vec3& v_new, double dt, const EarthModel& earth);

/// One strapdown step. Increments must already be corrected for the current
/// bias/scale estimates.
NavState mechanize_step(const NavState& state, const Vec3& gyro_inc, const Vec3& accel_inc,
                        double dt, const EarthModel& earth);

/// Apply the current bias/scale estimates to raw increments.
void correct_increments(const NavState& state, const Vec3& raw_gyro, const Vec3& raw_accel,
                        double dt, Vec3& gyro_inc, Vec3& accel_inc);

/// Continuous-time error transition matrix F (26x26). Rows and columns of
/// the augmented constant states are identically zero. The current corrected
/// specific force and angular rate (body frame, SI rates) feed the
/// attitude/velocity coupling blocks.
Mat26 error_transition(const NavState& state, const EarthModel& earth,
                       const Vec3& specific_force_b, const Vec3& angular_rate_b);

/// First-order-plus discretization: Phi = I + F dt + F^2 dt^2/2 and the
/// trapezoidal Qd = (Phi G Q G' Phi' + G Q G') dt / 2. The noise mapping
/// G Q G' is diagonal because the PSDs are isotropic per sensor triad.
struct Discretized {
    Mat26 phi;
    Mat26 qd;
};
Discretized discretize(const Mat26& f, const ProcessNoiseSpec& q, double dt);

/// Covariance time update P <- Phi P Phi' + Qd, symmetrized. Throws
/// CovarianceBlowup when trace exceeds the ceiling.
void propagate(ErrorState26& err, const Mat26& phi, const Mat26& qd,
               double trace_ceiling = 1e12);

/// Closed-loop feedback of an estimated error vector into the nav state.
NavState apply_correction(const NavState& state, const Vec26& dx, const EarthModel& earth);

/// Default initial covariance bracketing the simulation sensor specs.
Mat26 default_initial_covariance();

}  // namespace delaynav

#endif  // DELAYNAV_INS_HPP
