#ifndef DELAYNAV_SENSORS_HPP
#define DELAYNAV_SENSORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "delaynav/geo.hpp"
#include "delaynav/trajectory.hpp"

namespace delaynav {

/// IMU error specification (Table-style constants; biases and scale factors
/// are applied verbatim, random walks drive white noise).
struct ImuErrorSpec {
    double gyro_bias = 0.0;    // rad/s
    double gyro_arw = 0.0;     // rad/sqrt(s)
    double gyro_scale = 0.0;   // fraction
    double accel_bias = 0.0;   // m/s^2
    double accel_vrw = 0.0;    // (m/s)/sqrt(s)
    double accel_scale = 0.0;  // fraction
};

/// Acoustic receiver specification and timing model parameters.
struct AcousticSpec {
    double azimuth_sigma = 0.1 * kDegToRad;  // rad
    double range_scale_sigma = 1e-3;         // fraction of slant range (noise)
    double range_noise_floor = 0.0;          // m
    double fix_rate = 1.0;                   // Hz, transmit epochs on the PPS grid
    double sound_speed = 1500.0;             // m/s
    double signal_length = 0.02;             // s
    double sampling_window = 0.65;           // s
    double processing_delay_mean = 0.010;    // s
    double processing_delay_jitter = 0.004;  // s, uniform +-
    // Sigma of the per-run constant slant-range scale error (sound-speed
    // class error, modeled as a constant state).
    double range_scale_bias_sigma = 1e-3;
};

enum class SystemKind { kUsbl, kIusbl, kPiusbl };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

/// Delay model: which architecture produces the fix and, for USBL, the cost
/// of relaying the solution back through the water column.
struct DelayModel {
    SystemKind kind = SystemKind::kPiusbl;
    // USBL only: t4 += comm_tof_factor * tof + comm_fixed.
    double comm_tof_factor = 1.0;
    double comm_fixed = 0.5;  // s
};

/// One acoustic fix with its full timeline.
struct AcousticFix {
    double r = 0.0;      // m, measured slant range
    double alpha = 0.0;  // rad, measured azimuth in the u-frame
    double t0 = 0.0;     // s, transmit epoch (PPS)
    double tof = 0.0;    // s
    double t1 = 0.0;     // s, signal arrival = t0 + tof
    double t3 = 0.0;     // s, sampling window end
    double t4 = 0.0;     // s, delivery to the navigation filter
    SystemKind kind = SystemKind::kPiusbl;
};

/// A depth gauge sample.
struct DepthSample {
    double time = 0.0;
    double depth = 0.0;  // m, positive down
};

/// Relative beacon geometry expressed in the u-frame.
struct UGeometry {
    double r = 0.0;      // m
    double alpha = 0.0;  // rad
    double h_u = 0.0;    // m, u-frame z-component
    Vec3 p_ut_u = Vec3::Zero();
};

/// Corrupt ideal increments: measured = (1 + scale) * ideal + bias * dt + w,
/// with per-sample noise sigma = random_walk * sqrt(dt). Deterministic under
/// a fixed seed.
std::vector<ImuIncrement> corrupt_imu(const std::vector<ImuIncrement>& ideal,
                                      const ImuErrorSpec& spec, std::uint64_t seed);

/// Beacon geometry in the u-frame given the true receiver pose and mounting.
/// Throws ZenithSingularity when the beacon sits on the u-frame z axis.
UGeometry true_geometry(const GeodeticPosition& pos, const Mat3& att_bn,
                        const GeodeticPosition& beacon, const Vec3& lever_bu,
                        const Mat3& c_b_u, const EarthModel& earth);

/// Fill the timeline of a fix given the transmit epoch and TOF.
/// piUSBL: t4 = t0 + window + proc (delay shrinks as tof grows);
/// iUSBL:  t4 = t1 + tof + proc    (two-way interrogation);
/// USBL:   iUSBL plus the relay leg.
struct DelayTimes {
    double t1 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
};
DelayTimes delay_model(const DelayModel& model, double t0, double tof,
                       const AcousticSpec& spec, double processing_delay);

/// Draw the processing delay for one fix.
double draw_processing_delay(const AcousticSpec& spec, std::uint64_t seed, std::uint64_t fix_index);

/// Produce one measured fix from the true geometry at the arrival epoch.
/// Throws OutOfWindow when the TOF exceeds the designed window.
AcousticFix measure_acoustic(const UGeometry& truth, double t0, double tof,
                             const AcousticSpec& spec, const DelayModel& model,
                             double range_scale_true, std::uint64_t seed,
                             std::uint64_t fix_index);

/// One depth sample: gauge-location depth plus white noise.
DepthSample measure_depth(const GeodeticPosition& pos, const Mat3& att_bn, double time,
                          double sigma, const Vec3& lever_bd, std::uint64_t seed,
                          std::uint64_t sample_index);

/// Solve the one-way arrival time: |p_vehicle(t1) - beacon| = c (t1 - t0).
/// Returns the time of flight.
double solve_arrival_tof(const std::vector<TrajectorySample>& traj,
                         const GeodeticPosition& beacon, const Vec3& lever_bu,
                         const Mat3& c_b_u, double t0, double sound_speed,
                         const EarthModel& earth);

/// Acoustic fix log CSV: t0,t1,t3,t4,r,alpha_rad,kind.
void write_fix_csv(const std::string& path, const std::vector<AcousticFix>& fixes);
std::vector<AcousticFix> read_fix_csv(const std::string& path);

}  // namespace delaynav

#endif  // DELAYNAV_SENSORS_HPP
