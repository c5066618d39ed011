#ifndef DELAYNAV_GEO_HPP
#define DELAYNAV_GEO_HPP

#include <Eigen/Dense>

#include "delaynav/errors.hpp"

namespace delaynav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;
constexpr double kKnotsToMps = 0.514444444444444;

/// Wrap an angle to (-pi, pi].
double wrap_pi(double angle);

/// Geodetic position in radians/meters. Longitude is wrapped to (-pi, pi]
/// on construction; latitude must stay within [-pi/2, pi/2].
struct GeodeticPosition {
    double lat = 0.0;  // rad
    double lon = 0.0;  // rad, wrapped to (-pi, pi]
    double alt = 0.0;  // m, positive up

    GeodeticPosition() = default;
    GeodeticPosition(double lat_rad, double lon_rad, double alt_m);

    static GeodeticPosition from_degrees(double lat_deg, double lon_deg, double alt_m);
};

/// Reference ellipsoid plus the parameters of the normal-gravity series.
/// The spherical variant keeps every formula valid (e^2 = 0) while giving
/// analytically checkable radii and a constant gravity field.
struct EarthModel {
    double semi_major_axis = 6378137.0;          // m
    double eccentricity_sq = 6.69437999014e-3;   // WGS-84 e^2
    double earth_rate = 7.2921151467e-5;         // rad/s

    // Somigliana-style series: g = g0*(1 + k1*sin^2 L + k2*sin^4 L)
    //                              + (gh1*sin^2 L + gh2)*h + gh3*h^2
    double gravity_g0 = 9.7803267715;
    double gravity_k1 = 5.2790414e-3;
    double gravity_k2 = 2.32718e-5;
    double gravity_gh1 = 4.3977311e-9;
    double gravity_gh2 = -3.0876910891e-6;
    double gravity_gh3 = 7.211e-13;

    // When true, geodetic_to_ecef follows the source model verbatim (R_M in
    // the z-component); when false, the standard R_N*(1-e^2) form is used.
    bool paper_faithful = true;

    static EarthModel wgs84();
    static EarthModel spherical(double radius = 6371000.0, double gravity = 9.80665);

    double gravity_magnitude(double lat, double alt) const;
    /// d g / d lat and d g / d alt of the series above (used by the error model).
    double gravity_dlat(double lat, double alt) const;
    double gravity_dalt(double lat, double alt) const;
};

/// Meridian (R_M) and prime-vertical (R_N) radii of curvature at a latitude.
struct RadiiOfCurvature {
    double rm = 0.0;
    double rn = 0.0;
};
RadiiOfCurvature radii_of_curvature(double lat, const EarthModel& earth);

/// d R_M / d lat and d R_N / d lat (exact derivatives of the closed forms).
RadiiOfCurvature radii_of_curvature_dlat(double lat, const EarthModel& earth);

/// DCM from the e-frame to the local NED n-frame at (lat, lon).
Mat3 dcm_e_to_n(double lat, double lon);

/// First-order error of dcm_e_to_n under latitude/longitude perturbations.
Mat3 dcm_e_to_n_error(double lat, double lon, double dlat, double dlon);

/// Geodetic to ECEF. With earth.paper_faithful the z-component uses
/// (R_M + h) sin L; otherwise the standard (R_N (1 - e^2) + h) sin L.
Vec3 geodetic_to_ecef(const GeodeticPosition& p, const EarthModel& earth);

/// Skew-symmetric matrix such that skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// diag(1/(R_M+h), 1/((R_N+h) cos L), -1): maps NED position error (meters)
/// to (dlat, dlon, dalt). Throws PolarSingularity when cos L vanishes.
Mat3 dr_inv(double lat, double alt, const EarthModel& earth);

/// Inverse of dr_inv: diag(R_M+h, (R_N+h) cos L, -1).
Mat3 dr_fwd(double lat, double alt, const EarthModel& earth);

/// Symmetric one-step re-orthonormalization D <- D (3I - D^T D) / 2.
Mat3 orthonormalize(const Mat3& dcm);

/// ZYX Euler (roll about x, pitch about y, yaw about z) to body-to-NED DCM.
Mat3 euler_to_dcm(double roll, double pitch, double yaw);

/// Inverse of euler_to_dcm; returns (roll, pitch, yaw).
Vec3 dcm_to_euler(const Mat3& c_b_n);

/// Rotation matrix exp([v]x) via Rodrigues.
Mat3 rotvec_to_dcm(const Vec3& v);

/// Rotation vector of a DCM (inverse of rotvec_to_dcm).
Vec3 dcm_to_rotvec(const Mat3& dcm);

}  // namespace delaynav

#endif  // DELAYNAV_GEO_HPP
