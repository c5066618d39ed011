#include "delaynav/geo.hpp"

#include <cmath>

namespace delaynav {

double wrap_pi(double angle) {
    double a = std::fmod(angle, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

GeodeticPosition::GeodeticPosition(double lat_rad, double lon_rad, double alt_m)
    : lat(lat_rad), lon(wrap_pi(lon_rad)), alt(alt_m) {
    if (std::abs(lat) > M_PI / 2.0 + 1e-12) {
        throw Error("latitude out of range: " + std::to_string(lat_rad));
    }
}

GeodeticPosition GeodeticPosition::from_degrees(double lat_deg, double lon_deg, double alt_m) {
    return {lat_deg * kDegToRad, lon_deg * kDegToRad, alt_m};
}

EarthModel EarthModel::wgs84() { return EarthModel{}; }

EarthModel EarthModel::spherical(double radius, double gravity) {
    EarthModel e;
    e.semi_major_axis = radius;
    e.eccentricity_sq = 0.0;
    e.gravity_g0 = gravity;
    e.gravity_k1 = e.gravity_k2 = 0.0;
    e.gravity_gh1 = e.gravity_gh2 = e.gravity_gh3 = 0.0;
    return e;
}

double EarthModel::gravity_magnitude(double lat, double alt) const {
    const double s2 = std::sin(lat) * std::sin(lat);
    return gravity_g0 * (1.0 + gravity_k1 * s2 + gravity_k2 * s2 * s2) +
           (gravity_gh1 * s2 + gravity_gh2) * alt + gravity_gh3 * alt * alt;
}

double EarthModel::gravity_dlat(double lat, double alt) const {
    const double s = std::sin(lat), c = std::cos(lat);
    const double ds2 = 2.0 * s * c;
    return gravity_g0 * (gravity_k1 * ds2 + gravity_k2 * 2.0 * s * s * ds2) + gravity_gh1 * ds2 * alt;
}

double EarthModel::gravity_dalt(double lat, double alt) const {
    const double s2 = std::sin(lat) * std::sin(lat);
    return gravity_gh1 * s2 + gravity_gh2 + 2.0 * gravity_gh3 * alt;
}

RadiiOfCurvature radii_of_curvature(double lat, const EarthModel& earth) {
    const double s2 = std::sin(lat) * std::sin(lat);
    const double w2 = 1.0 - earth.eccentricity_sq * s2;
    const double w = std::sqrt(w2);
    RadiiOfCurvature r;
    r.rn = earth.semi_major_axis / w;
    r.rm = earth.semi_major_axis * (1.0 - earth.eccentricity_sq) / (w2 * w);
    return r;
}

RadiiOfCurvature radii_of_curvature_dlat(double lat, const EarthModel& earth) {
    const double s = std::sin(lat), c = std::cos(lat);
    const double e2 = earth.eccentricity_sq;
    const double w2 = 1.0 - e2 * s * s;
    RadiiOfCurvature d;
    d.rn = earth.semi_major_axis * e2 * s * c / (w2 * std::sqrt(w2));
    d.rm = 3.0 * earth.semi_major_axis * (1.0 - e2) * e2 * s * c / (w2 * w2 * std::sqrt(w2));
    return d;
}

Mat3 dcm_e_to_n(double lat, double lon) {
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    Mat3 c;
    c << -sl * co, -sl * so, cl,
         -so,      co,       0.0,
         -cl * co, -cl * so, -sl;
    return c;
}

Mat3 dcm_e_to_n_error(double lat, double lon, double dlat, double dlon) {
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    Mat3 d;
    d << -dlat * cl * co + dlon * so * sl, -dlon * co * sl - dlat * cl * so, -dlat * sl,
         -dlon * co,                       -dlon * so,                       0.0,
         dlat * sl * co + dlon * so * cl,  dlat * sl * so - dlon * co * cl,  -dlat * cl;
    return d;
}

Vec3 geodetic_to_ecef(const GeodeticPosition& p, const EarthModel& earth) {
    const auto r = radii_of_curvature(p.lat, earth);
    const double cl = std::cos(p.lat), sl = std::sin(p.lat);
    const double z_radius = earth.paper_faithful
                                ? r.rm + p.alt
                                : r.rn * (1.0 - earth.eccentricity_sq) + p.alt;
    return {(r.rn + p.alt) * cl * std::cos(p.lon),
            (r.rn + p.alt) * cl * std::sin(p.lon),
            z_radius * sl};
}

Mat3 skew(const Vec3& v) {
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Mat3 dr_inv(double lat, double alt, const EarthModel& earth) {
    const double cl = std::cos(lat);
    if (std::abs(cl) < 1e-9) {
        throw PolarSingularity("dr_inv undefined at |lat| = pi/2");
    }
    const auto r = radii_of_curvature(lat, earth);
    return Vec3(1.0 / (r.rm + alt), 1.0 / ((r.rn + alt) * cl), -1.0).asDiagonal();
}

Mat3 dr_fwd(double lat, double alt, const EarthModel& earth) {
    const double cl = std::cos(lat);
    if (std::abs(cl) < 1e-9) {
        throw PolarSingularity("dr_fwd undefined at |lat| = pi/2");
    }
    const auto r = radii_of_curvature(lat, earth);
    return Vec3(r.rm + alt, (r.rn + alt) * cl, -1.0).asDiagonal();
}

Mat3 orthonormalize(const Mat3& dcm) {
    return dcm * (3.0 * Mat3::Identity() - dcm.transpose() * dcm) / 2.0;
}

Mat3 euler_to_dcm(double roll, double pitch, double yaw) {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
            Eigen::AngleAxisd(roll, Vec3::UnitX()))
        .toRotationMatrix();
}

Vec3 dcm_to_euler(const Mat3& c) {
    const double pitch = std::asin(std::clamp(-c(2, 0), -1.0, 1.0));
    const double roll = std::atan2(c(2, 1), c(2, 2));
    const double yaw = std::atan2(c(1, 0), c(0, 0));
    return {roll, pitch, yaw};
}

Mat3 rotvec_to_dcm(const Vec3& v) {
    const double angle = v.norm();
    if (angle < 1e-12) {
        return Mat3::Identity() + skew(v);
    }
    return Eigen::AngleAxisd(angle, v / angle).toRotationMatrix();
}

Vec3 dcm_to_rotvec(const Mat3& dcm) {
    const Eigen::AngleAxisd aa(dcm);
    return aa.angle() * aa.axis();
}

}  // namespace delaynav
