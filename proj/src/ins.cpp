#include "delaynav/ins.hpp"

#include <cmath>

#include "delaynav/errors.hpp"

namespace delaynav {

ProcessNoiseSpec ProcessNoiseSpec::from_sensor_sigmas(double gyro_arw, double accel_vrw,
                                                      double gyro_bias, double accel_bias,
                                                      double gyro_scale, double accel_scale) {
    ProcessNoiseSpec q;
    q.att_psd = gyro_arw * gyro_arw;
    q.vel_psd = accel_vrw * accel_vrw;
    // Constant biases/scales wander to their spec level in about an hour.
    const double tau = 3600.0;
    q.gyro_bias_psd = gyro_bias * gyro_bias / tau;
    q.accel_bias_psd = accel_bias * accel_bias / tau;
    q.gyro_scale_psd = gyro_scale * gyro_scale / tau;
    q.accel_scale_psd = accel_scale * accel_scale / tau;
    return q;
}

FrameRates frame_rates(const GeodeticPosition& pos, const Vec3& vel_ned, const EarthModel& earth) {
    const auto r = radii_of_curvature(pos.lat, earth);
    const double sl = std::sin(pos.lat), cl = std::cos(pos.lat);
    FrameRates out;
    out.omega_ie_n = Vec3(earth.earth_rate * cl, 0.0, -earth.earth_rate * sl);
    const double rmh = r.rm + pos.alt, rnh = r.rn + pos.alt;
    out.omega_en_n = Vec3(vel_ned.y() / rnh, -vel_ned.x() / rmh, -vel_ned.y() * sl / (cl * rnh));
    out.gravity_n = Vec3(0.0, 0.0, earth.gravity_magnitude(pos.lat, pos.alt));
    return out;
}

GeodeticPosition integrate_position(const GeodeticPosition& pos, const Vec3& v_old,
                                    const Vec3& v_new, double dt, const EarthModel& earth) {
    const Vec3 v_mid = 0.5 * (v_old + v_new);
    const auto r = radii_of_curvature(pos.lat, earth);
    const double alt_new = pos.alt - v_mid.z() * dt;
    const double alt_mid = 0.5 * (pos.alt + alt_new);
    const double lat_new = pos.lat + v_mid.x() * dt / (r.rm + alt_mid);
    const double lat_mid = 0.5 * (pos.lat + lat_new);
    const double lon_new = pos.lon + v_mid.y() * dt / ((r.rn + alt_mid) * std::cos(lat_mid));
    return {lat_new, lon_new, alt_new};
}

NavState mechanize_step(const NavState& state, const Vec3& gyro_inc, const Vec3& accel_inc,
                        double dt, const EarthModel& earth) {
    const FrameRates rates = frame_rates(state.pos, state.vel_ned, earth);
    const Vec3 omega_in_n = rates.omega_ie_n + rates.omega_en_n;
    const Vec3 zeta = omega_in_n * dt;

    // Velocity: specific-force increment with rotation compensation, then
    // gravity and Coriolis.
    const Vec3 dv_f_b = accel_inc + 0.5 * gyro_inc.cross(accel_inc);
    const Vec3 dv_f_n = (Mat3::Identity() - 0.5 * skew(zeta)) * (state.att_bn * dv_f_b);
    const Vec3 dv_gc =
        (rates.gravity_n - (2.0 * rates.omega_ie_n + rates.omega_en_n).cross(state.vel_ned)) * dt;

    NavState next = state;
    next.vel_ned = state.vel_ned + dv_f_n + dv_gc;
    next.pos = integrate_position(state.pos, state.vel_ned, next.vel_ned, dt, earth);
    next.att_bn =
        orthonormalize(rotvec_to_dcm(-zeta) * state.att_bn * rotvec_to_dcm(gyro_inc));
    next.time = state.time + dt;
    return next;
}

void correct_increments(const NavState& state, const Vec3& raw_gyro, const Vec3& raw_accel,
                        double dt, Vec3& gyro_inc, Vec3& accel_inc) {
    gyro_inc = (raw_gyro - state.gyro_bias_est * dt).cwiseQuotient(
        Vec3::Ones() + state.gyro_scale_est);
    accel_inc = (raw_accel - state.accel_bias_est * dt).cwiseQuotient(
        Vec3::Ones() + state.accel_scale_est);
}

Mat26 error_transition(const NavState& state, const EarthModel& earth,
                       const Vec3& specific_force_b, const Vec3& angular_rate_b) {
    Mat26 f = Mat26::Zero();

    const double lat = state.pos.lat, alt = state.pos.alt;
    const double sl = std::sin(lat), cl = std::cos(lat), tl = sl / cl;
    const double vn = state.vel_ned.x(), ve = state.vel_ned.y(), vd = state.vel_ned.z();
    const auto r = radii_of_curvature(lat, earth);
    const auto rp = radii_of_curvature_dlat(lat, earth);
    const double rmh = r.rm + alt, rnh = r.rn + alt;
    const double w = earth.earth_rate;
    const FrameRates rates = frame_rates(state.pos, state.vel_ned, earth);

    // Position rows: exact differential of the position kinematics in
    // NED-meter coordinates (the curvature-rate terms cancel in the north
    // channel and leave a small residual in the east channel).
    Mat3 fpp = Mat3::Zero();
    fpp(0, 0) = -vd / rmh;
    fpp(0, 2) = vn / rmh;
    const double coef = (rp.rn * cl - rnh * sl) / (rmh * rnh * cl);
    fpp(1, 0) = -coef * ve;
    fpp(1, 1) = coef * vn - vd / rnh;
    fpp(1, 2) = ve / rnh;
    f.block<3, 3>(idx::kPos, idx::kPos) = fpp;
    f.block<3, 3>(idx::kPos, idx::kVel) = Mat3::Identity();

    // Sensitivities of the earth-rate and transport-rate vectors to NED
    // position error (columns: dN, dE, dD; dlat = dN/rmh, dalt = -dD).
    Mat3 wie_p = Mat3::Zero();
    wie_p(0, 0) = -w * sl / rmh;
    wie_p(2, 0) = -w * cl / rmh;

    Mat3 wen_p = Mat3::Zero();
    wen_p(0, 0) = -ve * rp.rn / (rnh * rnh * rmh);
    wen_p(0, 2) = ve / (rnh * rnh);
    wen_p(1, 0) = vn * rp.rm / (rmh * rmh * rmh);
    wen_p(1, 2) = -vn / (rmh * rmh);
    wen_p(2, 0) = (-ve / (cl * cl * rnh) + ve * tl * rp.rn / (rnh * rnh)) / rmh;
    wen_p(2, 2) = -ve * tl / (rnh * rnh);

    Mat3 wen_v = Mat3::Zero();
    wen_v(0, 1) = 1.0 / rnh;
    wen_v(1, 0) = -1.0 / rmh;
    wen_v(2, 1) = -tl / rnh;

    // Velocity rows.
    const Vec3 f_n = state.att_bn * specific_force_b;
    Mat3 fvp = skew(state.vel_ned) * (2.0 * wie_p + wen_p);
    fvp(2, 0) += earth.gravity_dlat(lat, alt) / rmh;
    fvp(2, 2) += -earth.gravity_dalt(lat, alt);
    f.block<3, 3>(idx::kVel, idx::kPos) = fvp;
    f.block<3, 3>(idx::kVel, idx::kVel) =
        skew(state.vel_ned) * wen_v - skew(2.0 * rates.omega_ie_n + rates.omega_en_n);
    f.block<3, 3>(idx::kVel, idx::kAtt) = skew(f_n);
    f.block<3, 3>(idx::kVel, idx::kAccelBias) = state.att_bn;
    f.block<3, 3>(idx::kVel, idx::kAccelScale) = state.att_bn * specific_force_b.asDiagonal();

    // Attitude rows.
    f.block<3, 3>(idx::kAtt, idx::kPos) = wie_p + wen_p;
    f.block<3, 3>(idx::kAtt, idx::kVel) = wen_v;
    f.block<3, 3>(idx::kAtt, idx::kAtt) = -skew(rates.omega_ie_n + rates.omega_en_n);
    f.block<3, 3>(idx::kAtt, idx::kGyroBias) = -state.att_bn;
    f.block<3, 3>(idx::kAtt, idx::kGyroScale) = -state.att_bn * angular_rate_b.asDiagonal();

    // Bias, scale, misalignment, range-scale and depth-bias states are
    // random constants: their rows and columns stay zero.
    return f;
}

Discretized discretize(const Mat26& f, const ProcessNoiseSpec& q, double dt) {
    Discretized out;
    out.phi = Mat26::Identity() + f * dt + 0.5 * (f * f) * (dt * dt);

    Vec26 psd = Vec26::Zero();
    psd.segment<3>(idx::kVel).setConstant(q.vel_psd);
    psd.segment<3>(idx::kAtt).setConstant(q.att_psd);
    psd.segment<3>(idx::kGyroBias).setConstant(q.gyro_bias_psd);
    psd.segment<3>(idx::kAccelBias).setConstant(q.accel_bias_psd);
    psd.segment<3>(idx::kGyroScale).setConstant(q.gyro_scale_psd);
    psd.segment<3>(idx::kAccelScale).setConstant(q.accel_scale_psd);
    psd.segment<3>(idx::kMisalign).setConstant(q.misalign_psd);
    psd(idx::kRangeScale) = q.range_scale_psd;
    psd(idx::kDepthBias) = q.depth_bias_psd;

    const Mat26 qc = psd.asDiagonal();
    Mat26 qd = (out.phi * qc * out.phi.transpose() + qc) * (0.5 * dt);
    out.qd = 0.5 * (qd + qd.transpose());
    return out;
}

void propagate(ErrorState26& err, const Mat26& phi, const Mat26& qd, double trace_ceiling) {
    err.x = phi * err.x;
    Mat26 p = phi * err.P * phi.transpose() + qd;
    err.P = 0.5 * (p + p.transpose());
    if (err.P.trace() > trace_ceiling) {
        throw CovarianceBlowup("covariance trace " + std::to_string(err.P.trace()) +
                               " exceeds ceiling");
    }
}

NavState apply_correction(const NavState& state, const Vec26& dx, const EarthModel& earth) {
    NavState next = state;
    const Mat3 dri = dr_inv(state.pos.lat, state.pos.alt, earth);
    const Vec3 dgeo = dri * dx.segment<3>(idx::kPos);  // (dlat, dlon, dalt) of the error
    next.pos = GeodeticPosition(state.pos.lat - dgeo.x(), state.pos.lon - dgeo.y(),
                                state.pos.alt - dgeo.z());
    next.vel_ned = state.vel_ned - dx.segment<3>(idx::kVel);
    next.att_bn =
        orthonormalize((Mat3::Identity() + skew(dx.segment<3>(idx::kAtt))) * state.att_bn);
    next.gyro_bias_est = state.gyro_bias_est + dx.segment<3>(idx::kGyroBias);
    next.accel_bias_est = state.accel_bias_est + dx.segment<3>(idx::kAccelBias);
    next.gyro_scale_est = state.gyro_scale_est + dx.segment<3>(idx::kGyroScale);
    next.accel_scale_est = state.accel_scale_est + dx.segment<3>(idx::kAccelScale);
    next.misalign_est = state.misalign_est + dx.segment<3>(idx::kMisalign);
    next.range_scale_est = state.range_scale_est + dx(idx::kRangeScale);
    next.depth_bias_est = state.depth_bias_est + dx(idx::kDepthBias);
    return next;
}

Mat26 default_initial_covariance() {
    Vec26 sig = Vec26::Zero();
    sig.segment<3>(idx::kPos).setConstant(1.0);
    sig.segment<3>(idx::kVel).setConstant(0.1);
    sig.segment<3>(idx::kAtt) = Vec3(0.1 * kDegToRad, 0.1 * kDegToRad, 0.5 * kDegToRad);
    sig.segment<3>(idx::kGyroBias).setConstant(0.01 * kDegToRad / 3600.0);
    sig.segment<3>(idx::kAccelBias).setConstant(50e-6 * 9.80665);
    sig.segment<3>(idx::kGyroScale).setConstant(50e-6);
    sig.segment<3>(idx::kAccelScale).setConstant(100e-6);
    sig.segment<3>(idx::kMisalign).setConstant(0.2 * kDegToRad);
    sig(idx::kRangeScale) = 0.002;
    sig(idx::kDepthBias) = 0.2;
    return sig.cwiseProduct(sig).asDiagonal();
}

}  // namespace delaynav
