#include "delaynav/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "delaynav/errors.hpp"
#include "delaynav/rng.hpp"

namespace delaynav {

namespace {
constexpr double kZenithHoriz2 = 1e-12;  // (1e-6 m)^2

Mat3 corrected_c_b_u(const NavState& state, const CalibrationSet& calib) {
    return orthonormalize((Mat3::Identity() + skew(state.misalign_est)) * calib.c_b_u_nominal);
}
}  // namespace

ObservationGeometry observation_geometry(const NavState& state, const CalibrationSet& calib,
                                         const EarthModel& earth) {
    ObservationGeometry g;
    g.p_bt_e = geodetic_to_ecef(calib.beacon, earth) - geodetic_to_ecef(state.pos, earth);
    g.c_e_n = dcm_e_to_n(state.pos.lat, state.pos.lon);
    g.c_n_b = state.att_bn.transpose();
    g.c_b_u = corrected_c_b_u(state, calib);
    g.p_ut_u = g.c_b_u * (g.c_n_b * (g.c_e_n * g.p_bt_e)) - g.c_b_u * calib.lever_bu;
    g.range = g.p_ut_u.norm();
    const double horiz2 = g.p_ut_u.x() * g.p_ut_u.x() + g.p_ut_u.y() * g.p_ut_u.y();
    g.zenith = horiz2 < kZenithHoriz2;
    g.azimuth = g.zenith ? 0.0 : std::atan2(g.p_ut_u.y(), g.p_ut_u.x());
    g.depth = -state.pos.alt + (state.att_bn * calib.lever_bd).z();
    return g;
}

PredictedObservation predict_observation(const NavState& state, const CalibrationSet& calib,
                                         const EarthModel& earth) {
    const ObservationGeometry g = observation_geometry(state, calib, earth);
    if (g.range < 1e-6) {
        throw Error("beacon coincides with the receiver");
    }
    if (g.zenith) {
        throw ZenithSingularity();
    }
    return {g.range, g.azimuth, g.depth};
}

Eigen::Matrix<double, 2, 3> jac_Ha(const Vec3& p) {
    const double r = p.norm();
    const double horiz2 = p.x() * p.x() + p.y() * p.y();
    if (r <= 0.0 || horiz2 < kZenithHoriz2) {
        throw ZenithSingularity();
    }
    Eigen::Matrix<double, 2, 3> h;
    h << p.x() / r, p.y() / r, p.z() / r,
         -p.y() / horiz2, p.x() / horiz2, 0.0;
    return h;
}

Mat3 jac_Hb(const GeodeticPosition& pos, const EarthModel& earth) {
    const auto r = radii_of_curvature(pos.lat, earth);
    const double sl = std::sin(pos.lat), cl = std::cos(pos.lat);
    const double so = std::sin(pos.lon), co = std::cos(pos.lon);
    const double rnh = r.rn + pos.alt, rmh = r.rm + pos.alt;
    Mat3 h;
    h << -rnh * sl * co, -rnh * cl * so, cl * co,
         -rnh * sl * so, rnh * cl * co, cl * so,
         rmh * cl, 0.0, sl;
    return h;
}

Mat3 jac_Hc(const GeodeticPosition& pos, const Vec3& p) {
    const double sl = std::sin(pos.lat), cl = std::cos(pos.lat);
    const double so = std::sin(pos.lon), co = std::cos(pos.lon);
    const double x = p.x(), y = p.y(), z = p.z();
    Mat3 h;
    h << -cl * co * x - cl * so * y - sl * z, so * sl * x - co * sl * y, 0.0,
         0.0, -co * x - so * y, 0.0,
         sl * co * x + sl * so * y - cl * z, so * cl * x - co * cl * y, 0.0;
    return h;
}

Mat3 jac_Hc_printed(const GeodeticPosition& pos, const Vec3& p) {
    const double sl = std::sin(pos.lat), cl = std::cos(pos.lat);
    const double so = std::sin(pos.lon), co = std::cos(pos.lon);
    const double x = p.x(), y = p.y(), z = p.z();
    Mat3 h;
    h << -cl * co * x - cl * so * y - sl * z, so * sl * x - co * sl * y, 0.0,
         0.0, -co * x - so * y, 0.0,
         -sl * co * x + sl * so * y - cl * z, so * cl * x - co * cl * y, 0.0;
    return h;
}

double hc_print_discrepancy(const GeodeticPosition& pos, const Vec3& p) {
    return (jac_Hc(pos, p) - jac_Hc_printed(pos, p)).cwiseAbs().maxCoeff();
}

MeasurementMatrix assemble_H(const NavState& state, const CalibrationSet& calib,
                             const EarthModel& earth) {
    MeasurementMatrix mm;
    mm.geom = observation_geometry(state, calib, earth);
    const ObservationGeometry& g = mm.geom;

    Eigen::Matrix<double, 2, 3> ha;
    if (g.zenith) {
        mm.azimuth_valid = false;
        ha.setZero();
        if (g.range > 0.0) {
            ha.row(0) = (g.p_ut_u / g.range).transpose();
        }
    } else {
        ha = jac_Ha(g.p_ut_u);
    }

    const Mat3 hb = jac_Hb(state.pos, earth);
    const Mat3 hc = jac_Hc(state.pos, g.p_bt_e);
    const Mat3 dri = dr_inv(state.pos.lat, state.pos.alt, earth);
    const Mat3 cbu_cnb = g.c_b_u * g.c_n_b;

    const Eigen::Matrix<double, 2, 3> h_pos = ha * cbu_cnb * (hc - g.c_e_n * hb) * dri;
    const Eigen::Matrix<double, 2, 3> h_phi = -ha * cbu_cnb * skew(g.c_e_n * g.p_bt_e);
    const Eigen::Matrix<double, 2, 3> h_theta =
        ha * (skew(cbu_cnb * (g.c_e_n * g.p_bt_e)) - skew(g.c_b_u * calib.lever_bu));

    mm.h.block<2, 3>(0, idx::kPos) = h_pos;
    mm.h.block<2, 3>(0, idx::kAtt) = h_phi;
    mm.h.block<2, 3>(0, idx::kMisalign) = h_theta;
    mm.h(0, idx::kRangeScale) = -g.range;

    mm.h(2, idx::kPos + 2) = 1.0;
    mm.h.block<1, 3>(2, idx::kAtt) = skew(state.att_bn * calib.lever_bd).row(2);
    mm.h(2, idx::kDepthBias) = -1.0;
    return mm;
}

Vec3 innovation(const PredictedObservation& pred, const AcousticFix& fix, double depth_meas) {
    return {pred.range - fix.r, wrap_pi(pred.azimuth - fix.alpha), pred.depth - depth_meas};
}

UpdateResult kalman_update(const ErrorState26& err, const Eigen::MatrixXd& h,
                           const Eigen::MatrixXd& r, const Eigen::VectorXd& z) {
    const Eigen::MatrixXd hp = h * err.P;
    Eigen::MatrixXd s = hp * h.transpose() + r;
    s = 0.5 * (s + s.transpose());

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    const double emin = eig.eigenvalues().minCoeff();
    const double emax = eig.eigenvalues().maxCoeff();
    if (emin <= 0.0 || emax / emin > 1e12) {
        throw IllConditioned("innovation covariance condition " +
                             std::to_string(emin > 0.0 ? emax / emin : -1.0));
    }

    const Eigen::MatrixXd k = s.ldlt().solve(hp).transpose();

    UpdateResult res;
    res.dx = k * (z - h * err.x);
    res.err.x = err.x + res.dx;
    const Mat26 a = Mat26::Identity() - k * h;
    Mat26 p = a * err.P * a.transpose() + k * r * k.transpose();
    res.err.P = 0.5 * (p + p.transpose());
    return res;
}

double reconstruct_timestamp(const AcousticFix& fix) {
    if (fix.tof < 0.0) {
        throw NegativeTof();
    }
    return fix.t0 + fix.tof;
}

FusionFilter::FusionFilter(const NavState& initial, const Mat26& initial_cov,
                           const CalibrationSet& calib, const MeasurementNoise& noise,
                           const ProcessNoiseSpec& process_noise, const EarthModel& earth,
                           const FilterOptions& options)
    : nav_(initial),
      calib_(calib),
      noise_(noise),
      qspec_(process_noise),
      earth_(earth),
      opt_(options),
      last_cov_time_(initial.time) {
    err_.P = initial_cov;
    store_snapshot();
}

void FusionFilter::push_depth(const DepthSample& sample) { depth_buffer_.push_back(sample); }

void FusionFilter::push_fix(const AcousticFix& fix) {
    const double trigger = (opt_.handling == FixHandling::kInOrderOracle)
                               ? reconstruct_timestamp(fix)
                               : fix.t4;
    auto it = std::upper_bound(pending_fixes_.begin(), pending_fixes_.end(), trigger,
                               [this](double t, const AcousticFix& f) {
                                   const double ft = (opt_.handling == FixHandling::kInOrderOracle)
                                                         ? f.t0 + f.tof
                                                         : f.t4;
                                   return t < ft;
                               });
    pending_fixes_.insert(it, fix);
}

void FusionFilter::push_imu(double t_end, const Vec3& raw_gyro_inc, const Vec3& raw_accel_inc,
                            bool cov_boundary) {
    if (t_end <= nav_.time) {
        throw Error("IMU time must advance");
    }
    double cur_t = nav_.time;
    Vec3 gyro_rem = raw_gyro_inc;
    Vec3 accel_rem = raw_accel_inc;

    while (!pending_fixes_.empty()) {
        const AcousticFix fix = pending_fixes_.front();
        const double trigger = (opt_.handling == FixHandling::kInOrderOracle)
                                   ? fix.t0 + fix.tof
                                   : fix.t4;
        if (trigger > t_end) break;
        pending_fixes_.pop_front();

        if (trigger > cur_t) {
            const double frac = (trigger - cur_t) / (t_end - cur_t);
            ImuSegment piece{cur_t, trigger, frac * gyro_rem, frac * accel_rem,
                             cov_boundary && trigger == t_end};
            advance_segment(piece, true);
            gyro_rem -= piece.gyro;
            accel_rem -= piece.accel;
            cur_t = trigger;
        }
        dispatch_fix(fix);
    }

    if (t_end > cur_t) {
        advance_segment({cur_t, t_end, gyro_rem, accel_rem, cov_boundary}, true);
    }
    trim_buffers();
}

void FusionFilter::dispatch_fix(const AcousticFix& fix) {
    if (opt_.handling == FixHandling::kReplayToMeasurement) {
        delayed_update(fix);
        return;
    }
    apply_fix_at_current_time(fix, false);
    applied_fixes_.push_back({nav_.time, fix});
}

void FusionFilter::advance_segment(const ImuSegment& seg, bool record) {
    const double dt = seg.t_end - seg.t_start;
    if (dt <= 0.0) return;
    Vec3 gyro, accel;
    correct_increments(nav_, seg.gyro, seg.accel, dt, gyro, accel);
    nav_ = mechanize_step(nav_, gyro, accel, dt, earth_);
    nav_.time = seg.t_end;
    last_angular_rate_b_ = gyro / dt;
    last_specific_force_b_ = accel / dt;
    if (record) {
        imu_buffer_.push_back(seg);
    }
    if (seg.cov_boundary) {
        propagate_covariance_to(seg.t_end);
        store_snapshot();
    }
}

void FusionFilter::propagate_covariance_to(double t) {
    const double dt = t - last_cov_time_;
    if (dt <= 0.0) return;
    const Mat26 f = error_transition(nav_, earth_, last_specific_force_b_, last_angular_rate_b_);
    const Discretized d = discretize(f, qspec_, dt);
    propagate(err_, d.phi, d.qd, opt_.cov_trace_ceiling);
    last_cov_time_ = t;
}

void FusionFilter::store_snapshot() {
    snapshots_.push_back({nav_.time, nav_, err_.P});
}

std::optional<double> FusionFilter::depth_near(double t) const {
    // Latest sample at or before t; causal and replay-invariant.
    auto it = std::upper_bound(depth_buffer_.begin(), depth_buffer_.end(), t + 1e-9,
                               [](double value, const DepthSample& s) { return value < s.time; });
    if (it == depth_buffer_.begin()) return std::nullopt;
    --it;
    if (t - it->time > opt_.depth_pair_tolerance) return std::nullopt;
    return it->depth;
}

void FusionFilter::apply_fix_at_current_time(const AcousticFix& fix, bool rerun) {
    propagate_covariance_to(nav_.time);

    const MeasurementMatrix mm = assemble_H(nav_, calib_, earth_);
    PredictedObservation pred;
    pred.range = (1.0 + nav_.range_scale_est) * mm.geom.range;
    pred.azimuth = mm.geom.azimuth;
    pred.depth = mm.geom.depth + nav_.depth_bias_est;

    const std::optional<double> depth = depth_near(nav_.time);
    const Vec3 z3 = innovation(pred, fix, depth.value_or(0.0));

    std::vector<int> rows;
    rows.push_back(0);
    if (mm.azimuth_valid) rows.push_back(1);
    if (depth) rows.push_back(2);

    const int m = static_cast<int>(rows.size());
    Eigen::MatrixXd h(m, 26);
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd z(m);
    const Vec3 vars(noise_.var_range, noise_.var_azimuth, noise_.var_depth);
    for (int i = 0; i < m; ++i) {
        h.row(i) = mm.h.row(rows[i]);
        r(i, i) = vars(rows[i]);
        z(i) = z3(rows[i]);
    }

    FusionDiagnostic diag;
    diag.t4 = fix.t4;
    diag.t1 = fix.t0 + fix.tof;
    diag.delta_t = fix.t4 - diag.t1;
    diag.z_range = z3(0);
    diag.z_azimuth = mm.azimuth_valid ? z3(1) : 0.0;
    diag.z_depth = depth ? z3(2) : 0.0;

    bool accepted = true;
    if (opt_.gate_sigma > 0.0) {
        const Eigen::MatrixXd s = h * err_.P * h.transpose() + r;
        for (int i = 0; i < m; ++i) {
            if (z(i) * z(i) > opt_.gate_sigma * opt_.gate_sigma * s(i, i)) {
                accepted = false;
                break;
            }
        }
    }

    if (accepted) {
        try {
            const UpdateResult res = kalman_update(err_, h, r, z);
            nav_ = apply_correction(nav_, res.err.x, earth_);
            err_.P = res.err.P;
            err_.x.setZero();
        } catch (const IllConditioned&) {
            accepted = false;
        }
    }
    if (!accepted && !rerun) {
        ++rejected_fixes_;
    }

    if (!rerun) {
        diag.accepted = accepted;
        diag.est_pos = nav_.pos;
        diag.pos_cov = err_.P.block<3, 3>(idx::kPos, idx::kPos);
        diagnostics_.push_back(diag);
    }
}

void FusionFilter::delayed_update(const AcousticFix& fix) {
    const double t1 = reconstruct_timestamp(fix);
    const double t_resume = nav_.time;

    if (t1 >= t_resume) {
        // Degenerate replay: the measurement epoch is the current epoch.
        apply_fix_at_current_time(fix, false);
        applied_fixes_.push_back({nav_.time, fix});
        return;
    }

    if (snapshots_.empty() || t1 < snapshots_.front().time) {
        ++buffer_underruns_;
        FusionDiagnostic diag;
        diag.t4 = fix.t4;
        diag.t1 = t1;
        diag.delta_t = fix.t4 - t1;
        diag.accepted = false;
        diag.est_pos = nav_.pos;
        diag.pos_cov = err_.P.block<3, 3>(idx::kPos, idx::kPos);
        diagnostics_.push_back(diag);
        return;
    }

    // Restore the last snapshot at or before t1 (closed-left convention).
    auto snap_it = std::upper_bound(
        snapshots_.begin(), snapshots_.end(), t1,
        [](double value, const StateSnapshot& s) { return value < s.time; });
    --snap_it;
    const StateSnapshot snap = *snap_it;
    snapshots_.erase(snap_it + 1, snapshots_.end());

    nav_ = snap.nav;
    err_.P = snap.cov;
    err_.x.setZero();
    last_cov_time_ = snap.time;

    // Updates to re-run, merged with the new fix at its measurement epoch.
    struct Event {
        double t = 0.0;
        AcousticFix fix;
        bool rerun = false;
    };
    std::vector<Event> events;
    for (const AppliedFix& a : applied_fixes_) {
        if (a.t_apply >= snap.time && a.t_apply <= t_resume) {
            events.push_back({a.t_apply, a.fix, true});
        }
    }
    events.push_back({t1, fix, false});
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });

    size_t i = 0;
    while (i < imu_buffer_.size() && imu_buffer_[i].t_end <= snap.time) ++i;
    size_t e = 0;

    auto fire_events_at = [&](double t) {
        while (e < events.size() && events[e].t <= t + 1e-15) {
            apply_fix_at_current_time(events[e].fix, events[e].rerun);
            ++e;
        }
    };

    fire_events_at(nav_.time);
    for (; i < imu_buffer_.size(); ++i) {
        if (e < events.size() && events[e].t < imu_buffer_[i].t_end - 1e-15) {
            // Split the stored segment at the event epoch so future replays
            // renew the identical piece sequence.
            ImuSegment seg = imu_buffer_[i];
            const double frac = (events[e].t - seg.t_start) / (seg.t_end - seg.t_start);
            ImuSegment first{seg.t_start, events[e].t, frac * seg.gyro, frac * seg.accel, false};
            ImuSegment second{events[e].t, seg.t_end, seg.gyro - first.gyro,
                              seg.accel - first.accel, seg.cov_boundary};
            imu_buffer_[i] = first;
            imu_buffer_.insert(imu_buffer_.begin() + static_cast<long>(i) + 1, second);
        }
        advance_segment(imu_buffer_[i], false);
        fire_events_at(nav_.time);
    }
    fire_events_at(t_resume);

    const auto pos = std::upper_bound(
        applied_fixes_.begin(), applied_fixes_.end(), t1,
        [](double value, const AppliedFix& a) { return value < a.t_apply; });
    applied_fixes_.insert(pos, {t1, fix});
}

void FusionFilter::trim_buffers() {
    const double cutoff = nav_.time - opt_.buffer_span;
    while (snapshots_.size() >= 2 && snapshots_[1].time <= cutoff) {
        snapshots_.pop_front();
    }
    const double oldest = snapshots_.front().time;
    while (!imu_buffer_.empty() && imu_buffer_.front().t_end <= oldest) {
        imu_buffer_.pop_front();
    }
    while (depth_buffer_.size() > 1 && depth_buffer_.front().time < cutoff - 1.0) {
        depth_buffer_.pop_front();
    }
    while (!applied_fixes_.empty() && applied_fixes_.front().t_apply < oldest) {
        applied_fixes_.erase(applied_fixes_.begin());
    }
}

namespace {

// Effective prediction the filter compares against measurements: the
// geometric triple with the accumulated scale/bias estimates applied.
PredictedObservation effective_prediction(const NavState& state, const CalibrationSet& calib,
                                          const EarthModel& earth) {
    const ObservationGeometry g = observation_geometry(state, calib, earth);
    return {(1.0 + state.range_scale_est) * g.range, g.azimuth,
            g.depth + state.depth_bias_est};
}

double uniform_in(double lo, double hi, std::uint64_t seed, std::uint64_t stream,
                  std::uint64_t counter) {
    return lo + (hi - lo) * rng::uniform(seed, stream, counter);
}

}  // namespace

JacobianCheckReport jacobian_check(int samples, std::uint64_t seed) {
    JacobianCheckReport rep;
    rep.samples = samples;
    const EarthModel earth = EarthModel::wgs84();

    for (int n = 0; n < samples; ++n) {
        const std::uint64_t c0 = static_cast<std::uint64_t>(n) * 64;
        auto u = [&](int i, double lo, double hi) {
            return uniform_in(lo, hi, seed, 101, c0 + static_cast<std::uint64_t>(i));
        };

        NavState state;
        state.pos = GeodeticPosition(u(0, -80.0, 80.0) * kDegToRad,
                                     u(1, -179.0, 179.0) * kDegToRad, u(2, -900.0, 50.0));
        state.vel_ned = Vec3(u(3, -5, 5), u(4, -5, 5), u(5, -2, 2));
        state.att_bn = euler_to_dcm(u(6, -0.3, 0.3), u(7, -0.3, 0.3), u(8, -M_PI, M_PI));
        state.misalign_est = Vec3(u(9, -2e-3, 2e-3), u(10, -2e-3, 2e-3), u(11, -2e-3, 2e-3));
        state.range_scale_est = u(12, -2e-3, 2e-3);
        state.depth_bias_est = u(13, -0.3, 0.3);

        CalibrationSet calib;
        calib.lever_bu = Vec3(u(14, -1, 1), u(15, -1, 1), u(16, -1, 1));
        calib.lever_bd = Vec3(u(17, -1, 1), u(18, -1, 1), u(19, -1, 1));
        calib.c_b_u_nominal = euler_to_dcm(u(20, -0.05, 0.05), u(21, -0.05, 0.05),
                                           u(22, -M_PI, M_PI));
        const double north = u(23, 100, 800) * (u(24, 0, 1) < 0.5 ? -1.0 : 1.0);
        const double east = u(25, 100, 800) * (u(26, 0, 1) < 0.5 ? -1.0 : 1.0);
        const double up = u(27, -400, 400);
        const auto rad = radii_of_curvature(state.pos.lat, earth);
        calib.beacon = GeodeticPosition(
            state.pos.lat + north / (rad.rm + state.pos.alt),
            state.pos.lon + east / ((rad.rn + state.pos.alt) * std::cos(state.pos.lat)),
            state.pos.alt + up);

        // --- H_a against central differences of (r, alpha) ---
        const ObservationGeometry geom = observation_geometry(state, calib, earth);
        const Eigen::Matrix<double, 2, 3> ha = jac_Ha(geom.p_ut_u);
        const double eps_p = 1e-3;
        Eigen::Matrix<double, 2, 3> ha_fd;
        for (int j = 0; j < 3; ++j) {
            Vec3 pp = geom.p_ut_u, pm = geom.p_ut_u;
            pp(j) += eps_p;
            pm(j) -= eps_p;
            ha_fd(0, j) = (pp.norm() - pm.norm()) / (2 * eps_p);
            ha_fd(1, j) = wrap_pi(std::atan2(pp.y(), pp.x()) - std::atan2(pm.y(), pm.x())) /
                          (2 * eps_p);
        }
        rep.max_rel_ha = std::max(rep.max_rel_ha, (ha - ha_fd).cwiseAbs().maxCoeff() /
                                                      ha.cwiseAbs().maxCoeff());

        // --- H_b against the frozen-radii conversion it differentiates ---
        const Mat3 hb = jac_Hb(state.pos, earth);
        const auto ecef_frozen = [&](double lat, double lon, double alt) {
            const double zr = rad.rm + alt;
            return Vec3((rad.rn + alt) * std::cos(lat) * std::cos(lon),
                        (rad.rn + alt) * std::cos(lat) * std::sin(lon), zr * std::sin(lat));
        };
        Mat3 hb_fd;
        const double eps_a = 1e-7, eps_h = 1e-2;
        hb_fd.col(0) = (ecef_frozen(state.pos.lat + eps_a, state.pos.lon, state.pos.alt) -
                        ecef_frozen(state.pos.lat - eps_a, state.pos.lon, state.pos.alt)) /
                       (2 * eps_a);
        hb_fd.col(1) = (ecef_frozen(state.pos.lat, state.pos.lon + eps_a, state.pos.alt) -
                        ecef_frozen(state.pos.lat, state.pos.lon - eps_a, state.pos.alt)) /
                       (2 * eps_a);
        hb_fd.col(2) = (ecef_frozen(state.pos.lat, state.pos.lon, state.pos.alt + eps_h) -
                        ecef_frozen(state.pos.lat, state.pos.lon, state.pos.alt - eps_h)) /
                       (2 * eps_h);
        rep.max_rel_hb = std::max(rep.max_rel_hb, (hb - hb_fd).cwiseAbs().maxCoeff() /
                                                      hb.cwiseAbs().maxCoeff());

        // Documented residual: the printed partials neglect the curvature
        // radii derivatives of the full conversion.
        Mat3 hb_full;
        const auto ecef_full = [&](double lat, double lon, double alt) {
            return geodetic_to_ecef(GeodeticPosition(lat, lon, alt), earth);
        };
        hb_full.col(0) = (ecef_full(state.pos.lat + eps_a, state.pos.lon, state.pos.alt) -
                          ecef_full(state.pos.lat - eps_a, state.pos.lon, state.pos.alt)) /
                         (2 * eps_a);
        hb_full.col(1) = (ecef_full(state.pos.lat, state.pos.lon + eps_a, state.pos.alt) -
                          ecef_full(state.pos.lat, state.pos.lon - eps_a, state.pos.alt)) /
                         (2 * eps_a);
        hb_full.col(2) = (ecef_full(state.pos.lat, state.pos.lon, state.pos.alt + eps_h) -
                          ecef_full(state.pos.lat, state.pos.lon, state.pos.alt - eps_h)) /
                         (2 * eps_h);
        rep.hb_vs_full_formula =
            std::max(rep.hb_vs_full_formula,
                     (hb - hb_full).cwiseAbs().maxCoeff() / hb_full.cwiseAbs().maxCoeff());

        // --- H_c against the DCM error model, column by column ---
        const Mat3 hc = jac_Hc(state.pos, geom.p_bt_e);
        Mat3 hc_fd = Mat3::Zero();
        const double eps_c = 1e-6;
        hc_fd.col(0) = dcm_e_to_n_error(state.pos.lat, state.pos.lon, eps_c, 0.0) *
                       geom.p_bt_e / eps_c;
        hc_fd.col(1) = dcm_e_to_n_error(state.pos.lat, state.pos.lon, 0.0, eps_c) *
                       geom.p_bt_e / eps_c;
        rep.max_rel_hc = std::max(rep.max_rel_hc, (hc - hc_fd).cwiseAbs().maxCoeff() /
                                                      hc.cwiseAbs().maxCoeff());

        // --- assembled H end to end through state injection ---
        const MeasurementMatrix mm = assemble_H(state, calib, earth);
        Vec26 eps_ch = Vec26::Zero();
        eps_ch.segment<3>(idx::kPos).setConstant(1e-3);
        eps_ch.segment<3>(idx::kVel).setConstant(1e-3);
        eps_ch.segment<3>(idx::kAtt).setConstant(1e-6);
        eps_ch.segment<3>(idx::kGyroBias).setConstant(1e-8);
        eps_ch.segment<3>(idx::kAccelBias).setConstant(1e-6);
        eps_ch.segment<3>(idx::kGyroScale).setConstant(1e-6);
        eps_ch.segment<3>(idx::kAccelScale).setConstant(1e-6);
        eps_ch.segment<3>(idx::kMisalign).setConstant(1e-6);
        eps_ch(idx::kRangeScale) = 1e-6;
        eps_ch(idx::kDepthBias) = 1e-4;

        for (int ch = 0; ch < idx::kStates; ++ch) {
            Vec26 dx = Vec26::Zero();
            dx(ch) = eps_ch(ch);
            const NavState plus = apply_correction(state, -dx, earth);
            const NavState minus = apply_correction(state, dx, earth);
            const PredictedObservation pp = effective_prediction(plus, calib, earth);
            const PredictedObservation pmn = effective_prediction(minus, calib, earth);
            Vec3 fd;
            fd << (pp.range - pmn.range), wrap_pi(pp.azimuth - pmn.azimuth),
                (pp.depth - pmn.depth);
            fd /= 2.0 * eps_ch(ch);
            const Vec3 col = mm.h.col(ch);
            const double err = (fd - col).norm();
            const double scale = col.norm() + 1e-10 * (1.0 + geom.range);
            rep.max_rel_h_full = std::max(rep.max_rel_h_full, err / scale);
        }
    }

    rep.pass = rep.max_rel_ha < 1e-6 && rep.max_rel_hb < 1e-5 && rep.max_rel_hc < 1e-6 &&
               rep.max_rel_h_full < 1e-4;
    return rep;
}

}  // namespace delaynav
