#include "delaynav/sensors.hpp"

#include <cmath>

#include "delaynav/csv.hpp"
#include "delaynav/errors.hpp"
#include "delaynav/rng.hpp"

namespace delaynav {

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::kUsbl: return "USBL";
        case SystemKind::kIusbl: return "iUSBL";
        case SystemKind::kPiusbl: return "piUSBL";
    }
    return "?";
}

SystemKind system_kind_from_string(const std::string& name) {
    if (name == "USBL") return SystemKind::kUsbl;
    if (name == "iUSBL") return SystemKind::kIusbl;
    if (name == "piUSBL") return SystemKind::kPiusbl;
    throw ConfigError("unknown system kind: " + name);
}

std::vector<ImuIncrement> corrupt_imu(const std::vector<ImuIncrement>& ideal,
                                      const ImuErrorSpec& spec, std::uint64_t seed) {
    std::vector<ImuIncrement> out = ideal;
    for (size_t k = 0; k < out.size(); ++k) {
        const double dt = out[k].t_end - out[k].t_start;
        const double gyro_sigma = spec.gyro_arw * std::sqrt(dt);
        const double accel_sigma = spec.accel_vrw * std::sqrt(dt);
        for (int a = 0; a < 3; ++a) {
            out[k].gyro[a] = (1.0 + spec.gyro_scale) * ideal[k].gyro[a] + spec.gyro_bias * dt +
                             gyro_sigma * rng::normal(seed, rng::kGyroNoise, 3 * k + a);
            out[k].accel[a] = (1.0 + spec.accel_scale) * ideal[k].accel[a] + spec.accel_bias * dt +
                              accel_sigma * rng::normal(seed, rng::kAccelNoise, 3 * k + a);
        }
    }
    return out;
}

UGeometry true_geometry(const GeodeticPosition& pos, const Mat3& att_bn,
                        const GeodeticPosition& beacon, const Vec3& lever_bu,
                        const Mat3& c_b_u, const EarthModel& earth) {
    const Vec3 p_bt_e = geodetic_to_ecef(beacon, earth) - geodetic_to_ecef(pos, earth);
    const Mat3 c_e_n = dcm_e_to_n(pos.lat, pos.lon);
    const Mat3 c_n_b = att_bn.transpose();
    UGeometry g;
    g.p_ut_u = c_b_u * (c_n_b * (c_e_n * p_bt_e)) - c_b_u * lever_bu;
    g.r = g.p_ut_u.norm();
    const double horiz2 = g.p_ut_u.x() * g.p_ut_u.x() + g.p_ut_u.y() * g.p_ut_u.y();
    if (horiz2 < 1e-12) {
        throw ZenithSingularity();
    }
    g.alpha = std::atan2(g.p_ut_u.y(), g.p_ut_u.x());
    g.h_u = g.p_ut_u.z();
    return g;
}

DelayTimes delay_model(const DelayModel& model, double t0, double tof,
                       const AcousticSpec& spec, double processing_delay) {
    DelayTimes t;
    t.t1 = t0 + tof;
    switch (model.kind) {
        case SystemKind::kPiusbl:
            // Fixed sampling window: processing starts when the window closes,
            // so the delay shrinks as the signal arrives later.
            t.t3 = t0 + spec.sampling_window;
            t.t4 = t.t3 + processing_delay;
            break;
        case SystemKind::kIusbl:
            // Two-way interrogation: one extra one-way travel before the
            // solution exists on board.
            t.t3 = t.t1 + tof;
            t.t4 = t.t3 + processing_delay;
            break;
        case SystemKind::kUsbl:
            // As iUSBL plus relaying the topside solution back to the vehicle.
            t.t3 = t.t1 + tof;
            t.t4 = t.t3 + processing_delay + model.comm_tof_factor * tof + model.comm_fixed;
            break;
    }
    return t;
}

double draw_processing_delay(const AcousticSpec& spec, std::uint64_t seed,
                             std::uint64_t fix_index) {
    return spec.processing_delay_mean +
           spec.processing_delay_jitter * rng::symmetric(seed, rng::kProcessingJitter, fix_index);
}

AcousticFix measure_acoustic(const UGeometry& truth, double t0, double tof,
                             const AcousticSpec& spec, const DelayModel& model,
                             double range_scale_true, std::uint64_t seed,
                             std::uint64_t fix_index) {
    if (tof < 0.0) throw NegativeTof();
    if (tof > spec.sampling_window - spec.signal_length) {
        throw OutOfWindow("tof " + std::to_string(tof) + " exceeds sampling window");
    }
    const double proc = draw_processing_delay(spec, seed, fix_index);
    const DelayTimes times = delay_model(model, t0, tof, spec, proc);

    AcousticFix fix;
    fix.kind = model.kind;
    fix.t0 = t0;
    fix.tof = tof;
    fix.t1 = times.t1;
    fix.t3 = times.t3;
    fix.t4 = times.t4;
    const double sigma_r = spec.range_scale_sigma * truth.r + spec.range_noise_floor;
    fix.r = (1.0 + range_scale_true) * truth.r +
            sigma_r * rng::normal(seed, rng::kAcousticRange, fix_index);
    fix.alpha = wrap_pi(truth.alpha +
                        spec.azimuth_sigma * rng::normal(seed, rng::kAcousticAzimuth, fix_index));
    return fix;
}

DepthSample measure_depth(const GeodeticPosition& pos, const Mat3& att_bn, double time,
                          double sigma, const Vec3& lever_bd, std::uint64_t seed,
                          std::uint64_t sample_index) {
    DepthSample s;
    s.time = time;
    s.depth = -pos.alt + (att_bn * lever_bd).z() +
              sigma * rng::normal(seed, rng::kDepthNoise, sample_index);
    return s;
}

double solve_arrival_tof(const std::vector<TrajectorySample>& traj,
                         const GeodeticPosition& beacon, const Vec3& lever_bu,
                         const Mat3& c_b_u, double t0, double sound_speed,
                         const EarthModel& earth) {
    const TrajectorySample at_t0 = interpolate(traj, t0);
    double tof = true_geometry(at_t0.pos, at_t0.att_bn, beacon, lever_bu, c_b_u, earth).r /
                 sound_speed;
    // Fixed point t1 = t0 + r(t1)/c; contraction factor is v/c.
    for (int i = 0; i < 4; ++i) {
        const TrajectorySample s = interpolate(traj, t0 + tof);
        tof = true_geometry(s.pos, s.att_bn, beacon, lever_bu, c_b_u, earth).r / sound_speed;
    }
    return tof;
}

void write_fix_csv(const std::string& path, const std::vector<AcousticFix>& fixes) {
    CsvWriter w(path);
    w.header("t0,t1,t3,t4,r,alpha_rad,kind");
    for (const auto& f : fixes) {
        w.row({CsvWriter::num(f.t0), CsvWriter::num(f.t1), CsvWriter::num(f.t3),
               CsvWriter::num(f.t4), CsvWriter::num(f.r), CsvWriter::num(f.alpha),
               to_string(f.kind)});
    }
}

std::vector<AcousticFix> read_fix_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header != "t0,t1,t3,t4,r,alpha_rad,kind") {
        throw IoError("unexpected fix header in " + path);
    }
    std::vector<AcousticFix> fixes;
    fixes.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        if (r.size() != 7) throw IoError("bad fix row in " + path);
        AcousticFix f;
        f.t0 = std::stod(r[0]);
        f.t1 = std::stod(r[1]);
        f.t3 = std::stod(r[2]);
        f.t4 = std::stod(r[3]);
        f.r = std::stod(r[4]);
        f.alpha = std::stod(r[5]);
        f.kind = system_kind_from_string(r[6]);
        f.tof = f.t1 - f.t0;
        fixes.push_back(f);
    }
    return fixes;
}

}  // namespace delaynav
