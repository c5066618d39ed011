#include "delaynav/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "delaynav/csv.hpp"
#include "delaynav/errors.hpp"
#include "delaynav/ins.hpp"

namespace delaynav {

namespace {

Vec3 helix_velocity(const HelixParams& p, double t) {
    double speed = p.target_speed;
    if (p.accel_duration > 0.0 && t < p.accel_duration) {
        speed = p.target_speed * 0.5 * (1.0 - std::cos(M_PI * t / p.accel_duration));
    }
    const double heading = p.turn_rate * t;
    return {speed * std::cos(p.pitch) * std::cos(heading),
            speed * std::cos(p.pitch) * std::sin(heading),
            -speed * std::sin(p.pitch)};
}

// Increments that reproduce the step from a to b through mechanize_step.
void invert_step(const TrajectorySample& a, const TrajectorySample& b, double dt,
                 const EarthModel& earth, Vec3& gyro_inc, Vec3& accel_inc) {
    const FrameRates rates = frame_rates(a.pos, a.vel_ned, earth);
    const Vec3 zeta = (rates.omega_ie_n + rates.omega_en_n) * dt;

    gyro_inc = dcm_to_rotvec(a.att_bn.transpose() * rotvec_to_dcm(zeta) * b.att_bn);

    const Vec3 dv_gc =
        (rates.gravity_n - (2.0 * rates.omega_ie_n + rates.omega_en_n).cross(a.vel_ned)) * dt;
    const Mat3 a_mat = (Mat3::Identity() - 0.5 * skew(zeta)) * a.att_bn;
    const Vec3 u = a_mat.partialPivLu().solve(b.vel_ned - a.vel_ned - dv_gc);
    accel_inc = (Mat3::Identity() + 0.5 * skew(gyro_inc)).partialPivLu().solve(u);
}

void fill_ideal_rates(std::vector<TrajectorySample>& traj, const EarthModel& earth) {
    if (traj.size() < 2) return;
    for (size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dt = traj[k + 1].time - traj[k].time;
        Vec3 g, a;
        invert_step(traj[k], traj[k + 1], dt, earth, g, a);
        traj[k].angular_rate_b = g / dt;
        traj[k].specific_force_b = a / dt;
    }
    traj.back().angular_rate_b = traj[traj.size() - 2].angular_rate_b;
    traj.back().specific_force_b = traj[traj.size() - 2].specific_force_b;
}

}  // namespace

std::vector<TrajectorySample> generate_helix(const HelixParams& p, const EarthModel& earth) {
    if (p.final_depth <= 0.0) throw NonTerminating("final_depth must be positive");
    if (p.imu_rate <= 0.0) throw NonTerminating("imu_rate must be positive");
    if (p.target_speed < 0.0) throw NonTerminating("target_speed must be non-negative");

    const double start_depth = -p.start.alt;
    const bool needs_descent = p.final_depth > start_depth;
    const bool can_descend = p.pitch < 0.0 && p.target_speed > 0.0;
    if (needs_descent && !can_descend && !std::isfinite(p.max_duration)) {
        throw NonTerminating("profile cannot reach final_depth: pitch >= 0 or zero speed");
    }

    const double dt = 1.0 / p.imu_rate;
    std::vector<TrajectorySample> traj;
    TrajectorySample s;
    s.time = 0.0;
    s.pos = p.start;
    s.vel_ned = helix_velocity(p, 0.0);
    s.att_bn = euler_to_dcm(0.0, p.pitch, 0.0);
    traj.push_back(s);

    constexpr double kHardCap = 48.0 * 3600.0;
    for (size_t k = 1;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t > p.max_duration + 0.5 * dt) break;
        if (t > kHardCap) throw NonTerminating("trajectory exceeded 48 h without termination");

        TrajectorySample next;
        next.time = t;
        next.vel_ned = helix_velocity(p, t);
        next.pos = integrate_position(traj.back().pos, traj.back().vel_ned, next.vel_ned, dt, earth);
        next.att_bn = euler_to_dcm(0.0, p.pitch, p.turn_rate * t);
        traj.push_back(next);

        if (needs_descent && -next.pos.alt >= p.final_depth) break;
    }

    fill_ideal_rates(traj, earth);
    return traj;
}

std::vector<ImuIncrement> ideal_imu(const std::vector<TrajectorySample>& traj,
                                    const EarthModel& earth) {
    if (traj.size() < 2) throw NonUniformRate("need at least two samples");
    const double dt0 = traj[1].time - traj[0].time;
    std::vector<ImuIncrement> out;
    out.reserve(traj.size() - 1);
    for (size_t k = 0; k + 1 < traj.size(); ++k) {
        const double dt = traj[k + 1].time - traj[k].time;
        if (std::abs(dt - dt0) > 1e-6) {
            throw NonUniformRate("non-uniform sample spacing at t=" +
                                 std::to_string(traj[k].time));
        }
        ImuIncrement inc;
        inc.t_start = traj[k].time;
        inc.t_end = traj[k + 1].time;
        invert_step(traj[k], traj[k + 1], dt, earth, inc.gyro, inc.accel);
        out.push_back(inc);
    }
    return out;
}

TrajectorySample interpolate(const std::vector<TrajectorySample>& traj, double t) {
    if (traj.empty()) throw Error("interpolate on empty trajectory");
    if (t <= traj.front().time) return traj.front();
    if (t >= traj.back().time) return traj.back();
    const auto it = std::upper_bound(
        traj.begin(), traj.end(), t,
        [](double value, const TrajectorySample& s) { return value < s.time; });
    const TrajectorySample& b = *it;
    const TrajectorySample& a = *(it - 1);
    const double f = (t - a.time) / (b.time - a.time);

    TrajectorySample out;
    out.time = t;
    out.pos = GeodeticPosition(a.pos.lat + f * (b.pos.lat - a.pos.lat),
                               a.pos.lon + f * wrap_pi(b.pos.lon - a.pos.lon),
                               a.pos.alt + f * (b.pos.alt - a.pos.alt));
    out.vel_ned = a.vel_ned + f * (b.vel_ned - a.vel_ned);
    out.att_bn = orthonormalize(a.att_bn + f * (b.att_bn - a.att_bn));
    out.specific_force_b = a.specific_force_b + f * (b.specific_force_b - a.specific_force_b);
    out.angular_rate_b = a.angular_rate_b + f * (b.angular_rate_b - a.angular_rate_b);
    return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectorySample>& traj) {
    CsvWriter w(path);
    w.header("t,lat_deg,lon_deg,alt_m,vn,ve,vd,roll_deg,pitch_deg,yaw_deg");
    for (const auto& s : traj) {
        const Vec3 rpy = dcm_to_euler(s.att_bn);
        w.row({CsvWriter::num(s.time), CsvWriter::num(s.pos.lat * kRadToDeg),
               CsvWriter::num(s.pos.lon * kRadToDeg), CsvWriter::num(s.pos.alt),
               CsvWriter::num(s.vel_ned.x()), CsvWriter::num(s.vel_ned.y()),
               CsvWriter::num(s.vel_ned.z()), CsvWriter::num(rpy.x() * kRadToDeg),
               CsvWriter::num(rpy.y() * kRadToDeg), CsvWriter::num(rpy.z() * kRadToDeg)});
    }
}

std::vector<TrajectorySample> read_trajectory_csv(const std::string& path,
                                                  const EarthModel& earth) {
    const CsvTable table = read_csv(path);
    if (table.header != "t,lat_deg,lon_deg,alt_m,vn,ve,vd,roll_deg,pitch_deg,yaw_deg") {
        throw IoError("unexpected trajectory header in " + path);
    }
    std::vector<TrajectorySample> traj;
    traj.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        if (r.size() != 10) throw IoError("bad trajectory row in " + path);
        TrajectorySample s;
        s.time = std::stod(r[0]);
        s.pos = GeodeticPosition::from_degrees(std::stod(r[1]), std::stod(r[2]), std::stod(r[3]));
        s.vel_ned = Vec3(std::stod(r[4]), std::stod(r[5]), std::stod(r[6]));
        s.att_bn = euler_to_dcm(std::stod(r[7]) * kDegToRad, std::stod(r[8]) * kDegToRad,
                                std::stod(r[9]) * kDegToRad);
        traj.push_back(s);
    }
    fill_ideal_rates(traj, earth);
    return traj;
}

}  // namespace delaynav
