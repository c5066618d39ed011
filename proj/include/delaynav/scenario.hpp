#ifndef DELAYNAV_SCENARIO_HPP
#define DELAYNAV_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaynav/fusion.hpp"
#include "delaynav/trajectory.hpp"

namespace delaynav {

/// The four system configurations compared in the study.
enum class Variant { kUsbl, kIusbl, kPiusbl, kPiusblComp };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

/// One navigation solution sample for metric computation and export.
struct NavPoint {
    double t = 0.0;
    GeodeticPosition pos;
    Vec3 vel_ned = Vec3::Zero();
    Vec3 euler = Vec3::Zero();  // roll, pitch, yaw
    double trace_p = 0.0;
};
using NavSeries = std::vector<NavPoint>;

/// Declarative scenario description (config schema 1).
struct ScenarioConfig {
    std::optional<HelixParams> helix;  // one of helix / trajectory_csv
    std::string trajectory_csv;

    double imu_rate = 200.0;  // Hz
    ImuErrorSpec imu;
    AcousticSpec acoustic;
    DelayModel usbl_delay;  // comm parameters for the USBL variant
    double depth_sigma = 0.1;  // m
    double depth_rate = 10.0;  // Hz
    CalibrationSet calib;
    double misalign_sigma = 0.1 * kDegToRad;  // per-axis truth draw

    MeasurementNoise meas_noise;
    double gate_sigma = 0.0;
    double cov_rate = 20.0;   // Hz, covariance propagation cadence
    double buffer_span = 5.0; // s

    std::vector<Variant> variants;
    int runs = 50;
    std::uint64_t seed = 1;
    EarthModel earth;

    /// The simulation study scenario: helical descent from (30 deg, 120 deg, 0 m)
    /// at -15 deg pitch to 470 m depth, beacon 250 m north / 250 m east,
    /// Table-spec sensors.
    static ScenarioConfig paper_scenario();

    /// Parse and validate a schema-1 JSON document. Throws ConfigError with
    /// field-level messages.
    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_json_file(const std::string& path);
};

/// Position-error metrics over one run (NED projection plus Euclidean norm).
struct RunMetrics {
    double rmse_n = 0.0, rmse_e = 0.0, rmse_d = 0.0;
    double maxerr_n = 0.0, maxerr_e = 0.0, maxerr_d = 0.0;
    double rmse_3d = 0.0, maxerr_3d = 0.0;
    // Delay series summary
    double delay_mean = 0.0, delay_min = 0.0, delay_max = 0.0;
    double delay_slope = 0.0;  // least-squares d(delta_t)/d(range), s/m
};

struct ErrorPoint {
    double t = 0.0;
    double e_n = 0.0, e_e = 0.0, e_d = 0.0;
};

struct DelayPoint {
    double range = 0.0;
    double delta_t = 0.0;
};

struct DiagnosticRow {
    FusionDiagnostic d;
    double nees = 0.0;
};

struct VariantResult {
    Variant variant = Variant::kPiusbl;
    std::vector<RunMetrics> runs;
    RunMetrics median;  // per-field median over runs
    double mean_nees = 0.0;
    // First-run series for figure-style exports
    std::vector<ErrorPoint> errors;
    std::vector<DelayPoint> delays;
    std::vector<DiagnosticRow> diagnostics;
    int buffer_underruns = 0;
    int rejected_fixes = 0;
};

struct ScenarioResult {
    std::vector<VariantResult> variants;
};

/// Run the full Monte Carlo study. Each (run, variant) cell consumes
/// identical truth and sensor noise streams; cells execute in parallel up to
/// DELAYNAV_THREADS.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Per-axis and Euclidean RMSE/MAXERR of est against truth, with est
/// linearly interpolated to the truth epochs. Throws EmptyOverlap.
RunMetrics compute_metrics(const NavSeries& est, const NavSeries& truth);

/// Serialize metrics to a canonical JSON document.
std::string metrics_to_json(const ScenarioResult& result);
ScenarioResult metrics_from_json(const std::string& text);

/// Write metrics.json, errors_<variant>.csv, delays_<variant>.csv and
/// diagnostics_<variant>.csv under out_dir. Throws IoError.
void emit_report(const ScenarioResult& result, const std::string& out_dir);

/// Nav series CSV: t,lat,lon,alt,vn,ve,vd,roll,pitch,yaw,trace_P
/// (angles in degrees at this I/O boundary).
void write_nav_series_csv(const std::string& path, const NavSeries& series);
NavSeries read_nav_series_csv(const std::string& path);

/// Truth trajectory resampled into a NavSeries at the given rate.
NavSeries truth_series(const std::vector<TrajectorySample>& traj, double rate_hz);

}  // namespace delaynav

#endif  // DELAYNAV_SCENARIO_HPP
