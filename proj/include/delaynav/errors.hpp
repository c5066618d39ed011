#ifndef DELAYNAV_ERRORS_HPP
#define DELAYNAV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace delaynav {

// All failure modes surfaced by the library. Callers that need to keep
// running (the filter hot path, the Monte Carlo harness) catch the specific
// type; everything else lets them escalate.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PolarSingularity : Error {
    explicit PolarSingularity(const std::string& msg = "latitude too close to a pole")
        : Error(msg) {}
};

struct ZenithSingularity : Error {
    explicit ZenithSingularity(const std::string& msg = "beacon at zenith/nadir, azimuth undefined")
        : Error(msg) {}
};

struct NonTerminating : Error {
    explicit NonTerminating(const std::string& msg) : Error(msg) {}
};

struct NonUniformRate : Error {
    explicit NonUniformRate(const std::string& msg) : Error(msg) {}
};

struct OutOfWindow : Error {
    explicit OutOfWindow(const std::string& msg) : Error(msg) {}
};

struct NegativeTof : Error {
    explicit NegativeTof(const std::string& msg = "time of flight is negative") : Error(msg) {}
};

struct BufferUnderrun : Error {
    explicit BufferUnderrun(const std::string& msg) : Error(msg) {}
};

struct CovarianceBlowup : Error {
    explicit CovarianceBlowup(const std::string& msg) : Error(msg) {}
};

struct IllConditioned : Error {
    explicit IllConditioned(const std::string& msg) : Error(msg) {}
};

struct EmptyOverlap : Error {
    explicit EmptyOverlap(const std::string& msg = "series do not overlap in time") : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace delaynav

#endif  // DELAYNAV_ERRORS_HPP
