#ifndef SSICAST_COMMON_HPP
#define SSICAST_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssicast {

/// Sentinel for absent samples. Encoded as -1.0e30 in files and rasters;
/// anything at or below kMissingThreshold is treated as missing so the
/// f32 <-> f64 round trip cannot resurrect a sample.
inline constexpr float kMissingValue = -1.0e30f;
inline constexpr double kMissingThreshold = -1.0e29;

inline bool is_missing(double v) { return !(v > kMissingThreshold); }

/// Thrown on malformed file headers and unknown on-disk layouts.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a payload ends early; carries the byte offset of the
/// first missing byte.
class TruncationError : public FormatError {
public:
    TruncationError(const std::string& what, std::size_t offset)
        : FormatError(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Thrown when two stacks that must share grid and time axis do not.
class AlignmentError : public std::runtime_error {
public:
    explicit AlignmentError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a series is too short to build the requested windows.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when optimization produces non-finite losses and damping
/// escalation cannot recover.
class TrainingDivergedError : public std::runtime_error {
public:
    explicit TrainingDivergedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ssicast

#endif
