#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pg {

using ObjectId = int;
constexpr ObjectId kNoObject = -1;

enum class PrimitiveKind : std::uint8_t { Push, Grasp };

inline const char* to_string(PrimitiveKind k) {
    return k == PrimitiveKind::Push ? "push" : "grasp";
}

/// Discrete action on the observation grid: primitive, rotation index
/// k in [0,16) (angle k*22.5 degrees) and the executed cell.
struct Action {
    PrimitiveKind kind = PrimitiveKind::Grasp;
    int rotation = 0;
    int row = 0;
    int col = 0;

    bool operator==(const Action&) const = default;
};

constexpr int kNumRotations = 16;
constexpr double kRotationStepDeg = 22.5;

/// Row-major H x W grid. Row 0 is the y-min edge of the workspace,
/// column 0 the x-min edge.
template <typename T>
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int r, int c, T fill = T{}) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    T& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const T& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    bool in_bounds(int r, int c) const { return r >= 0 && r < rows && c >= 0 && c < cols; }
    size_t size() const { return data.size(); }
    bool operator==(const Grid&) const = default;
};

using GridD = Grid<double>;
using GridU8 = Grid<std::uint8_t>;

/// Mapping between grid cells and workspace coordinates (meters).
/// Cell centers sit at origin + (index + 0.5) * resolution.
struct GridFrame {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double resolution = 0.01;
    int cells = 64;

    double extent() const { return resolution * cells; }
    double max_x() const { return origin_x + extent(); }
    double max_y() const { return origin_y + extent(); }
    double cell_x(int col) const { return origin_x + (col + 0.5) * resolution; }
    double cell_y(int row) const { return origin_y + (row + 0.5) * resolution; }
    int col_of(double x) const { return static_cast<int>((x - origin_x) / resolution); }
    int row_of(double y) const { return static_cast<int>((y - origin_y) / resolution); }
    bool operator==(const GridFrame&) const = default;
};

enum class ErrorCode {
    ParseError,
    PlacementExhausted,
    EmptyMask,
    ShapeMismatch,
    NonSquareGrid,
    VersionMismatch,
    CorruptFile,
    NonFiniteLoss,
    EmptyBuffer,
    EpisodeNotFound,
    RelabelOnGoal,
    CheckpointNotFound,
    IoError,
    UsageError,
    Internal,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError: return "PARSE-ERROR";
        case ErrorCode::PlacementExhausted: return "PLACEMENT-EXHAUSTED";
        case ErrorCode::EmptyMask: return "EMPTY-MASK";
        case ErrorCode::ShapeMismatch: return "SHAPE-MISMATCH";
        case ErrorCode::NonSquareGrid: return "NON-SQUARE-GRID";
        case ErrorCode::VersionMismatch: return "VERSION-MISMATCH";
        case ErrorCode::CorruptFile: return "CORRUPT-FILE";
        case ErrorCode::NonFiniteLoss: return "NON-FINITE-LOSS";
        case ErrorCode::EmptyBuffer: return "EMPTY-BUFFER";
        case ErrorCode::EpisodeNotFound: return "EPISODE-NOT-FOUND";
        case ErrorCode::RelabelOnGoal: return "RELABEL-ON-GOAL";
        case ErrorCode::CheckpointNotFound: return "CHECKPOINT-NOT-FOUND";
        case ErrorCode::IoError: return "IO-ERROR";
        case ErrorCode::UsageError: return "USAGE-ERROR";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// FNV-1a over raw bytes; used for frozen-parameter assertions and logs.
inline std::uint64_t fnv1a(const void* bytes, size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace pg
