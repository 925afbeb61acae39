#pragma once

#include <spinetrack/error.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spinetrack {

/// Axis-aligned bounding box, origin top-left, continuous pixel coordinates.
/// Construction enforces x1 < x2, y1 < y2 and finite coordinates.
struct BBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 1.0;
    double y2 = 1.0;

    BBox() = default;
    BBox(double x1_, double y1_, double x2_, double y2_);

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const { return width() * height(); }
    double center_x() const { return 0.5 * (x1 + x2); }
    double center_y() const { return 0.5 * (y1 + y2); }

    BBox translated(double dx, double dy) const {
        return BBox(x1 + dx, y1 + dy, x2 + dx, y2 + dy);
    }

    bool operator==(const BBox&) const = default;
};

/// One bounding box on one z-slice at one timepoint.
struct Detection2D {
    std::string id;
    std::string stack_id;
    int timepoint = 0;
    int z = 0;
    BBox bbox;
    double confidence = 1.0;
    std::optional<std::string> gt_object_id;  // ground-truth 3D identity
    std::optional<std::string> gt_track_id;   // ground-truth time identity

    /// Throws Error on negative indices or confidence outside [0,1].
    void validate() const;
};

/// A set of depth-linked 2D detections sharing one 3D identity at one timepoint.
struct SpineObject3D {
    std::string object_id;
    int timepoint = 0;
    std::vector<std::pair<int, std::string>> members;  // (z, detection id), ascending z
    std::set<int> depth_set;
    BBox median_box;
    std::optional<std::vector<double>> mean_embedding;
};

/// A 3D-object identity chained across timepoints.
struct TimeTrack {
    std::string track_id;
    std::map<int, std::string> assignments;  // timepoint -> object_id
};

/// How a gating threshold interacts with the assignment solve.
/// PostSolve prunes pairs from the global optimum afterwards; PreSolve
/// forbids over-threshold cells before solving (changes results).
enum class GateMode { PostSolve, PreSolve };

/// Weights and thresholds shared by the depth- and time-linking stages.
struct TrackingConfig {
    double lambda_app = 0.0;
    double lambda_sp = 1.0;
    double lambda_depth = 0.0;
    double match_threshold_depth = 0.5;
    double match_threshold_time = 0.5;
    double contrastive_margin = 1.0;
    int dilation_radius = 2;
    int gap_bridge = 0;

    // Candidate pruning: pairs whose aligned box centers are farther apart
    // than this are forbidden before the solve.
    double center_gate_px = 50.0;
    GateMode gate_mode = GateMode::PostSolve;

    /// Spatial-only depth linking (appearance term off).
    static TrackingConfig depth_defaults();
    /// Depth linking with equal spatial and appearance weights.
    static TrackingConfig depth_sp_app();
    /// Time linking defaults (spatial 0.4, depth 0.4, appearance 0.2).
    static TrackingConfig time_defaults();

    /// Throws Error if weights are negative, all zero, or thresholds non-finite.
    void validate() const;
};

struct EvalCounts {
    long detections = 0;
    long tracks = 0;
    long id_switches = 0;
    long fn = 0;
    long fp = 0;
};

/// Tracking/detection evaluation summary. MOT scores on a 0-100 scale,
/// detection scores in [0,1].
struct EvalReport {
    double mota = 0.0;
    double hota = 0.0;
    double idf1 = 0.0;
    double assa = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    EvalCounts counts;
    std::vector<std::string> flags;
};

enum class ViolationKind {
    DanglingStackId,
    ZOutOfRange,
    DuplicateId,
};

struct Violation {
    ViolationKind kind;
    std::string detection_id;
    std::string message;
};

struct ImageStack;  // image.hpp
class EmbeddingStore;  // appearance.hpp

/// Cross-checks detections against their stacks. Violations are data, not
/// failures: the list is empty iff the dataset is internally consistent.
std::vector<Violation> validate_dataset(const std::vector<Detection2D>& detections,
                                        const std::vector<ImageStack>& stacks);

/// Assembles a 3D object from members sharing one (stack, timepoint).
/// The median box is the coordinate-wise median (even count: mean of the two
/// middle values). The mean embedding is set only when every member has an
/// embedding in `store`; it is the renormalized arithmetic mean.
/// Throws Error on an empty member list, duplicate z, or mixed stack/timepoint.
SpineObject3D build_object(const std::string& object_id,
                           std::vector<Detection2D> members,
                           const EmbeddingStore* store = nullptr);

}  // namespace spinetrack
