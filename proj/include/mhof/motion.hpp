#pragma once

#include <string>
#include <vector>

#include "mhof/body_model.hpp"
#include "mhof/rng.hpp"

namespace mhof {

struct MotionSequence {
    std::vector<PoseFrame> frames;
    double fps = 12.0;
    std::string id;
    std::string category;

    int length() const { return static_cast<int>(frames.size()); }
};

struct Subsequence {
    std::string source_id;
    int start = 0, end = 0;  // [start, end) in the source
    std::vector<PoseFrame> frames;
};

// Keeps every round(fps/target_fps)-th frame starting at frame 0.
MotionSequence subsample_sequence(const MotionSequence& seq, double target_fps);

// Keeps every stride-th frame (the fixed-rate variant of the above).
MotionSequence subsample_stride(const MotionSequence& seq, int stride);

// Consecutive non-overlapping windows; the trailing remainder is dropped.
std::vector<Subsequence> split_subsequences(const MotionSequence& seq, int length);

// Index j drawn with probability |S_j| / sum |S_i|.
size_t sample_sequence(Rng& rng, const std::vector<MotionSequence>& sequences);

// Replaces the finger-joint rotations of body_seq with a continuous
// wrap-around window of hand_seq starting at a random frame.
MotionSequence splice_hand_poses(const BodyModel& model, const MotionSequence& body_seq,
                                 const MotionSequence& hand_seq, Rng& rng);

enum class MotionKind { walk, reach, idle, random_smooth };

std::string to_string(MotionKind k);

struct ProceduralMotionOptions {
    int joint_count = 24;
    const std::vector<int>* finger_joints = nullptr;  // for hand curl kinds
    double max_joint_speed = 3.0;                     // rad/s, per joint
    bool fingers_only = false;  // animate only finger joints (hand pool)
};

// Temporally smooth synthetic motion; per-joint angular velocity stays
// below opts.max_joint_speed by construction.
MotionSequence generate_procedural_motion(Rng& rng, MotionKind kind, int n_frames, double fps,
                                          const ProceduralMotionOptions& opts);

// Motion file I/O (JSON, schema "mhof-motion/1").
void save_motion(const MotionSequence& seq, const std::string& path);
MotionSequence load_motion(const std::string& path, int expect_joint_count = -1);

}  // namespace mhof
