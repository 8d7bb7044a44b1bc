#pragma once

#include "mhof/body_model.hpp"
#include "mhof/mode.hpp"

namespace mhof {

// Tessellation and parameter knobs for the procedurally built humanoid.
// Defaults give ~2.6k vertices (body only) and ~3.6k with fingers.
struct DeskModelOptions {
    bool with_fingers = true;
    int body_rings = 12;
    int body_rows = 6;
    int finger_rings = 6;
    int finger_rows = 2;
    int shape_dim = 10;
};

// Builds the self-contained articulated humanoid: 24 body joints, plus
// 15 finger joints per hand when with_fingers is set. Joint ids double
// as part ids.
BodyModel build_desk_model(const DeskModelOptions& opts = {});

inline BodyModel desk_model_for_mode(Mode mode) {
    DeskModelOptions opts;
    opts.with_fingers = (mode == Mode::mhof);
    return build_desk_model(opts);
}

// Joint indices used across the engine.
constexpr int kJointPelvis = 0;
constexpr int kJointHandL = 22;
constexpr int kJointHandR = 23;

}  // namespace mhof
