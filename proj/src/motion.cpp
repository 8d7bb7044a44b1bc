#include "mhof/motion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mhof/error.hpp"

namespace mhof {

using nlohmann::json;

MotionSequence subsample_sequence(const MotionSequence& seq, double target_fps) {
    if (!(target_fps > 0.0) || target_fps > seq.fps)
        throw std::invalid_argument("subsample_sequence: target fps must be in (0, fps]");
    int stride = std::max(1, static_cast<int>(std::lround(seq.fps / target_fps)));
    MotionSequence out = subsample_stride(seq, stride);
    out.fps = target_fps;
    return out;
}

MotionSequence subsample_stride(const MotionSequence& seq, int stride) {
    if (stride < 1) throw std::invalid_argument("subsample_stride: stride must be >= 1");
    MotionSequence out;
    out.id = seq.id;
    out.category = seq.category;
    out.fps = seq.fps / stride;
    for (int i = 0; i < seq.length(); i += stride) out.frames.push_back(seq.frames[i]);
    return out;
}

std::vector<Subsequence> split_subsequences(const MotionSequence& seq, int length) {
    if (length < 2) throw std::invalid_argument("split_subsequences: length must be >= 2");
    std::vector<Subsequence> out;
    for (int start = 0; start + length <= seq.length(); start += length) {
        Subsequence s;
        s.source_id = seq.id;
        s.start = start;
        s.end = start + length;
        s.frames.assign(seq.frames.begin() + start, seq.frames.begin() + start + length);
        out.push_back(std::move(s));
    }
    return out;
}

size_t sample_sequence(Rng& rng, const std::vector<MotionSequence>& sequences) {
    if (sequences.empty()) throw std::invalid_argument("sample_sequence: empty sequence list");
    std::vector<double> weights;
    weights.reserve(sequences.size());
    for (const auto& s : sequences) {
        if (s.length() == 0) throw std::invalid_argument("sample_sequence: zero-length sequence");
        weights.push_back(static_cast<double>(s.length()));
    }
    return rng.discrete(weights);
}

MotionSequence splice_hand_poses(const BodyModel& model, const MotionSequence& body_seq,
                                 const MotionSequence& hand_seq, Rng& rng) {
    if (!model.has_fingers())
        throw std::invalid_argument("splice_hand_poses: model has no finger joints");
    if (body_seq.fps != hand_seq.fps)
        throw std::invalid_argument("splice_hand_poses: fps mismatch");
    if (hand_seq.frames.empty()) throw std::invalid_argument("splice_hand_poses: empty hand sequence");

    const int hand_len = hand_seq.length();
    const int start = rng.uniform_int(0, hand_len - 1);
    MotionSequence out = body_seq;
    for (int k = 0; k < out.length(); ++k) {
        const PoseFrame& hand = hand_seq.frames[(start + k) % hand_len];
        for (int j : model.finger_joints) out.frames[k].joint_rotations[j] = hand.joint_rotations[j];
    }
    return out;
}

std::string to_string(MotionKind k) {
    switch (k) {
        case MotionKind::walk: return "walk";
        case MotionKind::reach: return "reach";
        case MotionKind::idle: return "idle";
        case MotionKind::random_smooth: return "random-smooth";
    }
    return "?";
}

namespace {

// Relaxed A-pose used as the base of every procedural kind: arms lowered
// from the T-pose template, slight elbow bend.
void apply_base_pose(PoseFrame& f) {
    f.joint_rotations[16] = {0, 0, -1.10};  // shoulder_l
    f.joint_rotations[17] = {0, 0, 1.10};   // shoulder_r
    f.joint_rotations[18] = {0, -0.25, 0};  // elbow_l
    f.joint_rotations[19] = {0, 0.25, 0};   // elbow_r
}

struct Sinusoid {
    double amp, freq, phase;
    double eval(double t) const { return amp * std::sin(2.0 * M_PI * freq * t + phase); }
    double speed_bound() const { return std::abs(amp) * 2.0 * M_PI * freq; }
};

double amplitude_for_joint(int j, int joint_count) {
    if (j >= 24 && j < joint_count) return 0.30;  // fingers
    switch (j) {
        case 0: return 0.08;
        case 1: case 2: return 0.25;
        case 4: case 5: return 0.30;
        case 7: case 8: return 0.15;
        case 10: case 11: return 0.08;
        case 3: case 6: case 9: return 0.06;
        case 12: return 0.08;
        case 15: return 0.10;
        case 13: case 14: return 0.05;
        case 16: case 17: case 18: case 19: return 0.30;
        case 20: case 21: return 0.20;
        case 22: case 23: return 0.10;
        default: return 0.10;
    }
}

}  // namespace

MotionSequence generate_procedural_motion(Rng& rng, MotionKind kind, int n_frames, double fps,
                                          const ProceduralMotionOptions& opts) {
    if (n_frames < 2) throw std::invalid_argument("generate_procedural_motion: need >= 2 frames");
    const int nj = opts.joint_count;
    const double cap = opts.max_joint_speed;

    MotionSequence seq;
    seq.fps = fps;
    seq.category = to_string(kind);
    seq.frames.resize(n_frames);
    for (auto& f : seq.frames) {
        f.joint_rotations.assign(nj, Vec3{0, 0, 0});
        if (!opts.fingers_only) apply_base_pose(f);
    }

    const double T = n_frames / fps;

    if (opts.fingers_only) {
        if (!opts.finger_joints || opts.finger_joints->empty())
            throw std::invalid_argument("generate_procedural_motion: fingers_only without finger joints");
        // Per-finger curl cycles around the base curl, wiggle kept well
        // under the speed cap.
        const auto& fingers = *opts.finger_joints;
        for (size_t i = 0; i < fingers.size(); i += 3) {
            double base = rng.uniform(0.15, 0.45);
            double amp = rng.uniform(0.10, 0.35);
            double freq = rng.uniform(0.15, 0.45);
            double phase = rng.uniform(0.0, 2.0 * M_PI);
            double scale = std::min(1.0, 0.95 * cap / (amp * 2.0 * M_PI * freq));
            amp *= scale;
            for (int t = 0; t < n_frames; ++t) {
                double curl = base + amp * std::sin(2.0 * M_PI * freq * t / fps + phase);
                for (int seg = 0; seg < 3; ++seg) {
                    int j = fingers[i + seg];
                    // Left-hand fingers curl with negative z rotation,
                    // right-hand with positive (mirrored chains).
                    double dir = (i < fingers.size() / 2) ? -1.0 : 1.0;
                    seq.frames[t].joint_rotations[j] = {0, 0, dir * curl * (seg == 0 ? 0.8 : 1.0)};
                }
            }
        }
        seq.id = "hand";
        return seq;
    }

    switch (kind) {
        case MotionKind::idle:
            break;  // constant base pose, root fixed

        case MotionKind::walk: {
            double gait = rng.uniform(0.7, 1.0);  // Hz
            double hip_amp = 0.40, knee_amp = 0.55, arm_amp = 0.22, ankle_amp = 0.14;
            // Worst per-joint angular speed is knee_amp/2 * 2*pi*gait on
            // the knees; scale everything if the cap is tighter.
            double worst = std::max({hip_amp, knee_amp * 0.5, arm_amp, ankle_amp}) * 2.0 * M_PI * gait;
            double scale = std::min(1.0, 0.95 * cap / worst);
            hip_amp *= scale; knee_amp *= scale; arm_amp *= scale; ankle_amp *= scale;
            double speed = 1.1 * gait * scale;
            for (int t = 0; t < n_frames; ++t) {
                double phi = 2.0 * M_PI * gait * t / fps;
                PoseFrame& f = seq.frames[t];
                f.joint_rotations[1] = {-hip_amp * std::sin(phi), 0, 0};
                f.joint_rotations[2] = {hip_amp * std::sin(phi), 0, 0};
                f.joint_rotations[4] = {knee_amp * 0.5 * (1.0 - std::cos(phi)), 0, 0};
                f.joint_rotations[5] = {knee_amp * 0.5 * (1.0 + std::cos(phi)), 0, 0};
                f.joint_rotations[7] = {ankle_amp * std::sin(phi + 0.7), 0, 0};
                f.joint_rotations[8] = {-ankle_amp * std::sin(phi + 0.7), 0, 0};
                f.joint_rotations[16].x = arm_amp * std::sin(phi);
                f.joint_rotations[17].x = -arm_amp * std::sin(phi);
                f.joint_rotations[9] = {0, 0.05 * std::sin(phi), 0};
                f.root_translation = {0.02 * std::sin(phi), 0.012 * (1.0 - std::cos(2.0 * phi)) * 0.5,
                                      speed * t / fps};
            }
            break;
        }

        case MotionKind::reach: {
            // One raise-and-lower cycle of one arm over the sequence.
            bool left = rng.uniform() < 0.5;
            Vec3 dir = {-0.55, left ? -0.90 : 0.90, 0.35 * (left ? 1.0 : -1.0)};
            double range = 1.0;
            double worst = dir.norm() * range * M_PI / T;
            double scale = std::min(1.0, 0.95 * cap / worst);
            int sh = left ? 16 : 17, el = left ? 18 : 19;
            for (int t = 0; t < n_frames; ++t) {
                double s = 0.5 * (1.0 - std::cos(2.0 * M_PI * t / n_frames)) * range * scale;
                PoseFrame& f = seq.frames[t];
                f.joint_rotations[sh] += dir * s;
                f.joint_rotations[el].y += (left ? -0.4 : 0.4) * s;
                f.joint_rotations[6] = {0.10 * s, 0, 0};
            }
            break;
        }

        case MotionKind::random_smooth: {
            for (int j = 0; j < nj; ++j) {
                double amp = amplitude_for_joint(j, nj);
                for (int axis = 0; axis < 3; ++axis) {
                    Sinusoid sins[3];
                    double speed_sum = 0.0;
                    for (auto& s : sins) {
                        s.amp = amp * rng.uniform(0.15, 0.5);
                        s.freq = rng.uniform(0.10, 0.55);
                        s.phase = rng.uniform(0.0, 2.0 * M_PI);
                        speed_sum += s.speed_bound();
                    }
                    // Per-axis budget keeps the 3-axis rotation-vector
                    // speed below the cap.
                    double budget = 0.95 * cap / std::sqrt(3.0);
                    double scale = speed_sum > budget ? budget / speed_sum : 1.0;
                    for (int t = 0; t < n_frames; ++t) {
                        double v = 0.0;
                        for (const auto& s : sins) v += s.eval(t / fps) * scale;
                        seq.frames[t].joint_rotations[j][axis] += v;
                    }
                }
            }
            for (int axis = 0; axis < 3; ++axis) {
                double amp = axis == 1 ? 0.008 : 0.12;
                Sinusoid s{amp * rng.uniform(0.4, 1.0), rng.uniform(0.05, 0.30),
                           rng.uniform(0.0, 2.0 * M_PI)};
                for (int t = 0; t < n_frames; ++t)
                    seq.frames[t].root_translation[axis] += s.eval(t / fps);
            }
            break;
        }
    }

    seq.id = to_string(kind);
    return seq;
}

// ---------------------------------------------------------------------------
// Motion file (JSON)

static constexpr const char* kMotionSchema = "mhof-motion/1";

void save_motion(const MotionSequence& seq, const std::string& path) {
    json j;
    j["schema"] = kMotionSchema;
    j["id"] = seq.id;
    j["category"] = seq.category;
    j["fps"] = seq.fps;
    j["joint_count"] = seq.frames.empty() ? 0 : static_cast<int>(seq.frames[0].joint_rotations.size());
    json frames = json::array();
    for (const auto& f : seq.frames) {
        json fr;
        fr["root"] = {f.root_translation.x, f.root_translation.y, f.root_translation.z};
        json rots = json::array();
        for (const Vec3& r : f.joint_rotations) rots.push_back({r.x, r.y, r.z});
        fr["rots"] = std::move(rots);
        frames.push_back(std::move(fr));
    }
    j["frames"] = std::move(frames);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write motion file: " + path);
    out << j.dump();
}

MotionSequence load_motion(const std::string& path, int expect_joint_count) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read motion file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("motion file is not valid JSON: " + std::string(e.what()));
    }
    if (j.value("schema", "") != kMotionSchema)
        throw FormatError("motion file schema mismatch in " + path);

    MotionSequence seq;
    seq.id = j.value("id", "");
    seq.category = j.value("category", "");
    seq.fps = j.at("fps").get<double>();
    int jc = j.at("joint_count").get<int>();
    if (expect_joint_count >= 0 && jc != expect_joint_count)
        throw std::invalid_argument("motion file joint count " + std::to_string(jc) +
                                    " does not match model joint count " +
                                    std::to_string(expect_joint_count));
    for (const auto& fr : j.at("frames")) {
        PoseFrame f;
        const auto& root = fr.at("root");
        f.root_translation = {root.at(0).get<double>(), root.at(1).get<double>(),
                              root.at(2).get<double>()};
        for (const auto& r : fr.at("rots"))
            f.joint_rotations.emplace_back(r.at(0).get<double>(), r.at(1).get<double>(),
                                           r.at(2).get<double>());
        if (static_cast<int>(f.joint_rotations.size()) != jc)
            throw FormatError("motion file frame joint count mismatch in " + path);
        seq.frames.push_back(std::move(f));
    }
    if (seq.frames.empty()) throw FormatError("motion file has no frames: " + path);
    return seq;
}

}  // namespace mhof
