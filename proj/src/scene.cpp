#include "mhof/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mhof/desk_model.hpp"
#include "mhof/error.hpp"

namespace mhof {

using nlohmann::json;
namespace fs = std::filesystem;

ShLighting sample_lighting(Rng& rng) {
    ShLighting light;
    for (int ch = 0; ch < 3; ++ch) {
        for (int i = 0; i < 9; ++i) {
            if (i == kShAmbient)
                light.coeffs[ch][i] = rng.uniform(0.3, 0.7);
            else if (i == kShVertical)
                light.coeffs[ch][i] = -rng.uniform(0.0, 0.7);
            else
                light.coeffs[ch][i] = rng.uniform(-0.7, 0.7);
        }
        // The vertical draw above can land on exactly 0; the invariant
        // wants strictly negative.
        if (light.coeffs[ch][kShVertical] == 0.0) light.coeffs[ch][kShVertical] = -1e-9;
    }
    return light;
}

std::optional<CameraNoise> sample_camera_noise(Rng& rng, Mode mode, int n_frames) {
    if (rng.uniform() >= 0.3) return std::nullopt;
    CameraNoise noise;
    noise.dt.resize(n_frames, Vec3{0, 0, 0});
    noise.dr.resize(n_frames, Vec3{0, 0, 0});
    const double trans_sigma = 0.01;                    // 1 cm
    const double rot_sigma = 0.2 * M_PI / 180.0;        // 0.2 degrees
    for (int t = 1; t < n_frames; ++t) {
        noise.dt[t] = {rng.normal(0.0, trans_sigma), rng.normal(0.0, trans_sigma),
                       rng.normal(0.0, trans_sigma)};
        if (mode == Mode::shof)
            noise.dr[t] = {rng.normal(0.0, rot_sigma), rng.normal(0.0, rot_sigma),
                           rng.normal(0.0, rot_sigma)};
    }
    return noise;
}

Camera camera_at_frame(const Camera& base, const std::optional<CameraNoise>& noise, int frame) {
    Camera cam = base;
    if (!noise) return cam;
    int upto = std::min<int>(frame, static_cast<int>(noise->dt.size()) - 1);
    for (int t = 1; t <= upto; ++t) {
        cam.eye += noise->dt[t];
        if (!noise->dr.empty()) cam.euler += noise->dr[t];
    }
    return cam;
}

ComposeParams ComposeParams::defaults(Mode mode) {
    ComposeParams p;
    p.mode = mode;
    if (mode == Mode::shof) {
        p.subsequence_length = 20;
        p.billboard_depth = 9.0;
        p.shape_bound = 3.0;
        p.actor_min = p.actor_max = 1;
    } else {
        p.subsequence_length = 10;
        p.billboard_depth = 12.0;
        p.shape_bound = 2.7;
        p.actor_min = 4;
        p.actor_max = 8;
    }
    return p;
}

// ---------------------------------------------------------------------------
// SceneSpec JSON

static constexpr const char* kSceneSchema = "mhof-scene/1";

namespace {

json vec3_json(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 vec3_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json asset_ref_json(const AssetRef& ref) {
    return {{"kind", ref.kind},
            {"seed", ref.seed},
            {"n_body_textures", ref.n_body_textures},
            {"n_hand_textures", ref.n_hand_textures},
            {"n_backgrounds", ref.n_backgrounds},
            {"n_motions", ref.n_motions},
            {"n_hand_motions", ref.n_hand_motions},
            {"texture_manifest", ref.texture_manifest},
            {"motion_dir", ref.motion_dir},
            {"split_ratios", {ref.split_ratios[0], ref.split_ratios[1], ref.split_ratios[2]}}};
}

AssetRef asset_ref_from(const json& j) {
    AssetRef ref;
    ref.kind = j.at("kind").get<std::string>();
    ref.seed = j.at("seed").get<uint64_t>();
    ref.n_body_textures = j.value("n_body_textures", ref.n_body_textures);
    ref.n_hand_textures = j.value("n_hand_textures", ref.n_hand_textures);
    ref.n_backgrounds = j.value("n_backgrounds", ref.n_backgrounds);
    ref.n_motions = j.value("n_motions", ref.n_motions);
    ref.n_hand_motions = j.value("n_hand_motions", ref.n_hand_motions);
    ref.texture_manifest = j.value("texture_manifest", "");
    ref.motion_dir = j.value("motion_dir", "");
    const auto& r = j.at("split_ratios");
    ref.split_ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    return ref;
}

json frames_json(const std::vector<PoseFrame>& frames) {
    json arr = json::array();
    for (const auto& f : frames) {
        json rots = json::array();
        for (const Vec3& r : f.joint_rotations) rots.push_back(vec3_json(r));
        arr.push_back({{"root", vec3_json(f.root_translation)}, {"rots", std::move(rots)}});
    }
    return arr;
}

std::vector<PoseFrame> frames_from(const json& arr) {
    std::vector<PoseFrame> frames;
    for (const auto& f : arr) {
        PoseFrame pf;
        pf.root_translation = vec3_from(f.at("root"));
        for (const auto& r : f.at("rots")) pf.joint_rotations.push_back(vec3_from(r));
        frames.push_back(std::move(pf));
    }
    return frames;
}

}  // namespace

std::string SceneSpec::to_json_string() const {
    json j;
    j["schema"] = kSceneSchema;
    j["mode"] = to_string(mode);
    j["seed"] = seed;
    j["split"] = split;
    j["n_frames"] = n_frames;
    j["fps"] = fps;
    j["camera"] = {{"width", camera.width},   {"height", camera.height}, {"focal", camera.focal},
                   {"cx", camera.cx},         {"cy", camera.cy},         {"eye", vec3_json(camera.eye)}};
    if (camera_noise) {
        json dt = json::array(), dr = json::array();
        for (const Vec3& v : camera_noise->dt) dt.push_back(vec3_json(v));
        for (const Vec3& v : camera_noise->dr) dr.push_back(vec3_json(v));
        j["camera_noise"] = {{"dt", std::move(dt)}, {"dr", std::move(dr)}};
    } else {
        j["camera_noise"] = nullptr;
    }
    auto coeffs_to_json = [&](int ch) {
        json arr = json::array();
        for (double c : lighting.coeffs[ch]) arr.push_back(c);
        return arr;
    };
    j["lighting"] = {{"r", coeffs_to_json(0)}, {"g", coeffs_to_json(1)}, {"b", coeffs_to_json(2)}};
    j["background"] = background_id;
    j["billboard_depth"] = billboard_depth;
    j["degrade"] = {{"motion_blur", degrade.motion_blur}, {"gaussian_sigma", degrade.gaussian_sigma}};
    j["n_actors_sampled"] = n_actors_sampled;
    j["assets"] = asset_ref_json(assets);
    json actors_json = json::array();
    for (const auto& a : actors) {
        json aj;
        aj["gender"] = to_string(a.shape.gender);
        aj["beta"] = a.shape.beta;
        aj["texture"] = a.texture_id;
        aj["hand_texture"] = a.hand_texture_id;
        aj["x"] = a.x;
        aj["z"] = a.z;
        aj["yaw"] = a.yaw;
        aj["motion_id"] = a.motion_id;
        aj["motion_start"] = a.motion_start;
        aj["frames"] = frames_json(a.frames);
        actors_json.push_back(std::move(aj));
    }
    j["actors"] = std::move(actors_json);
    return j.dump();
}

SceneSpec SceneSpec::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError("scene spec is not valid JSON: " + std::string(e.what()));
    }
    std::string schema = j.value("schema", "<missing>");
    if (schema != kSceneSchema)
        throw FormatError("scene spec schema mismatch: file has \"" + schema +
                          "\", engine expects \"" + kSceneSchema + "\"");

    SceneSpec s;
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.seed = j.at("seed").get<uint64_t>();
    s.split = j.value("split", "train");
    s.n_frames = j.at("n_frames").get<int>();
    s.fps = j.at("fps").get<double>();
    const json& cam = j.at("camera");
    s.camera.width = cam.at("width").get<int>();
    s.camera.height = cam.at("height").get<int>();
    s.camera.focal = cam.at("focal").get<double>();
    s.camera.cx = cam.at("cx").get<double>();
    s.camera.cy = cam.at("cy").get<double>();
    s.camera.eye = vec3_from(cam.at("eye"));
    if (!j.at("camera_noise").is_null()) {
        CameraNoise noise;
        for (const auto& v : j.at("camera_noise").at("dt")) noise.dt.push_back(vec3_from(v));
        for (const auto& v : j.at("camera_noise").at("dr")) noise.dr.push_back(vec3_from(v));
        s.camera_noise = std::move(noise);
    }
    const json& light = j.at("lighting");
    const char* chans[3] = {"r", "g", "b"};
    for (int ch = 0; ch < 3; ++ch) {
        const auto& arr = light.at(chans[ch]);
        for (int i = 0; i < 9; ++i) s.lighting.coeffs[ch][i] = arr.at(i).get<double>();
    }
    s.background_id = j.at("background").get<std::string>();
    s.billboard_depth = j.at("billboard_depth").get<double>();
    s.degrade.motion_blur = j.at("degrade").at("motion_blur").get<bool>();
    s.degrade.gaussian_sigma = j.at("degrade").at("gaussian_sigma").get<double>();
    s.n_actors_sampled = j.value("n_actors_sampled", 0);
    if (j.contains("assets")) s.assets = asset_ref_from(j.at("assets"));
    for (const auto& aj : j.at("actors")) {
        ActorSpec a;
        a.shape.gender = gender_from_string(aj.at("gender").get<std::string>());
        a.shape.beta = aj.at("beta").get<std::vector<double>>();
        a.texture_id = aj.at("texture").get<std::string>();
        a.hand_texture_id = aj.value("hand_texture", "");
        a.x = aj.at("x").get<double>();
        a.z = aj.at("z").get<double>();
        a.yaw = aj.at("yaw").get<double>();
        a.motion_id = aj.value("motion_id", "");
        a.motion_start = aj.value("motion_start", 0);
        a.frames = frames_from(aj.at("frames"));
        s.actors.push_back(std::move(a));
    }
    return s;
}

void SceneSpec::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scene spec: " + path);
    out << to_json_string();
}

SceneSpec SceneSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read scene spec: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

// ---------------------------------------------------------------------------
// Asset pools

const Texture& AssetPools::body_texture_by_id(const std::string& id) const {
    for (const auto& t : body_textures)
        if (t.id == id) return t;
    throw std::invalid_argument("unknown body texture id: " + id);
}

const Texture& AssetPools::hand_texture_by_id(const std::string& id) const {
    for (const auto& t : hand_textures)
        if (t.id == id) return t;
    throw std::invalid_argument("unknown hand texture id: " + id);
}

const Image8& AssetPools::background_by_id(const std::string& id) const {
    for (const auto& b : backgrounds)
        if (b.id == id) return b.image;
    throw std::invalid_argument("unknown background id: " + id);
}

const MotionSequence& AssetPools::motion_by_id(const std::string& id) const {
    for (const auto& m : motions)
        if (m.id == id) return m;
    throw std::invalid_argument("unknown motion id: " + id);
}

namespace {

std::string indexed_id(const char* prefix, int i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%03d", prefix, i);
    return buf;
}

void load_texture_manifest(const std::string& path, AssetPools* pools) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read texture manifest: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("texture manifest is not valid JSON: " + std::string(e.what()));
    }
    fs::path base = fs::path(path).parent_path();
    for (const auto& t : j.value("textures", json::array())) {
        Texture tex;
        tex.id = t.at("id").get<std::string>();
        tex.gender = gender_from_string(t.at("gender").get<std::string>());
        tex.kind = t.at("kind").get<std::string>() == "hand" ? TextureKind::hand : TextureKind::body;
        tex.pixels = read_png((base / t.at("path").get<std::string>()).string());
        const auto& r = t.at("sample_region");
        tex.sample_region = {r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(),
                             r.at(3).get<int>()};
        if (tex.kind == TextureKind::hand)
            pools->hand_textures.push_back(std::move(tex));
        else
            pools->body_textures.push_back(std::move(tex));
    }
    for (const auto& b : j.value("backgrounds", json::array())) {
        BackgroundImage bg;
        bg.id = b.at("id").get<std::string>();
        bg.image = read_png((base / b.at("path").get<std::string>()).string());
        pools->backgrounds.push_back(std::move(bg));
    }
}

}  // namespace

AssetPools build_asset_pools(const AssetRef& ref, Mode mode) {
    AssetPools pools;
    pools.ref = ref;
    pools.model = desk_model_for_mode(mode);
    const int joint_count = pools.model.joint_count();

    if (ref.kind == "procedural") {
        for (int i = 0; i < ref.n_body_textures; ++i) {
            Rng rng(mix_seed(ref.seed, "body_tex", i));
            Gender g = (i % 2 == 0) ? Gender::female : Gender::male;
            pools.body_textures.push_back(
                generate_body_texture(rng, pools.model, 256, indexed_id("proc_body", i), g));
        }
        if (mode == Mode::mhof) {
            for (int i = 0; i < ref.n_hand_textures; ++i) {
                Rng rng(mix_seed(ref.seed, "hand_tex", i));
                Gender g = (i % 2 == 0) ? Gender::female : Gender::male;
                pools.hand_textures.push_back(
                    generate_hand_texture(rng, pools.model, 256, indexed_id("proc_hand", i), g));
            }
        }
        for (int i = 0; i < ref.n_backgrounds; ++i) {
            Rng rng(mix_seed(ref.seed, "background", i));
            pools.backgrounds.push_back({indexed_id("proc_bg", i), generate_background(rng, 512, 512)});
        }
        const MotionKind kinds[4] = {MotionKind::walk, MotionKind::random_smooth, MotionKind::reach,
                                     MotionKind::idle};
        for (int i = 0; i < ref.n_motions; ++i) {
            Rng rng(mix_seed(ref.seed, "motion", i));
            ProceduralMotionOptions opts;
            opts.joint_count = joint_count;
            int len = rng.uniform_int(72, 200);
            MotionSequence seq = generate_procedural_motion(rng, kinds[i % 4], len, 12.0, opts);
            seq.id = indexed_id("proc_motion", i);
            pools.motions.push_back(std::move(seq));
        }
        if (mode == Mode::mhof) {
            for (int i = 0; i < ref.n_hand_motions; ++i) {
                Rng rng(mix_seed(ref.seed, "hand_motion", i));
                ProceduralMotionOptions opts;
                opts.joint_count = joint_count;
                opts.finger_joints = &pools.model.finger_joints;
                opts.fingers_only = true;
                MotionSequence seq =
                    generate_procedural_motion(rng, MotionKind::random_smooth, 120, 12.0, opts);
                seq.id = indexed_id("proc_hand_motion", i);
                pools.hand_motions.push_back(std::move(seq));
            }
        }
    } else if (ref.kind == "dirs") {
        if (!ref.texture_manifest.empty()) load_texture_manifest(ref.texture_manifest, &pools);
        if (!ref.motion_dir.empty()) {
            std::vector<std::string> files;
            for (const auto& e : fs::directory_iterator(ref.motion_dir))
                if (e.path().extension() == ".json") files.push_back(e.path().string());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) pools.motions.push_back(load_motion(f, joint_count));
        }
        if (pools.body_textures.empty() || pools.backgrounds.empty() || pools.motions.empty())
            throw ConfigError("asset directories yielded an empty texture, background or motion pool");
    } else {
        throw ConfigError("unknown asset kind: " + ref.kind);
    }

    auto ids_of = [](const auto& items) {
        std::vector<std::string> ids;
        for (const auto& it : items) ids.push_back(it.id);
        return ids;
    };
    {
        Rng rng(mix_seed(ref.seed, "split_tex"));
        pools.texture_split = split_assets(rng, ids_of(pools.body_textures), ref.split_ratios);
    }
    {
        Rng rng(mix_seed(ref.seed, "split_bg"));
        pools.background_split = split_assets(rng, ids_of(pools.backgrounds), ref.split_ratios);
    }
    {
        Rng rng(mix_seed(ref.seed, "split_motion"));
        pools.motion_split = split_assets(rng, ids_of(pools.motions), ref.split_ratios);
    }

    auto cone = [](const Vec3& hsv) {
        double rad = hsv.x * M_PI / 180.0;
        return Vec3{std::cos(rad) * hsv.y, std::sin(rad) * hsv.y, hsv.z};
    };
    for (const auto& h : pools.hand_textures) pools.hand_mean_cone.push_back(cone(mean_hsv(h)));

    return pools;
}

// ---------------------------------------------------------------------------
// Composition

PosedActor pose_actor_frame(const BodyModel& model, const ActorSpec& actor, int frame) {
    PosedMesh posed = pose_mesh(model, actor.shape, actor.frames[frame]);
    Mat3 yaw = Mat3::rotation_y(actor.yaw);
    Vec3 offset{actor.x, 0.0, actor.z};
    PosedActor out;
    out.vertices.resize(posed.vertices.size());
    for (size_t i = 0; i < posed.vertices.size(); ++i)
        out.vertices[i] = yaw * posed.vertices[i] + offset;
    out.joints.resize(posed.joints.size());
    for (size_t i = 0; i < posed.joints.size(); ++i) out.joints[i] = yaw * posed.joints[i] + offset;
    return out;
}

namespace {

struct SplitView {
    std::vector<const Texture*> textures;          // body textures in split
    std::vector<const MotionSequence*> motions;    // motions in split
    std::vector<const BackgroundImage*> backgrounds;
};

SplitView make_split_view(const AssetPools& pools, int split) {
    SplitView view;
    auto in = [](const std::vector<std::string>& ids, const std::string& id) {
        return std::find(ids.begin(), ids.end(), id) != ids.end();
    };
    for (const auto& t : pools.body_textures)
        if (in(pools.texture_split[split], t.id)) view.textures.push_back(&t);
    for (const auto& m : pools.motions)
        if (in(pools.motion_split[split], m.id)) view.motions.push_back(&m);
    for (const auto& b : pools.backgrounds)
        if (in(pools.background_split[split], b.id)) view.backgrounds.push_back(&b);
    return view;
}

Vec3 cone_coords(const Vec3& hsv) {
    double rad = hsv.x * M_PI / 180.0;
    return {std::cos(rad) * hsv.y, std::sin(rad) * hsv.y, hsv.z};
}

// Horizontal excursion of the root trajectory relative to frame 0,
// rotation-invariant, used to size the placement region.
double root_excursion(const std::vector<PoseFrame>& frames) {
    double worst = 0.0;
    for (const auto& f : frames) {
        Vec3 d = f.root_translation - frames[0].root_translation;
        worst = std::max(worst, std::hypot(d.x, d.z));
    }
    return worst;
}

struct PlacedGeometry {
    // Model-space posed vertices per frame (before yaw/offset).
    std::vector<std::vector<Vec3>> model_frames;
    double radius = 1.0;  // horizontal bounding radius around the frame-0 root
    Vec3 root0;           // frame-0 root position in model space
};

PlacedGeometry pose_model_space(const BodyModel& model, const ActorSpec& actor) {
    PlacedGeometry geom;
    geom.model_frames.resize(actor.frames.size());
    ActorSpec local = actor;
    local.x = local.z = local.yaw = 0.0;
    for (size_t t = 0; t < actor.frames.size(); ++t) {
        PosedActor posed = pose_actor_frame(model, local, static_cast<int>(t));
        if (t == 0) geom.root0 = posed.joints[kJointPelvis];
        geom.model_frames[t] = std::move(posed.vertices);
    }
    double r = 0.0;
    for (const auto& verts : geom.model_frames)
        for (const Vec3& v : verts)
            r = std::max(r, std::hypot(v.x - geom.root0.x, v.z - geom.root0.z));
    geom.radius = r;
    return geom;
}

std::vector<Vec3> to_world(const std::vector<Vec3>& verts, double x, double z, double yaw) {
    Mat3 rot = Mat3::rotation_y(yaw);
    std::vector<Vec3> out(verts.size());
    Vec3 offset{x, 0.0, z};
    for (size_t i = 0; i < verts.size(); ++i) out[i] = rot * verts[i] + offset;
    return out;
}

}  // namespace

SceneSpec compose_subsequence(Rng& rng, const AssetPools& assets, int split,
                              const ComposeParams& params) {
    if (split < 0 || split > 2) throw std::invalid_argument("compose_subsequence: bad split index");
    SplitView view = make_split_view(assets, split);
    if (view.textures.empty() || view.motions.empty() || view.backgrounds.empty())
        throw std::invalid_argument("compose_subsequence: empty asset pool for split");
    if (params.mode == Mode::mhof && (assets.hand_motions.empty() || assets.hand_textures.empty()))
        throw std::invalid_argument("compose_subsequence: mhof mode needs hand pools");

    const int L = params.subsequence_length;

    SceneSpec spec;
    spec.mode = params.mode;
    spec.split = split == 0 ? "train" : (split == 1 ? "val" : "test");
    spec.assets = assets.ref;
    spec.n_frames = L;
    spec.billboard_depth = params.billboard_depth;
    spec.camera = Camera::make(params.image_width, params.image_height, params.focal,
                               {0.0, params.camera_height, 0.0});

    const int n_actors = rng.uniform_int(params.actor_min, params.actor_max);
    spec.n_actors_sampled = n_actors;

    spec.lighting = sample_lighting(rng);
    spec.camera_noise = sample_camera_noise(rng, params.mode, L);
    if (rng.uniform() < params.gaussian_blur_prob)
        spec.degrade.gaussian_sigma = params.gaussian_blur_sigma;
    spec.degrade.motion_blur = params.motion_blur;
    spec.background_id = view.backgrounds[rng.uniform_int(0, int(view.backgrounds.size()) - 1)]->id;

    // Per-actor sampling: motion window, fingers, shape, texture.
    std::vector<ActorSpec> sampled;
    for (int i = 0; i < n_actors; ++i) {
        ActorSpec actor;

        const MotionSequence* seq = nullptr;
        int window = 0;
        for (int attempt = 0; attempt < 100; ++attempt) {
            std::vector<double> weights;
            for (const auto* m : view.motions) weights.push_back(double(m->length()));
            seq = view.motions[rng.discrete(weights)];
            int n_windows = seq->length() / L;
            if (n_windows > 0) {
                window = rng.uniform_int(0, n_windows - 1);
                break;
            }
            seq = nullptr;
        }
        if (!seq) throw std::invalid_argument("compose_subsequence: no motion long enough for a window");
        actor.motion_id = seq->id;
        actor.motion_start = window * L;
        actor.frames.assign(seq->frames.begin() + actor.motion_start,
                            seq->frames.begin() + actor.motion_start + L);
        spec.fps = seq->fps;

        if (params.mode == Mode::mhof) {
            const MotionSequence& hand =
                assets.hand_motions[rng.uniform_int(0, int(assets.hand_motions.size()) - 1)];
            MotionSequence body_window;
            body_window.frames = actor.frames;
            body_window.fps = seq->fps;
            actor.frames = splice_hand_poses(assets.model, body_window, hand, rng).frames;
        }

        Gender gender = rng.uniform() < 0.5 ? Gender::female : Gender::male;
        actor.shape = sample_shape(rng, GenderStats::standard(gender, assets.model.shape_dim()),
                                   params.shape_bound);

        // Uniform over the split, restricted to the actor's gender when
        // the split has a matching texture.
        std::vector<const Texture*> candidates;
        for (const auto* t : view.textures)
            if (t->gender == gender) candidates.push_back(t);
        if (candidates.empty()) candidates = view.textures;
        const Texture* tex = candidates[rng.uniform_int(0, int(candidates.size()) - 1)];
        actor.texture_id = tex->id;

        if (params.mode == Mode::mhof) {
            Vec3 body_cone = cone_coords(mean_hsv(*tex));
            int best = 0;
            double best_d = 1e300;
            for (size_t h = 0; h < assets.hand_mean_cone.size(); ++h) {
                double d = (assets.hand_mean_cone[h] - body_cone).squared_norm();
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(h);
                }
            }
            actor.hand_texture_id = assets.hand_textures[best].id;
        }
        sampled.push_back(std::move(actor));
    }

    // Placement. The single shof actor is centered so the frame-0 pelvis
    // projects onto the principal point; mhof actors go to random ground
    // positions inside the view frustum.
    if (params.mode == Mode::shof) {
        ActorSpec& actor = sampled[0];
        actor.yaw = rng.uniform(0.0, 2.0 * M_PI);
        double depth = rng.uniform(0.35, 0.55) * params.billboard_depth;

        std::vector<Vec3> shaped = shape_mesh(assets.model, actor.shape);
        Vec3 pelvis_rest = joint_locations(assets.model, shaped)[kJointPelvis];
        Vec3 pelvis_local = pelvis_rest + actor.frames[0].root_translation;
        Vec3 q = Mat3::rotation_y(actor.yaw) * pelvis_local;
        actor.x = -q.x;
        actor.z = -depth - q.z;
        spec.camera.eye.y = q.y;
        spec.actors = std::move(sampled);
        return spec;
    }

    const double half_w_per_depth = (params.image_width / 2.0) / params.focal;
    const double billboard = params.billboard_depth;

    std::vector<PlacedGeometry> geoms;
    std::vector<Bvh> bvhs;
    if (params.validate_placement) {
        for (const auto& a : sampled) {
            geoms.push_back(pose_model_space(assets.model, a));
            bvhs.push_back(Bvh::build(geoms.back().model_frames[0], assets.model.faces));
        }
    }

    int n_place = n_actors;
    std::vector<ActorSpec> placed;
    while (n_place >= 1) {
        placed.clear();
        std::vector<std::vector<std::vector<Vec3>>> world_frames;  // [actor][frame][vertex]
        std::vector<double> radii;
        std::vector<Vec2> centers;
        bool all_ok = true;

        for (int i = 0; i < n_place && all_ok; ++i) {
            ActorSpec actor = sampled[i];
            double rho = params.validate_placement
                             ? geoms[i].radius
                             : 1.05 + root_excursion(actor.frames);
            bool accepted = false;
            for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
                double yaw = rng.uniform(0.0, 2.0 * M_PI);
                double d_min = std::max(0.3 * billboard, rho / half_w_per_depth * 1.05);
                double d_max = billboard - rho - 0.4;
                if (d_min >= d_max) continue;
                double depth = rng.uniform(d_min, d_max);
                double x_range = depth * half_w_per_depth - rho;
                if (x_range <= 0.0) continue;
                double px = rng.uniform(-x_range, x_range);

                // Anchor the frame-0 root at the sampled ground point.
                Vec3 r0 = params.validate_placement ? geoms[i].root0
                                                    : actor.frames[0].root_translation;
                Vec3 q = Mat3::rotation_y(yaw) * r0;
                actor.yaw = yaw;
                actor.x = px - q.x;
                actor.z = -depth - q.z;

                if (!params.validate_placement) {
                    accepted = true;
                    break;
                }

                // Cheap circle rejection against already placed actors.
                bool maybe_hit = false;
                for (size_t j = 0; j < placed.size(); ++j) {
                    double dist = std::hypot(px - centers[j].x, -depth - centers[j].y);
                    if (dist <= rho + radii[j] + 1e-6) maybe_hit = true;
                }

                std::vector<std::vector<Vec3>> frames_world(actor.frames.size());
                bool valid = true;
                for (size_t t = 0; t < actor.frames.size() && valid; ++t) {
                    frames_world[t] = to_world(geoms[i].model_frames[t], actor.x, actor.z, actor.yaw);
                    for (const Vec3& v : frames_world[t]) {
                        if (v.z <= -billboard) {
                            valid = false;
                            break;
                        }
                    }
                }
                if (valid && maybe_hit) {
                    Bvh bvh_i = bvhs[i];
                    for (size_t t = 0; t < actor.frames.size() && valid; ++t) {
                        bvh_i.refit(frames_world[t], assets.model.faces);
                        for (size_t j = 0; j < placed.size() && valid; ++j) {
                            Bvh bvh_j = bvhs[j];
                            bvh_j.refit(world_frames[j][t], assets.model.faces);
                            if (!mesh_pair_collision(bvh_i, frames_world[t], assets.model.faces,
                                                     bvh_j, world_frames[j][t], assets.model.faces)
                                     .empty())
                                valid = false;
                        }
                    }
                }
                if (valid) {
                    accepted = true;
                    world_frames.push_back(std::move(frames_world));
                    radii.push_back(rho);
                    centers.push_back({px, -depth});
                }
            }
            if (accepted)
                placed.push_back(std::move(actor));
            else
                all_ok = false;
        }

        if (all_ok) {
            spec.actors = std::move(placed);
            return spec;
        }
        --n_place;
    }
    throw GenerationError("compose_subsequence: could not place even one actor");
}

}  // namespace mhof
