#include "posefit/scenario.hpp"

#include "posefit/errors.hpp"
#include "posefit/rng.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace posefit {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& context,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError(context + ": unknown key '" + item.key() + "'");
        }
    }
}

double get_number(const json& obj, const std::string& context, const char* key) {
    if (!obj.contains(key)) {
        throw ParseError(context + ": missing required field '" + key + "'");
    }
    if (!obj[key].is_number()) {
        throw ParseError(context + ": field '" + key + "' must be a number");
    }
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& context, const char* key,
                     double fallback) {
    return obj.contains(key) ? get_number(obj, context, key) : fallback;
}

std::uint64_t get_seed_or(const json& obj, const std::string& context,
                          const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer() && !obj[key].is_number_unsigned()) {
        throw ParseError(context + ": field '" + key + "' must be an integer");
    }
    return obj[key].get<std::uint64_t>();
}

Eigen::Vector3d get_vec3(const json& obj, const std::string& context, const char* key) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 3) {
        throw ParseError(context + ": field '" + key + "' must be an array of 3 numbers");
    }
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
        if (!obj[key][i].is_number()) {
            throw ParseError(context + ": field '" + key + "' must be an array of 3 numbers");
        }
        v(i) = obj[key][i].get<double>();
    }
    return v;
}

Pose parse_pose(const json& obj, const std::string& context) {
    require_keys(obj, context, {"q", "t"});
    Pose p;
    p.q = get_vec3(obj, context, "q");
    p.t = get_vec3(obj, context, "t");
    if (!p.q.allFinite() || !p.t.allFinite()) {
        throw ValidationError(context + ": pose components must be finite");
    }
    return p;
}

/// Relative file references inside a scenario resolve against the scenario
/// file's directory.
std::string resolve_path(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

CameraIntrinsics parse_camera(const json& obj, const std::string& context,
                              const std::string& base_dir = {}) {
    require_keys(obj, context, {"fx", "fy", "gamma", "x0", "y0", "width", "height", "file"});
    if (obj.contains("file")) {
        if (obj.size() != 1) {
            throw ParseError(context + ": 'file' cannot be combined with inline fields");
        }
        return load_camera_file(resolve_path(obj["file"].get<std::string>(), base_dir));
    }
    CameraIntrinsics k;
    k.fx = get_number(obj, context, "fx");
    k.fy = get_number(obj, context, "fy");
    k.gamma = get_number_or(obj, context, "gamma", 0.0);
    k.x0 = get_number(obj, context, "x0");
    k.y0 = get_number(obj, context, "y0");
    k.width = static_cast<int>(get_number(obj, context, "width"));
    k.height = static_cast<int>(get_number(obj, context, "height"));
    if (k.fx <= 0.0 || k.fy <= 0.0) {
        throw ValidationError(context + ": fx > 0 and fy > 0");
    }
    if (k.width <= 0 || k.height <= 0) {
        throw ValidationError(context + ": image dimensions must be positive");
    }
    return k;
}

ModelSpec parse_model(const json& obj, const std::string& context,
                      const std::string& base_dir = {}) {
    require_keys(obj, context, {"generator", "n", "seed", "file"});
    ModelSpec spec;
    if (obj.contains("file")) {
        if (obj.contains("generator")) {
            throw ParseError(context + ": give either 'file' or 'generator', not both");
        }
        spec.kind = ModelSpec::Kind::file;
        spec.path = resolve_path(obj["file"].get<std::string>(), base_dir);
        return spec;
    }
    if (!obj.contains("generator")) {
        throw ParseError(context + ": missing required field 'generator'");
    }
    const std::string name = obj["generator"].get<std::string>();
    if (name == "cube8") {
        spec.kind = ModelSpec::Kind::cube8;
    } else if (name == "asymmetric12") {
        spec.kind = ModelSpec::Kind::asymmetric12;
    } else if (name == "random") {
        spec.kind = ModelSpec::Kind::random;
        spec.n = static_cast<int>(get_number(obj, context, "n"));
        spec.seed = get_seed_or(obj, context, "seed", 0);
        if (spec.n < 4) {
            throw ValidationError(context + ": random generator needs n >= 4");
        }
    } else {
        throw ValidationError(context + ": unknown generator '" + name + "'");
    }
    return spec;
}

InitialGuessSpec parse_initial_guess(const json& obj, const std::string& context) {
    require_keys(obj, context, {"pose", "offset"});
    InitialGuessSpec spec;
    if (obj.contains("pose") == obj.contains("offset")) {
        throw ParseError(context + ": give exactly one of 'pose' or 'offset'");
    }
    if (obj.contains("pose")) {
        spec.is_offset = false;
        spec.pose = parse_pose(obj["pose"], context + ".pose");
    } else {
        const json& off = obj["offset"];
        require_keys(off, context + ".offset",
                     {"rotation_deg", "translation_fraction", "seed"});
        spec.is_offset = true;
        spec.rotation_deg = get_number(off, context + ".offset", "rotation_deg");
        spec.translation_fraction =
            get_number(off, context + ".offset", "translation_fraction");
        spec.seed = get_seed_or(off, context + ".offset", "seed", 0);
        if (spec.rotation_deg < 0.0 || spec.rotation_deg >= 180.0) {
            throw ValidationError(context + ".offset: rotation_deg in [0, 180)");
        }
        if (spec.translation_fraction < 0.0) {
            throw ValidationError(context + ".offset: translation_fraction >= 0");
        }
    }
    return spec;
}

CorruptionParams parse_corruption(const json& obj, const std::string& context) {
    require_keys(obj, context,
                 {"noise_sigma", "outlier_fraction", "dropout_fraction", "seed"});
    CorruptionParams c;
    c.noise_sigma = get_number_or(obj, context, "noise_sigma", 0.0);
    c.outlier_fraction = get_number_or(obj, context, "outlier_fraction", 0.0);
    c.dropout_fraction = get_number_or(obj, context, "dropout_fraction", 0.0);
    c.seed = get_seed_or(obj, context, "seed", 0);
    if (c.noise_sigma < 0.0) {
        throw ValidationError(context + ": noise_sigma >= 0");
    }
    if (c.outlier_fraction < 0.0 || c.outlier_fraction > 1.0 ||
        c.dropout_fraction < 0.0 || c.dropout_fraction > 1.0) {
        throw ValidationError(context + ": fractions must lie in [0, 1]");
    }
    return c;
}

SamplerConfig parse_sampler(const json& obj, const std::string& context) {
    require_keys(obj, context,
                 {"n_samples", "theta_max", "cap_half_angle",
                  "translation_half_widths", "seed", "conservative_scale"});
    SamplerConfig s;
    s.n_samples = static_cast<int>(get_number_or(obj, context, "n_samples", 24));
    s.theta_max = get_number(obj, context, "theta_max");
    s.cap_half_angle =
        get_number_or(obj, context, "cap_half_angle", std::numbers::pi);
    s.translation_half_widths = get_vec3(obj, context, "translation_half_widths");
    s.seed = get_seed_or(obj, context, "seed", 0);
    s.conservative_scale = get_number_or(obj, context, "conservative_scale", 0.5);
    s.validate();
    return s;
}

LMConfig parse_lm(const json& obj, const std::string& context) {
    require_keys(obj, context,
                 {"lambda0", "lambda_up", "lambda_down", "epsilon",
                  "max_iterations", "max_reinits"});
    LMConfig lm;
    lm.lambda0 = get_number_or(obj, context, "lambda0", lm.lambda0);
    lm.lambda_up = get_number_or(obj, context, "lambda_up", lm.lambda_up);
    lm.lambda_down = get_number_or(obj, context, "lambda_down", lm.lambda_down);
    lm.epsilon = get_number_or(obj, context, "epsilon", lm.epsilon);
    lm.max_iterations = static_cast<int>(
        get_number_or(obj, context, "max_iterations", lm.max_iterations));
    lm.max_reinits = static_cast<int>(
        get_number_or(obj, context, "max_reinits", lm.max_reinits));
    lm.validate();
    return lm;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(what + ": " + e.what());
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str(), path);
}

} // namespace

CameraIntrinsics default_camera() {
    CameraIntrinsics k;
    k.fx = 500.0;
    k.fy = 500.0;
    k.gamma = 0.0;
    k.x0 = 320.0;
    k.y0 = 240.0;
    k.width = 640;
    k.height = 480;
    return k;
}

static Scenario scenario_from_json(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) {
        throw ParseError("scenario: top-level document must be an object");
    }
    require_keys(doc, "scenario",
                 {"model", "camera", "ground_truth_pose", "initial_guess",
                  "corruption", "sampler", "lm"});
    for (const char* key : {"model", "ground_truth_pose", "initial_guess", "sampler"}) {
        if (!doc.contains(key)) {
            throw ParseError(std::string("scenario: missing required field '") + key + "'");
        }
    }

    Scenario s;
    s.model = parse_model(doc["model"], "model", base_dir);
    s.camera = doc.contains("camera") ? parse_camera(doc["camera"], "camera", base_dir)
                                      : default_camera();
    s.ground_truth = parse_pose(doc["ground_truth_pose"], "ground_truth_pose");
    s.initial_guess = parse_initial_guess(doc["initial_guess"], "initial_guess");
    s.corruption = doc.contains("corruption")
                       ? parse_corruption(doc["corruption"], "corruption")
                       : CorruptionParams{};
    s.sampler = parse_sampler(doc["sampler"], "sampler");
    s.lm = doc.contains("lm") ? parse_lm(doc["lm"], "lm") : LMConfig{};
    return s;
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_json(read_json_file(path),
                              std::filesystem::path(path).parent_path().string());
}

Scenario parse_scenario(const std::string& text) {
    return scenario_from_json(parse_json_text(text, "scenario"), {});
}

TargetModel generate_model(const ModelSpec& spec) {
    switch (spec.kind) {
    case ModelSpec::Kind::cube8: {
        std::vector<TargetModel::Keypoint> pts;
        int id = 0;
        for (double x : {-1.0, 1.0})
            for (double y : {-1.0, 1.0})
                for (double z : {-1.0, 1.0})
                    pts.push_back({id++, {x, y, z}});
        return TargetModel(std::move(pts));
    }
    case ModelSpec::Kind::asymmetric12: {
        // Fixed non-symmetric cloud spanning all three dimensions; breaks the
        // pose ambiguities a symmetric target would admit.
        static const double table[12][3] = {
            { 1.00,  0.15, -0.30}, {-0.85,  0.60,  0.25}, { 0.40, -0.95,  0.10},
            {-0.20, -0.40, -0.80}, { 0.70,  0.85,  0.45}, {-0.55, -0.75,  0.65},
            { 0.10,  0.50, -0.95}, {-1.10,  0.05, -0.55}, { 0.90, -0.35,  0.75},
            {-0.30,  1.05,  0.05}, { 0.25, -0.10,  1.10}, {-0.65,  0.30, -0.15},
        };
        std::vector<TargetModel::Keypoint> pts;
        for (int i = 0; i < 12; ++i) {
            pts.push_back({i, {table[i][0], table[i][1], table[i][2]}});
        }
        return TargetModel(std::move(pts));
    }
    case ModelSpec::Kind::random: {
        if (spec.n < 4) {
            throw ValidationError("generate_model: random generator needs n >= 4");
        }
        Pcg32 rng = make_rng(spec.seed, RngStream::model_generation);
        for (int attempt = 0; attempt < 10; ++attempt) {
            std::vector<TargetModel::Keypoint> pts;
            Eigen::Vector3d mean = Eigen::Vector3d::Zero();
            for (int i = 0; i < spec.n; ++i) {
                Eigen::Vector3d p(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                  rng.uniform(-0.5, 0.5));
                pts.push_back({i, p});
                mean += p;
            }
            mean /= spec.n;
            Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
            for (const auto& kp : pts) {
                const Eigen::Vector3d d = kp.position - mean;
                cov += d * d.transpose();
            }
            cov /= spec.n;
            const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
            if (eig.eigenvalues()(0) >= 1e-6) {
                return TargetModel(std::move(pts));
            }
        }
        throw DegenerateModel("generate_model: points remained coplanar after 10 attempts");
    }
    case ModelSpec::Kind::file:
        return load_model_file(spec.path);
    }
    throw ValidationError("generate_model: unreachable model kind");
}

ModelSpec parse_model_spec(const std::string& text) {
    ModelSpec spec;
    if (text == "cube8") {
        spec.kind = ModelSpec::Kind::cube8;
        return spec;
    }
    if (text == "asymmetric12") {
        spec.kind = ModelSpec::Kind::asymmetric12;
        return spec;
    }
    if (text.rfind("random:", 0) == 0) {
        spec.kind = ModelSpec::Kind::random;
        const std::string rest = text.substr(7);
        const auto colon = rest.find(':');
        try {
            spec.n = std::stoi(rest.substr(0, colon));
            spec.seed = colon == std::string::npos
                            ? 0
                            : std::stoull(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw ParseError("model spec: expected random:N[:SEED], got '" + text + "'");
        }
        if (spec.n < 4) {
            throw ValidationError("model spec: random generator needs n >= 4");
        }
        return spec;
    }
    spec.kind = ModelSpec::Kind::file;
    spec.path = text;
    return spec;
}

TargetModel load_model_file(const std::string& path) {
    const json doc = read_json_file(path);
    require_keys(doc, path, {"keypoints"});
    if (!doc.contains("keypoints") || !doc["keypoints"].is_array()) {
        throw ParseError(path + ": expected a 'keypoints' array");
    }
    std::vector<TargetModel::Keypoint> pts;
    for (const auto& item : doc["keypoints"]) {
        require_keys(item, path + ".keypoints[]", {"id", "x", "y", "z"});
        TargetModel::Keypoint kp;
        if (!item.contains("id") || !item["id"].is_number_integer()) {
            throw ParseError(path + ": keypoint 'id' must be an integer");
        }
        kp.id = item["id"].get<int>();
        kp.position = Eigen::Vector3d(get_number(item, path, "x"),
                                      get_number(item, path, "y"),
                                      get_number(item, path, "z"));
        pts.push_back(kp);
    }
    return TargetModel(std::move(pts));
}

void write_model_file(const TargetModel& model, const std::string& path) {
    json doc;
    doc["keypoints"] = json::array();
    for (const auto& kp : model.keypoints()) {
        doc["keypoints"].push_back({{"id", kp.id},
                                    {"x", kp.position.x()},
                                    {"y", kp.position.y()},
                                    {"z", kp.position.z()}});
    }
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write model file: " + path);
    }
    out << doc.dump(2) << "\n";
}

CameraIntrinsics load_camera_file(const std::string& path) {
    const json doc = read_json_file(path);
    if (doc.contains("file")) {
        throw ParseError(path + ": camera files cannot reference other files");
    }
    return parse_camera(doc, path);
}

Pose resolve_initial_guess(const Scenario& scenario) {
    if (!scenario.initial_guess.is_offset) {
        return scenario.initial_guess.pose;
    }
    const InitialGuessSpec& off = scenario.initial_guess;
    Pcg32 rng = make_rng(off.seed, RngStream::initial_guess);

    const double angle = off.rotation_deg * std::numbers::pi / 180.0;
    const Eigen::Vector3d axis =
        sample_axis_in_cap(Eigen::Vector3d::UnitZ(), std::numbers::pi, rng);
    const GibbsVector dq = std::tan(0.5 * angle) * axis;

    const Eigen::Vector3d direction =
        sample_axis_in_cap(Eigen::Vector3d::UnitZ(), std::numbers::pi, rng);
    const double range = scenario.ground_truth.t.norm();

    Pose guess;
    guess.q = rotation_to_crp(crp_to_rotation(scenario.ground_truth.q) *
                              crp_to_rotation(dq));
    guess.t = scenario.ground_truth.t + off.translation_fraction * range * direction;
    return guess;
}

} // namespace posefit
