#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarface/eigenspace.hpp"
#include "polarface/image.hpp"
#include "polarface/logpolar.hpp"
#include "polarface/mlp.hpp"
#include "polarface/model_io.hpp"
#include "polarface/pgm.hpp"
#include "polarface/rng.hpp"

namespace polarface {

enum class Split { train, test };

/// Closed-set labeled image collection: every subject appearing in the test
/// partition also appears in the training partition. Images are referenced
/// by path and loaded on use.
struct LabeledDataset {
    struct Sample {
        std::filesystem::path path;
        std::size_t subject = 0;
        Split split = Split::train;
    };

    std::vector<std::string> subjects;
    std::vector<Sample> samples;
};

/// Scans <root>/<subject>/*.pgm (subjects and files in name order) and
/// assigns a deterministic per-subject stratified split: a seeded shuffle
/// sends round(split_fraction * count) images of each subject to TRAIN
/// (always at least one) and the rest to TEST.
inline LabeledDataset ingest_dataset(const std::filesystem::path& root, double split_fraction,
                                     std::uint64_t seed) {
    namespace fs = std::filesystem;
    if (split_fraction <= 0.0 || split_fraction >= 1.0)
        throw std::invalid_argument("ingest_dataset: split_fraction must be in (0, 1)");
    if (!fs::is_directory(root))
        throw std::runtime_error("dataset root " + root.string() + " is not a directory");

    std::vector<fs::path> subject_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) subject_dirs.push_back(entry.path());
    std::sort(subject_dirs.begin(), subject_dirs.end());
    if (subject_dirs.size() < 2)
        throw std::runtime_error("dataset root " + root.string() +
                                 " needs at least 2 subject directories, found " +
                                 std::to_string(subject_dirs.size()));

    LabeledDataset ds;
    for (std::size_t s = 0; s < subject_dirs.size(); ++s) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(subject_dirs[s]))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.size() < 2)
            throw std::runtime_error("subject directory " + subject_dirs[s].string() +
                                     " needs at least 2 PGM images, found " +
                                     std::to_string(files.size()));

        std::vector<std::size_t> order(files.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng = Rng::derive(seed, s);
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(i + 1)]);

        auto n_train = static_cast<std::size_t>(
            std::lround(split_fraction * static_cast<double>(files.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, files.size());

        std::vector<Split> tags(files.size(), Split::test);
        for (std::size_t i = 0; i < n_train; ++i) tags[order[i]] = Split::train;

        ds.subjects.push_back(subject_dirs[s].filename().string());
        for (std::size_t i = 0; i < files.size(); ++i)
            ds.samples.push_back({files[i], s, tags[i]});
    }
    return ds;
}

/// The polar/plain switch: polar applies the log-polar transform; plain
/// resizes to the same S x S square so both arms are dimension-matched.
struct TransformConfig {
    bool polar = true;
    unsigned base = 2;
};

inline GrayImage prepare_image(const GrayImage& img, const TransformConfig& t) {
    if (t.polar) return log_polar_transform(img, t.base);
    const PolarGeometry g = compute_geometry(img.height, img.width, t.base);
    return resize_nearest(img, g.side, g.side);
}

struct PipelineConfig {
    TransformConfig transform;
    double variance_keep = 0.95;
    std::optional<std::size_t> max_u;
    std::vector<std::size_t> hidden_sizes{100, 60, 30};
    TrainConfig train;
    double split_fraction = 0.56;
    std::uint64_t split_seed = 0;
};

struct TrainedModel {
    EigenSpace space;
    MlpNetwork network;
    TrainState log;
};

/// One-hot target in {-1, +1}^C matching the tansig output range.
inline std::vector<double> one_hot_target(std::size_t subject, std::size_t class_count) {
    std::vector<double> t(class_count, -1.0);
    t[subject] = 1.0;
    return t;
}

/// Figure-1 training path: transform every TRAIN image, build the eigenspace
/// from TRAIN only, project, and fit the perceptron on (projection, one-hot)
/// pairs. TEST samples are never touched.
inline TrainedModel run_training(const LabeledDataset& ds, const PipelineConfig& cfg) {
    if (ds.subjects.size() < 2)
        throw std::runtime_error("run_training: need at least 2 subjects");

    std::vector<GrayImage> train_images;
    std::vector<std::size_t> train_labels;
    for (const auto& sample : ds.samples) {
        if (sample.split != Split::train) continue;
        const GrayImage transformed = prepare_image(load_pgm(sample.path), cfg.transform);
        if (!train_images.empty() && !transformed.same_shape(train_images.front()))
            throw std::runtime_error("run_training: transformed sizes differ: " +
                                     std::to_string(train_images.front().height) + " vs " +
                                     std::to_string(transformed.height) + " for " +
                                     sample.path.string());
        train_images.push_back(transformed);
        train_labels.push_back(sample.subject);
    }
    if (train_images.size() < 2)
        throw std::runtime_error("run_training: need at least 2 training images");

    TrainedModel model;
    model.space = build_eigenspace(train_images, cfg.variance_keep, cfg.max_u);
    if (model.space.u() == 0)
        throw std::runtime_error(
            "run_training: eigenspace has rank 0 (all training images identical)");

    std::vector<FeatureVector> features;
    std::vector<std::vector<double>> targets;
    features.reserve(train_images.size());
    for (std::size_t i = 0; i < train_images.size(); ++i) {
        features.push_back(project(train_images[i], model.space));
        targets.push_back(one_hot_target(train_labels[i], ds.subjects.size()));
    }

    std::vector<std::size_t> sizes{model.space.u()};
    sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    sizes.push_back(ds.subjects.size());

    TrainResult result = train(init_network(sizes, cfg.train.rng_seed), features, targets,
                               cfg.train);
    model.network = std::move(result.network);
    model.log = std::move(result.state);
    return model;
}

struct SubjectTally {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t rejected = 0;
    std::size_t misclassified = 0;
};

struct EvalReport {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t rejected = 0;
    std::size_t misclassified = 0;
    double recognition_rate = 0.0;
    double false_rejection_rate = 0.0;
    std::vector<SubjectTally> per_subject;
};

/// Projects and classifies every TEST image (the first `subset_size` in
/// dataset order when given) and tallies the outcome per subject.
inline EvalReport run_evaluation(const LabeledDataset& ds, const TransformConfig& transform,
                                 const EigenSpace& space, const MlpNetwork& net,
                                 std::optional<double> reject_threshold = std::nullopt,
                                 std::optional<std::size_t> subset_size = std::nullopt) {
    if (net.input_size() != space.u())
        throw std::runtime_error("run_evaluation: network input size " +
                                 std::to_string(net.input_size()) +
                                 " does not match eigenspace dimension " +
                                 std::to_string(space.u()));
    EvalReport report;
    report.per_subject.resize(ds.subjects.size());
    for (const auto& sample : ds.samples) {
        if (sample.split != Split::test) continue;
        if (subset_size && report.total >= *subset_size) break;
        const GrayImage transformed = prepare_image(load_pgm(sample.path), transform);
        if (transformed.size() != space.dim)
            throw std::runtime_error("run_evaluation: image " + sample.path.string() +
                                     " transforms to " + std::to_string(transformed.size()) +
                                     " pixels, model expects " + std::to_string(space.dim));
        const auto label = classify(net, project(transformed, space), reject_threshold);

        ++report.total;
        auto& tally = report.per_subject[sample.subject];
        ++tally.total;
        if (!label) {
            ++report.rejected;
            ++tally.rejected;
        } else if (*label == sample.subject) {
            ++report.correct;
            ++tally.correct;
        } else {
            ++report.misclassified;
            ++tally.misclassified;
        }
    }
    if (report.total == 0) throw std::runtime_error("run_evaluation: no test samples");
    report.recognition_rate = static_cast<double>(report.correct) /
                              static_cast<double>(report.total);
    report.false_rejection_rate =
        static_cast<double>(report.rejected + report.misclassified) /
        static_cast<double>(report.total);
    return report;
}

struct CurvePoint {
    std::string arm;
    std::size_t subset_size = 0;
    EvalReport report;
};

/// CSV with one row per report, rates printed with 6 digits, rows sorted by
/// (arm, subset_size).
inline std::string emit_curves(std::vector<CurvePoint> points) {
    if (points.empty()) throw std::invalid_argument("emit_curves: no reports");
    std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.arm != b.arm ? a.arm < b.arm : a.subset_size < b.subset_size;
    });
    std::ostringstream out;
    out << "arm,subset_size,recognition_rate,false_rejection_rate\n";
    out << std::fixed << std::setprecision(6);
    for (const auto& p : points)
        out << p.arm << ',' << p.subset_size << ',' << p.report.recognition_rate << ','
            << p.report.false_rejection_rate << '\n';
    return out.str();
}

inline std::string arm_name(const TransformConfig& t) { return t.polar ? "polar" : "plain"; }

inline nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg,
                                              const std::vector<std::string>& subjects) {
    nlohmann::json j;
    j["polar"] = cfg.transform.polar;
    j["base"] = cfg.transform.base;
    j["variance_keep"] = cfg.variance_keep;
    if (cfg.max_u)
        j["max_u"] = *cfg.max_u;
    else
        j["max_u"] = nullptr;
    j["hidden_sizes"] = cfg.hidden_sizes;
    j["train"] = train_config_to_json(cfg.train);
    j["split_fraction"] = cfg.split_fraction;
    j["split_seed"] = cfg.split_seed;
    j["subjects"] = subjects;
    return j;
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                                std::vector<std::string>* subjects = nullptr) {
    PipelineConfig cfg;
    cfg.transform.polar = j.at("polar").get<bool>();
    cfg.transform.base = j.at("base").get<unsigned>();
    cfg.variance_keep = j.at("variance_keep").get<double>();
    if (!j.at("max_u").is_null()) cfg.max_u = j.at("max_u").get<std::size_t>();
    cfg.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
    cfg.train = train_config_from_json(j.at("train"));
    cfg.split_fraction = j.at("split_fraction").get<double>();
    cfg.split_seed = j.at("split_seed").get<std::uint64_t>();
    if (subjects) *subjects = j.at("subjects").get<std::vector<std::string>>();
    return cfg;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

/// Writes eigenspace.json, mlp.json, split.csv, and config.json into `dir` —
/// everything needed to re-evaluate without retraining.
inline void save_run_dir(const std::filesystem::path& dir, const TrainedModel& model,
                         const LabeledDataset& ds, const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir))
        throw std::runtime_error("cannot create run directory " + dir.string());

    write_json_file(dir / "eigenspace.json", eigenspace_to_json(model.space));
    const double final_mse = model.log.mse_history.empty() ? 0.0 : model.log.mse_history.back();
    write_json_file(dir / "mlp.json", mlp_to_json(model.network, cfg.train, final_mse));
    write_json_file(dir / "config.json", pipeline_config_to_json(cfg, ds.subjects));

    std::ofstream split(dir / "split.csv", std::ios::binary);
    if (!split) throw std::runtime_error("cannot open " + (dir / "split.csv").string());
    split << "path,subject,arm\n";
    for (const auto& sample : ds.samples)
        split << detail::csv_escape(sample.path.string()) << ','
              << detail::csv_escape(ds.subjects[sample.subject]) << ','
              << (sample.split == Split::train ? "train" : "test") << '\n';
    if (!split) throw std::runtime_error("write failed for " + (dir / "split.csv").string());
}

struct RunBundle {
    EigenSpace space;
    MlpNetwork network;
    PipelineConfig config;
    LabeledDataset dataset;
};

inline RunBundle load_run_dir(const std::filesystem::path& dir) {
    RunBundle bundle;
    bundle.space = eigenspace_from_json(read_json_file(dir / "eigenspace.json"));
    bundle.network = mlp_from_json(read_json_file(dir / "mlp.json")).network;
    bundle.config = pipeline_config_from_json(read_json_file(dir / "config.json"),
                                              &bundle.dataset.subjects);

    std::ifstream split(dir / "split.csv", std::ios::binary);
    if (!split) throw std::runtime_error("cannot open " + (dir / "split.csv").string());
    std::string line;
    if (!std::getline(split, line) || line != "path,subject,arm")
        throw std::runtime_error((dir / "split.csv").string() + ": bad header");
    std::map<std::string, std::size_t> subject_index;
    for (std::size_t i = 0; i < bundle.dataset.subjects.size(); ++i)
        subject_index[bundle.dataset.subjects[i]] = i;
    std::size_t line_no = 1;
    while (std::getline(split, line)) {
        ++line_no;
        if (line.empty()) continue;
        // Quoted fields are not produced for the simple paths this tool
        // writes; reject them rather than mis-parse.
        if (line.find('"') != std::string::npos)
            throw std::runtime_error((dir / "split.csv").string() + ":" +
                                     std::to_string(line_no) + ": quoted fields unsupported");
        const auto c2 = line.rfind(',');
        const auto c1 = c2 == std::string::npos ? std::string::npos : line.rfind(',', c2 - 1);
        if (c1 == std::string::npos)
            throw std::runtime_error((dir / "split.csv").string() + ":" +
                                     std::to_string(line_no) + ": expected 3 fields");
        const std::string path = line.substr(0, c1);
        const std::string subject = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string arm = line.substr(c2 + 1);
        const auto it = subject_index.find(subject);
        if (it == subject_index.end())
            throw std::runtime_error((dir / "split.csv").string() + ":" +
                                     std::to_string(line_no) + ": unknown subject '" + subject +
                                     "'");
        if (arm != "train" && arm != "test")
            throw std::runtime_error((dir / "split.csv").string() + ":" +
                                     std::to_string(line_no) + ": bad arm '" + arm + "'");
        bundle.dataset.samples.push_back(
            {path, it->second, arm == "train" ? Split::train : Split::test});
    }
    return bundle;
}

}  // namespace polarface
