// Command-line surface for the polar-thermal face recognition toolkit:
// one binary, one subcommand per pipeline stage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polarface/logpolar.hpp"
#include "polarface/pipeline.hpp"
#include "polarface/synth.hpp"

namespace fs = std::filesystem;
using namespace polarface;

namespace {

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void print_report(const EvalReport& rep) {
    std::cout << std::fixed << std::setprecision(6) << "recognition_rate=" << rep.recognition_rate
              << " false_rejection_rate=" << rep.false_rejection_rate << " (correct "
              << rep.correct << ", rejected " << rep.rejected << ", misclassified "
              << rep.misclassified << ", total " << rep.total << ")\n";
}

struct TrainFlags {
    std::string data;
    bool plain = false;
    unsigned base = 2;
    double variance_keep = 0.95;
    std::size_t max_u = 0;  // 0 = no cap
    std::vector<std::size_t> hidden{100, 60, 30};
    double learning_rate = 0.02;
    double momentum = 0.9;
    std::size_t epochs = 5000;
    double target_mse = 1e-3;
    std::uint64_t train_seed = 0;
    double split_fraction = 0.56;
    std::uint64_t split_seed = 0;

    PipelineConfig to_config() const {
        PipelineConfig cfg;
        cfg.transform.polar = !plain;
        cfg.transform.base = base;
        cfg.variance_keep = variance_keep;
        if (max_u > 0) cfg.max_u = max_u;
        cfg.hidden_sizes = hidden;
        cfg.train.learning_rate = learning_rate;
        cfg.train.momentum = momentum;
        cfg.train.max_epochs = epochs;
        cfg.train.target_mse = target_mse;
        cfg.train.rng_seed = train_seed;
        cfg.split_fraction = split_fraction;
        cfg.split_seed = split_seed;
        return cfg;
    }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_data = true) {
    if (with_data)
        cmd->add_option("--data", f.data, "Dataset root: <root>/<subject>/*.pgm")->required();
    cmd->add_flag("--plain", f.plain, "Skip the log-polar step (plain resize arm)");
    cmd->add_option("--base", f.base, "Log-polar resize base Z")->check(CLI::Range(2u, 64u));
    cmd->add_option("--variance-keep", f.variance_keep,
                    "Eigenvalue mass retained when choosing U");
    cmd->add_option("--max-u", f.max_u, "Cap on eigenface count (0 = uncapped)");
    cmd->add_option("--hidden", f.hidden, "Hidden layer sizes")->delimiter(',');
    cmd->add_option("--learning-rate", f.learning_rate, "Backpropagation learning rate");
    cmd->add_option("--momentum", f.momentum, "Momentum constant in [0, 1]");
    cmd->add_option("--epochs", f.epochs, "Maximum training epochs");
    cmd->add_option("--target-mse", f.target_mse, "Stop when training MSE reaches this");
    cmd->add_option("--train-seed", f.train_seed, "Seed for weight initialization");
    cmd->add_option("--split-fraction", f.split_fraction, "Per-subject TRAIN fraction");
    cmd->add_option("--split-seed", f.split_seed, "Seed for the train/test shuffle");
}

void run_train_arm(const LabeledDataset& ds, const PipelineConfig& cfg, const fs::path& out) {
    const TrainedModel model = run_training(ds, cfg);
    save_run_dir(out, model, ds, cfg);
    std::size_t n_train = 0, n_test = 0;
    for (const auto& s : ds.samples) (s.split == Split::train ? n_train : n_test)++;
    std::cout << "arm=" << arm_name(cfg.transform) << " subjects=" << ds.subjects.size()
              << " train=" << n_train << " test=" << n_test << " U=" << model.space.u()
              << " epochs=" << model.log.epoch << " final_mse=" << std::setprecision(6)
              << model.log.mse_history.back() << "\nrun directory: " << out.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal face recognition via log-polar eigenfaces and a perceptron"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    // transform
    std::string tf_input, tf_output;
    unsigned tf_base = 2;
    auto* transform = app.add_subcommand("transform", "Log-polar transform one PGM image");
    transform->add_option("--input", tf_input, "Input PGM")->required();
    transform->add_option("--output", tf_output, "Output PGM")->required();
    transform->add_option("--base", tf_base, "Resize base Z")->check(CLI::Range(2u, 64u));

    // synth
    CorpusOptions syn;
    std::string syn_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled corpus");
    synth->add_option("--out", syn_out, "Output directory")->required();
    synth->add_option("--subjects", syn.subjects, "Number of subjects");
    synth->add_option("--images-per-subject", syn.images_per_subject, "Images per subject");
    synth->add_option("--height", syn.height, "Image height");
    synth->add_option("--width", syn.width, "Image width");
    synth->add_option("--rotation-range", syn.rotation_range_deg,
                      "Per-image rotation, uniform in +-range degrees");
    synth->add_option("--scale-range", syn.scale_range, "Per-image scale, uniform in 1 +- range");
    synth->add_option("--noise", syn.noise_sigma, "Additive Gaussian noise sigma");
    synth->add_option("--seed", syn.seed, "Corpus seed");

    // train
    TrainFlags tr;
    std::string tr_out;
    auto* train_cmd = app.add_subcommand("train", "Ingest a dataset and train the models");
    train_cmd->add_option("--out", tr_out, "Run directory to write")->required();
    add_train_flags(train_cmd, tr);

    // eval
    std::string ev_run;
    double ev_tau = -2.0;
    std::size_t ev_subset = 0;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run directory on its TEST split");
    eval_cmd->add_option("--run", ev_run, "Run directory from `train`")->required();
    eval_cmd->add_option("--reject-threshold", ev_tau,
                         "Reject when the winning output falls below this (-2 = off)");
    eval_cmd->add_option("--subset-size", ev_subset, "Evaluate only the first N test images");

    // classify
    std::string cl_run, cl_input;
    double cl_tau = -2.0;
    auto* classify_cmd = app.add_subcommand("classify", "Classify a single image");
    classify_cmd->add_option("--run", cl_run, "Run directory from `train`")->required();
    classify_cmd->add_option("--input", cl_input, "PGM image to classify")->required();
    classify_cmd->add_option("--reject-threshold", cl_tau,
                             "Reject when the winning output falls below this (-2 = off)");

    // curves
    TrainFlags cv;
    std::string cv_out;
    std::vector<std::size_t> cv_sizes;
    auto* curves_cmd =
        app.add_subcommand("curves", "Train both arms and sweep test subset sizes");
    curves_cmd->add_option("--out", cv_out, "Output directory")->required();
    curves_cmd->add_option("--subset-sizes", cv_sizes, "Test subset sizes to sweep")
        ->required()
        ->delimiter(',');
    add_train_flags(curves_cmd, cv);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*transform) {
            const GrayImage img = load_pgm(tf_input);
            const PolarGeometry g = compute_geometry(img.height, img.width, tf_base);
            std::cout << "m=" << g.center_row << " n=" << g.center_col << " R=" << g.radius
                      << " q=" << g.exponent << " S=" << g.side << "\n";
            save_pgm(tf_output, log_polar_transform(img, tf_base));
        } else if (*synth) {
            const std::size_t n = write_synthetic_corpus(syn_out, syn);
            std::cout << "wrote " << n << " images under " << syn_out << "\n";
        } else if (*train_cmd) {
            const LabeledDataset ds = ingest_dataset(tr.data, tr.split_fraction, tr.split_seed);
            run_train_arm(ds, tr.to_config(), tr_out);
        } else if (*eval_cmd) {
            const RunBundle bundle = load_run_dir(ev_run);
            std::optional<double> tau;
            if (ev_tau >= -1.0) tau = ev_tau;
            std::optional<std::size_t> subset;
            if (eval_cmd->count("--subset-size")) subset = ev_subset;
            const EvalReport rep = run_evaluation(bundle.dataset, bundle.config.transform,
                                                  bundle.space, bundle.network, tau, subset);
            print_report(rep);
            CurvePoint point{arm_name(bundle.config.transform), rep.total, rep};
            write_text_file(fs::path(ev_run) / "report.csv", emit_curves({point}));
        } else if (*classify_cmd) {
            const RunBundle bundle = load_run_dir(cl_run);
            std::optional<double> tau;
            if (cl_tau >= -1.0) tau = cl_tau;
            const GrayImage img = prepare_image(load_pgm(cl_input), bundle.config.transform);
            if (img.size() != bundle.space.dim)
                throw std::runtime_error("image transforms to " + std::to_string(img.size()) +
                                         " pixels, model expects " +
                                         std::to_string(bundle.space.dim));
            const auto label = classify(bundle.network, project(img, bundle.space), tau);
            std::cout << (label ? bundle.dataset.subjects.at(*label) : std::string("REJECT"))
                      << "\n";
        } else if (*curves_cmd) {
            const LabeledDataset ds = ingest_dataset(cv.data, cv.split_fraction, cv.split_seed);
            std::vector<CurvePoint> points;
            for (bool polar : {true, false}) {
                PipelineConfig cfg = cv.to_config();
                cfg.transform.polar = polar;
                const TrainedModel model = run_training(ds, cfg);
                save_run_dir(fs::path(cv_out) / arm_name(cfg.transform), model, ds, cfg);
                for (std::size_t size : cv_sizes) {
                    const EvalReport rep = run_evaluation(ds, cfg.transform, model.space,
                                                          model.network, std::nullopt, size);
                    points.push_back({arm_name(cfg.transform), size, rep});
                }
            }
            const fs::path csv_path = fs::path(cv_out) / "curves.csv";
            write_text_file(csv_path, emit_curves(points));
            std::cout << "wrote " << points.size() << " curve rows to " << csv_path.string()
                      << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
