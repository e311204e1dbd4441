#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "polarface/eigenspace.hpp"
#include "polarface/mlp.hpp"

namespace polarface {

/// JSON schemas for trained models. Numbers are written in the shortest
/// decimal form that parses back to the identical double, so save/load
/// round-trips are bit-exact and repeated saves are byte-identical.

inline nlohmann::json eigenspace_to_json(const EigenSpace& space) {
    nlohmann::json j;
    j["dim"] = space.dim;
    j["side"] = space.side;
    j["mean_face"] = space.mean_face;
    j["eigenvalues"] = space.eigenvalues;
    j["basis"] = space.basis;
    j["variance_keep"] = space.variance_keep;
    return j;
}

inline EigenSpace eigenspace_from_json(const nlohmann::json& j) {
    EigenSpace space;
    space.dim = j.at("dim").get<std::size_t>();
    space.side = j.at("side").get<std::size_t>();
    space.mean_face = j.at("mean_face").get<std::vector<double>>();
    space.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    space.basis = j.at("basis").get<std::vector<std::vector<double>>>();
    space.variance_keep = j.at("variance_keep").get<double>();
    if (space.mean_face.size() != space.dim)
        throw std::runtime_error("eigenspace: mean_face length does not match dim");
    for (const auto& u : space.basis)
        if (u.size() != space.dim)
            throw std::runtime_error("eigenspace: basis vector length does not match dim");
    if (space.eigenvalues.size() != space.basis.size())
        throw std::runtime_error("eigenspace: eigenvalue count does not match basis");
    return space;
}

inline nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    return nlohmann::json{{"learning_rate", cfg.learning_rate},
                          {"momentum", cfg.momentum},
                          {"max_epochs", cfg.max_epochs},
                          {"target_mse", cfg.target_mse},
                          {"rng_seed", cfg.rng_seed}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.momentum = j.at("momentum").get<double>();
    cfg.max_epochs = j.at("max_epochs").get<std::size_t>();
    cfg.target_mse = j.at("target_mse").get<double>();
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return cfg;
}

inline nlohmann::json mlp_to_json(const MlpNetwork& net, const TrainConfig& cfg,
                                  double final_mse) {
    nlohmann::json j;
    j["layer_sizes"] = net.layer_sizes;
    nlohmann::json weights = nlohmann::json::array();
    for (const Mat& w : net.weights) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < w.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t k = 0; k < w.cols; ++k) row.push_back(w(i, k));
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
    }
    j["weights"] = std::move(weights);
    j["biases"] = net.biases;
    j["activation"] = "tansig";
    j["train_config"] = train_config_to_json(cfg);
    j["final_mse"] = final_mse;
    return j;
}

struct MlpBundle {
    MlpNetwork network;
    TrainConfig train_config;
    double final_mse = 0.0;
};

inline MlpBundle mlp_from_json(const nlohmann::json& j) {
    if (j.at("activation").get<std::string>() != "tansig")
        throw std::runtime_error("mlp: unsupported activation '" +
                                 j.at("activation").get<std::string>() + "'");
    MlpBundle bundle;
    bundle.network.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (bundle.network.layer_sizes.size() < 2 ||
        weights.size() != bundle.network.layer_sizes.size() - 1 || weights.size() != biases.size())
        throw std::runtime_error("mlp: inconsistent layer shapes");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::size_t rows = bundle.network.layer_sizes[l + 1];
        const std::size_t cols = bundle.network.layer_sizes[l];
        Mat w(rows, cols);
        if (weights[l].size() != rows)
            throw std::runtime_error("mlp: weight matrix " + std::to_string(l) + " has " +
                                     std::to_string(weights[l].size()) + " rows, expected " +
                                     std::to_string(rows));
        for (std::size_t i = 0; i < rows; ++i) {
            const auto row = weights[l][i].get<std::vector<double>>();
            if (row.size() != cols)
                throw std::runtime_error("mlp: weight matrix " + std::to_string(l) +
                                         " row width mismatch");
            for (std::size_t k = 0; k < cols; ++k) w(i, k) = row[k];
        }
        bundle.network.weights.push_back(std::move(w));
        const auto b = biases[l].get<std::vector<double>>();
        if (b.size() != rows) throw std::runtime_error("mlp: bias length mismatch");
        bundle.network.biases.push_back(b);
    }
    bundle.train_config = train_config_from_json(j.at("train_config"));
    bundle.final_mse = j.at("final_mse").get<double>();
    return bundle;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace polarface
