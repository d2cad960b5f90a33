#include "homecare/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "homecare/errors.hpp"

namespace homecare::model {

namespace {

using nlohmann::json;

json linear_to_json(const LinearModel& model) {
    return json{{"weights", model.weights},
                {"bias", model.bias},
                {"lambda", model.lambda},
                {"mean", model.standardization.mean},
                {"stddev", model.standardization.stddev}};
}

LinearModel linear_from_json(const json& j) {
    LinearModel model;
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.lambda = j.at("lambda").get<double>();
    model.standardization.mean = j.at("mean").get<std::vector<double>>();
    model.standardization.stddev = j.at("stddev").get<std::vector<double>>();
    if (model.standardization.mean.size() != model.weights.size() ||
        model.standardization.stddev.size() != model.weights.size()) {
        throw ParseError("linear model: standardization size does not match weights");
    }
    return model;
}

json forest_to_json(const ForestModel& model) {
    json trees = json::array();
    for (const Tree& tree : model.trees) {
        json nodes = json::array();
        for (const TreeNode& node : tree) {
            nodes.push_back(json::array({node.feature, node.threshold, node.left, node.right,
                                         node.positive_fraction, node.n_samples}));
        }
        trees.push_back(std::move(nodes));
    }
    return json{{"n_trees", model.params.n_trees},
                {"feature_fraction", model.params.feature_fraction},
                {"min_samples", model.params.min_samples},
                {"n_features", model.n_features},
                {"seed", model.seed},
                {"trees", std::move(trees)}};
}

ForestModel forest_from_json(const json& j) {
    ForestModel model;
    model.params.n_trees = j.at("n_trees").get<int>();
    model.params.feature_fraction = j.at("feature_fraction").get<double>();
    model.params.min_samples = j.at("min_samples").get<int>();
    model.n_features = j.at("n_features").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    for (const json& nodes : j.at("trees")) {
        Tree tree;
        tree.reserve(nodes.size());
        for (const json& node : nodes) {
            if (!node.is_array() || node.size() != 6) {
                throw ParseError("forest model: malformed tree node");
            }
            TreeNode n;
            n.feature = node[0].get<std::int32_t>();
            n.threshold = node[1].get<double>();
            n.left = node[2].get<std::int32_t>();
            n.right = node[3].get<std::int32_t>();
            n.positive_fraction = node[4].get<double>();
            n.n_samples = node[5].get<std::int32_t>();
            tree.push_back(n);
        }
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != static_cast<std::size_t>(model.params.n_trees)) {
        throw ParseError("forest model: tree count does not match n_trees");
    }
    return model;
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    json j;
    j["format"] = 1;
    j["info_level"] = std::string(data::to_string(model.level));
    if (const auto* linear = std::get_if<LinearModel>(&model.impl)) {
        j["kind"] = "linear";
        j["linear"] = linear_to_json(*linear);
    } else {
        j["kind"] = "forest";
        j["forest"] = forest_to_json(std::get<ForestModel>(model.impl));
    }
    return j.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<int>() != 1) {
            throw ParseError("model file: unsupported format version");
        }
        TrainedModel model;
        model.level = data::parse_info_level(j.at("info_level").get<std::string>());
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "linear") {
            model.impl = linear_from_json(j.at("linear"));
        } else if (kind == "forest") {
            model.impl = forest_from_json(j.at("forest"));
        } else {
            throw ParseError("model file: unknown kind '" + kind + "'");
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << model_to_json(model) << '\n';
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace homecare::model
