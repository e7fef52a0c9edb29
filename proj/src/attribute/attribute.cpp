#include "latentprobe/attribute.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "latentprobe/latent_io.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "attribute-arith";

void require_dim(const LatentVector& v, std::size_t dim, const std::string& what) {
    if (v.size() != dim) {
        throw DimensionError(kModule, what + " has length " + std::to_string(v.size()) + ", expected " +
                                          std::to_string(dim));
    }
}

LatentVector add_scaled(const LatentVector& base, const LatentVector& delta, double sign) {
    require_dim(delta, base.size(), "attribute delta");
    std::vector<double> out(base.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = base[i] + sign * delta[i];
    }
    return LatentVector(std::move(out));
}

}  // namespace

void AttributeRecipe::validate() const {
    if (positive.empty() || negative.empty()) {
        throw ConfigError(kModule, "recipe \"" + name + "\" needs positive and negative exemplars");
    }
    const std::size_t dim = positive.front().size();
    for (std::size_t i = 0; i < positive.size(); ++i) {
        require_dim(positive[i], dim, "positive exemplar " + std::to_string(i));
    }
    for (std::size_t i = 0; i < negative.size(); ++i) {
        require_dim(negative[i], dim, "negative exemplar " + std::to_string(i));
    }
}

std::string_view to_string(EditDirection direction) {
    return direction == EditDirection::add ? "add" : "remove";
}

EditDirection direction_from_string(std::string_view text) {
    if (text == "add") return EditDirection::add;
    if (text == "remove") return EditDirection::remove;
    throw ConfigError(kModule, "unknown edit direction \"" + std::string(text) + "\"");
}

LatentVector attribute_vector(std::span<const LatentVector> exemplars) {
    if (exemplars.empty()) {
        throw ConfigError(kModule, "attribute_vector needs at least one exemplar");
    }
    const std::size_t dim = exemplars.front().size();
    std::vector<double> sum(dim, 0.0);
    for (std::size_t k = 0; k < exemplars.size(); ++k) {
        require_dim(exemplars[k], dim, "exemplar " + std::to_string(k));
        for (std::size_t i = 0; i < dim; ++i) {
            sum[i] += exemplars[k][i];
        }
    }
    const double count = static_cast<double>(exemplars.size());
    for (auto& v : sum) {
        v /= count;
    }
    return LatentVector(std::move(sum));
}

LatentVector attribute_delta(const AttributeRecipe& recipe) {
    recipe.validate();
    const auto pos = attribute_vector(recipe.positive);
    const auto neg = attribute_vector(recipe.negative);
    std::vector<double> delta(pos.size());
    for (std::size_t i = 0; i < delta.size(); ++i) {
        delta[i] = pos[i] - neg[i];
    }
    return LatentVector(std::move(delta));
}

LatentVector apply_attribute(const LatentVector& original, const AttributeRecipe& recipe, EditDirection direction) {
    return add_scaled(original, attribute_delta(recipe), direction == EditDirection::add ? 1.0 : -1.0);
}

std::vector<Variant> generate_variants(const LatentVector& base, std::span<const RecipeEdit> edits, bool chain) {
    std::vector<Variant> out;
    LatentVector current = base;
    for (const auto& edit : edits) {
        if (edit.recipe == nullptr) {
            throw ConfigError(kModule, "edit without a recipe");
        }
        const auto delta = attribute_delta(*edit.recipe);
        for (const auto direction : edit.directions) {
            const LatentVector& from = chain ? current : base;
            auto edited = add_scaled(from, delta, direction == EditDirection::add ? 1.0 : -1.0);
            if (chain) {
                current = edited;
            }
            out.push_back(Variant{edit.recipe->name, direction, std::move(edited)});
        }
    }
    return out;
}

AttributeRecipe load_recipe(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(kModule, "cannot open recipe " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(kModule, "recipe " + path.string() + ": " + e.what());
    }
    for (const char* key : {"name", "positive", "negative"}) {
        if (!j.contains(key) || !j.at(key).is_string()) {
            throw ConfigError(kModule, "recipe " + path.string() + " needs string field \"" + key + "\"");
        }
    }
    const auto dir = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const std::filesystem::path candidate(p);
        return candidate.is_absolute() ? candidate : dir / candidate;
    };
    AttributeRecipe recipe{j.at("name").get<std::string>(),
                           read_latents(resolve(j.at("positive").get<std::string>())),
                           read_latents(resolve(j.at("negative").get<std::string>()))};
    recipe.validate();
    return recipe;
}

}  // namespace latentprobe
