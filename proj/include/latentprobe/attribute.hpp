#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latentprobe/vector.hpp"

namespace latentprobe {

/// Two exemplar sets whose latent means give the attribute direction:
/// delta = mean(positive) - mean(negative).
struct AttributeRecipe {
    std::string name;
    std::vector<LatentVector> positive;  // attribute present
    std::vector<LatentVector> negative;  // attribute absent

    void validate() const;
};

enum class EditDirection { add, remove };

std::string_view to_string(EditDirection direction);
EditDirection direction_from_string(std::string_view text);

/// Coordinate-wise mean, accumulated in input order.
LatentVector attribute_vector(std::span<const LatentVector> exemplars);

/// mean(positive) - mean(negative)
LatentVector attribute_delta(const AttributeRecipe& recipe);

/// original + delta for add, original - delta for remove (the swapped recipe).
LatentVector apply_attribute(const LatentVector& original, const AttributeRecipe& recipe,
                             EditDirection direction = EditDirection::add);

struct RecipeEdit {
    const AttributeRecipe* recipe = nullptr;
    std::vector<EditDirection> directions;
};

struct Variant {
    std::string name;
    EditDirection direction = EditDirection::add;
    LatentVector latent;
};

/// One variant per (recipe, direction). Independent mode applies each edit to
/// the base; chain mode applies them cumulatively in order.
std::vector<Variant> generate_variants(const LatentVector& base, std::span<const RecipeEdit> edits,
                                       bool chain = false);

/// {"name": ..., "positive": "path.lvec", "negative": "path.lvec"}; relative
/// paths resolve against the recipe file's directory.
AttributeRecipe load_recipe(const std::filesystem::path& path);

}  // namespace latentprobe
