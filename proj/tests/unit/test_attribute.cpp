#include <doctest.h>

#include <cmath>
#include <fstream>

#include "latentprobe/attribute.hpp"
#include "latentprobe/latent.hpp"
#include "latentprobe/latent_io.hpp"
#include "latentprobe/probe.hpp"
#include "latentprobe/synthetic.hpp"
#include "test_util.hpp"

using namespace latentprobe;
using latentprobe::testing::random_latents;

TEST_CASE("attribute_vector examples") {
    const std::vector<LatentVector> pair{LatentVector{1.0, 1.0}, LatentVector{3.0, 3.0}};
    CHECK(attribute_vector(pair) == LatentVector{2.0, 2.0});
    const std::vector<LatentVector> one{LatentVector{0.3, -7.0}};
    CHECK(attribute_vector(one) == one.front());
    const LatentVector v{0.25, -1.5, 4.0};
    const std::vector<LatentVector> sym{v, negated(v)};
    CHECK(attribute_vector(sym) == LatentVector::zeros(3));
    CHECK_THROWS_AS(attribute_vector(std::vector<LatentVector>{}), ConfigError);
    const std::vector<LatentVector> ragged{LatentVector{1.0}, LatentVector{1.0, 2.0}};
    CHECK_THROWS_AS(attribute_vector(ragged), DimensionError);
}

TEST_CASE("property: attribute_vector is permutation-invariant and linear") {
    SeededRng rng(4);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.next_u64() % 8;
        const auto s = random_latents(n, 6, rng.next_u64(), -4.0, 4.0);
        auto r = s;
        std::reverse(r.begin(), r.end());
        const auto a = attribute_vector(s);
        const auto b = attribute_vector(r);
        // powers of two keep scaling exact
        std::vector<LatentVector> scaled_set;
        for (const auto& v : s) scaled_set.push_back(scaled(v, 4.0));
        const auto c = attribute_vector(scaled_set);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(std::abs(a[i] - b[i]) <= 1e-12);
            CHECK(c[i] == 4.0 * a[i]);
        }
        const double k = rng.uniform(-3.0, 3.0);
        scaled_set.clear();
        for (const auto& v : s) scaled_set.push_back(scaled(v, k));
        const auto d = attribute_vector(scaled_set);
        for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(d[i] - k * a[i]) <= 1e-12);
    }
}

TEST_CASE("apply_attribute examples") {
    const AttributeRecipe recipe{"r", {LatentVector{1.0, 0.0}}, {LatentVector{0.0, 1.0}}};
    CHECK(apply_attribute(LatentVector{0.0, 0.0}, recipe) == LatentVector{1.0, -1.0});
    CHECK(apply_attribute(LatentVector{0.0, 0.0}, recipe, EditDirection::remove) == LatentVector{-1.0, 1.0});

    const AttributeRecipe same{"s", {LatentVector{0.3, 0.6}}, {LatentVector{0.3, 0.6}}};
    const LatentVector o{0.125, -0.7};
    CHECK(apply_attribute(o, same) == o);

    CHECK_THROWS_AS(apply_attribute(LatentVector{0.0}, recipe), DimensionError);
    const AttributeRecipe empty{"e", {}, {LatentVector{1.0}}};
    CHECK_THROWS_AS(apply_attribute(LatentVector{0.0}, empty), ConfigError);
}

TEST_CASE("edit then inverse edit recovers the original") {
    // dyadic values: every intermediate sum is exactly representable
    const AttributeRecipe recipe{"mouth", {LatentVector{0.75, -0.25}, LatentVector{0.25, 0.25}},
                                 {LatentVector{0.125, 0.5}}};
    const LatentVector o{0.5, -0.375};
    const auto there = apply_attribute(o, recipe);
    CHECK(apply_attribute(there, recipe, EditDirection::remove) == o);
    const AttributeRecipe swapped{"closed", recipe.negative, recipe.positive};
    CHECK(apply_attribute(there, swapped) == o);

    // arbitrary reals: exact up to one rounding of the intermediate sum
    const auto vs = random_latents(50, 16, 8);
    for (std::size_t k = 0; k + 2 < vs.size(); k += 3) {
        const AttributeRecipe r{"x", {vs[k]}, {vs[k + 1]}};
        const auto back = apply_attribute(apply_attribute(vs[k + 2], r), r, EditDirection::remove);
        for (std::size_t i = 0; i < 16; ++i) CHECK(std::abs(back[i] - vs[k + 2][i]) <= 1e-12);
    }
}

TEST_CASE("generate_variants") {
    const LatentVector base{0.5, 0.5};
    CHECK(generate_variants(base, std::vector<RecipeEdit>{}).empty());

    const AttributeRecipe a{"a", {LatentVector{0.25, 0.0}}, {LatentVector{0.0, 0.0}}};
    const AttributeRecipe b{"b", {LatentVector{0.0, 0.125}}, {LatentVector{0.0, 0.0}}};
    const std::vector<RecipeEdit> both{{&a, {EditDirection::add, EditDirection::remove}}};
    const auto v = generate_variants(base, both);
    REQUIRE(v.size() == 2);
    CHECK(v[0].latent == LatentVector{0.75, 0.5});
    CHECK(v[1].latent == LatentVector{0.25, 0.5});
    CHECK(v[1].direction == EditDirection::remove);
    CHECK(v[0].name == "a");

    const std::vector<RecipeEdit> two{{&a, {EditDirection::add}}, {&b, {EditDirection::add}}};
    const auto independent = generate_variants(base, two);
    CHECK(independent[1].latent == LatentVector{0.5, 0.625});
    const auto chained = generate_variants(base, two, true);
    CHECK(chained[0].latent == LatentVector{0.75, 0.5});
    CHECK(chained[1].latent == LatentVector{0.75, 0.625});

    const AttributeRecipe wide{"w", {LatentVector{0.0, 0.0, 0.0}}, {LatentVector{0.0, 0.0, 0.0}}};
    const std::vector<RecipeEdit> bad{{&wide, {EditDirection::add}}};
    CHECK_THROWS_AS(generate_variants(base, bad), DimensionError);
    const std::vector<RecipeEdit> null{{nullptr, {EditDirection::add}}};
    CHECK_THROWS_AS(generate_variants(base, null), ConfigError);
}

TEST_CASE("identity preserved under the margin condition on the synthetic backend") {
    SyntheticBackend backend(SyntheticParams{});
    SeededRng rng(12);
    for (std::uint64_t t = 0; t < 50; ++t) {
        const auto base = margin_latent(64, 0.6, t);
        std::vector<double> pos(64), neg(64);
        for (std::size_t i = 0; i < 64; ++i) {
            pos[i] = rng.uniform(-0.25, 0.25);
            neg[i] = rng.uniform(-0.25, 0.25);
        }
        const AttributeRecipe r{"m", {LatentVector(pos)}, {LatentVector(neg)}};
        const std::vector<LatentVector> zs{base, apply_attribute(base, r), apply_attribute(base, r, EditDirection::remove)};
        const auto es = backend.generate_embed(zs);
        CHECK(distance(es[0], es[1]) == 0.0);
        CHECK(distance(es[0], es[2]) == 0.0);
        // unfused path as well
        CHECK(distance(backend.embed(backend.generate(zs[0])), backend.embed(backend.generate(zs[1]))) == 0.0);
    }
}

TEST_CASE("recipes load relative to their own directory") {
    latentprobe::testing::TempDir dir("recipe");
    std::filesystem::create_directories(dir / "sub");
    write_latents(dir / "sub" / "pos.lvec", std::vector<LatentVector>{LatentVector{1.0, 0.0}, LatentVector{0.0, 0.0}});
    write_latents(dir / "sub" / "neg.lvec", std::vector<LatentVector>{LatentVector{0.0, 0.5}});
    {
        std::ofstream(dir / "sub" / "r.json") << R"({"name": "glasses", "positive": "pos.lvec", "negative": "neg.lvec"})";
    }
    const auto r = load_recipe(dir / "sub" / "r.json");
    CHECK(r.name == "glasses");
    CHECK(attribute_delta(r) == LatentVector{0.5, -0.5});
    {
        std::ofstream(dir / "bad.json") << R"({"name": "x", "positive": "pos.lvec"})";
    }
    CHECK_THROWS_AS(load_recipe(dir / "bad.json"), ConfigError);
    CHECK_THROWS_AS(load_recipe(dir / "missing.json"), ConfigError);
}
