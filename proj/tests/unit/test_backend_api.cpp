#include <doctest.h>

#include <atomic>
#include <cmath>

#include "latentprobe/backend.hpp"
#include "latentprobe/synthetic.hpp"
#include "test_util.hpp"

using namespace latentprobe;

namespace {

// Unfused backend that reports concurrency so score_batch may thread it.
// Identity is the latent itself, padded into an image of the same size.
class EchoBackend : public Backend {
public:
    EchoBackend(std::size_t dim, bool concurrent, long fail_at = -1) : fail_at_(fail_at) {
        info_.latent_dim = dim;
        info_.embedding_dim = dim;
        info_.image_shape = {1, 1, dim};
        info_.backend_name = "echo";
        info_.concurrent_calls = concurrent;
    }
    const BackendInfo& info() const override { return info_; }
    ImageTensor generate(const LatentVector& z) override {
        check_latent(z);
        ++generated;
        if (fail_at_ >= 0 && z[0] == static_cast<double>(fail_at_)) {
            throw BackendError("backend-api", "forced failure");
        }
        return ImageTensor(info_.image_shape, z.values());
    }
    Embedding embed(const ImageTensor& x) override {
        check_image(x);
        return Embedding(std::vector<double>(x.values().begin(), x.values().end()));
    }
    std::atomic<std::size_t> generated{0};

private:
    BackendInfo info_;
    long fail_at_;
};

}  // namespace

TEST_CASE("distance examples") {
    CHECK(distance(Embedding{1.0, 0.0}, Embedding{0.0, 1.0}) == 2.0);
    CHECK(distance(Embedding{0.5, 0.5, 0.0}, Embedding{0.0, 0.0, 0.0}) == 0.5);
    CHECK(distance(Embedding{0.3, -0.7}, Embedding{0.3, -0.7}) == 0.0);
    CHECK_THROWS_AS(distance(Embedding{1.0}, Embedding{1.0, 2.0}), DimensionError);
}

TEST_CASE("property: distance is symmetric, non-negative, zero on the diagonal") {
    SeededRng rng(8);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.next_u64() % 64;
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform(-5, 5);
            b[i] = rng.uniform(-5, 5);
        }
        const Embedding ea(a), eb(b);
        CHECK(distance(ea, eb) >= 0.0);
        CHECK(distance(ea, eb) == doctest::Approx(distance(eb, ea)).epsilon(1e-14));
        CHECK(distance(ea, ea) == 0.0);
    }
}

TEST_CASE("identity_score reductions") {
    const Embedding e{0.0, 0.0};
    const TargetIdentity mean({Embedding{1.0, 0.0}, Embedding{0.0, 3.0}});
    CHECK(identity_score(e, mean) == 5.0);
    const TargetIdentity min({Embedding{1.0, 0.0}, Embedding{0.0, 3.0}}, TargetReduction::min);
    CHECK(identity_score(e, min) == 1.0);
    const TargetIdentity single({Embedding{1.0, 0.0}});
    CHECK(identity_score(e, single) == 1.0);
}

TEST_CASE("target identity validation") {
    CHECK_THROWS_AS(TargetIdentity(std::vector<Embedding>{}), ConfigError);
    CHECK_THROWS_AS(TargetIdentity({Embedding{1.0}, Embedding{1.0, 2.0}}), DimensionError);
    CHECK_THROWS_AS(Embedding({1.0, INFINITY}), ConfigError);
}

TEST_CASE("image tensor validation") {
    CHECK_THROWS_AS(ImageTensor({1, 2, 2}, {0.0, 0.0, 0.0}), DimensionError);
    CHECK_THROWS_AS(ImageTensor({1, 1, 1}, {std::nan("")}), ConfigError);
    BackendInfo info;
    CHECK_THROWS_AS(info.validate(), ConfigError);
}

TEST_CASE("score_batch equals per-item scoring on the synthetic backend") {
    SyntheticBackend backend(SyntheticParams{});
    const auto zs = latentprobe::testing::random_latents(100, 64, 3);
    const TargetIdentity target({backend.embed(backend.generate(zs[17]))});
    const auto batch = score_batch(zs, target, backend);
    REQUIRE(batch.size() == zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) {
        // fused and unfused paths agree; the squash round trip costs a few ulps
        const double single = identity_score(backend.embed(backend.generate(zs[i])), target);
        CHECK(std::abs(batch[i] - single) <= 1e-9);
    }
    CHECK(batch[17] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("score_batch follows input permutations") {
    SyntheticBackend backend(SyntheticParams{16, 8, 4, 1});
    auto zs = latentprobe::testing::random_latents(50, 16, 9);
    const TargetIdentity target({Embedding(std::vector<double>(8, 0.25))});
    const auto base = score_batch(zs, target, backend);
    SeededRng rng(10);
    std::vector<std::size_t> perm(zs.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.next_u64() % (i + 1)]);
    std::vector<LatentVector> shuffled;
    for (auto p : perm) shuffled.push_back(zs[p]);
    const auto again = score_batch(shuffled, target, backend);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        CHECK(again[i] == base[perm[i]]);
    }
}

TEST_CASE("threaded score_batch is identical to the serial one") {
    const auto zs = latentprobe::testing::random_latents(97, 5, 4);
    const TargetIdentity target({Embedding{0.1, 0.2, 0.3, 0.4, 0.5}});
    EchoBackend serial(5, true);
    EchoBackend threaded(5, true);
    const auto a = score_batch(zs, target, serial);
    const auto b = score_batch(zs, target, threaded, BatchOptions{4});
    CHECK(a == b);
    CHECK(threaded.generated == zs.size());

    SyntheticBackend synthetic(SyntheticParams{5, 5, 2, 3});
    CHECK(score_batch(zs, target, synthetic) == score_batch(zs, target, synthetic, BatchOptions{3}));
}

TEST_CASE("score_batch reports dimension errors with the item index before any call") {
    EchoBackend backend(3, false);
    std::vector<LatentVector> zs{LatentVector{1.0, 2.0, 3.0}, LatentVector{1.0, 2.0}};
    const TargetIdentity target({Embedding{0.0, 0.0, 0.0}});
    try {
        score_batch(zs, target, backend);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        CHECK(std::string(e.what()).find("item 1") != std::string::npos);
    }
    CHECK(backend.generated == 0);
}

TEST_CASE("backend failures surface as BackendError naming the item") {
    const TargetIdentity target({Embedding{0.0, 0.0}});
    std::vector<LatentVector> zs;
    for (int i = 0; i < 40; ++i) zs.push_back(LatentVector{static_cast<double>(i), 0.0});
    for (std::size_t threads : {1u, 4u}) {
        EchoBackend backend(2, true, 33);
        try {
            score_batch(zs, target, backend, BatchOptions{threads});
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(std::string(e.what()).find("item 33") != std::string::npos);
        }
    }
}

TEST_CASE("CountingBackend counts latents on both paths") {
    SyntheticBackend synthetic(SyntheticParams{8, 4, 2, 1});
    CountingBackend counting(synthetic);
    const auto zs = latentprobe::testing::random_latents(12, 8, 1);
    counting.generate_embed(zs);
    CHECK(counting.latents_evaluated() == 12);
    counting.embed(counting.generate(zs[0]));
    CHECK(counting.latents_evaluated() == 13);
    CHECK(counting.embed_calls() == 1);
}
