#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>

#include "latentprobe/latent.hpp"
#include "latentprobe/latent_io.hpp"
#include "test_util.hpp"

using namespace latentprobe;
using latentprobe::testing::TempDir;

namespace {

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_SUITE("rng") {
    // Known answers from tests/oracles/synthetic_oracle.py (independent Python port).
    TEST_CASE("xoshiro256** stream matches the reference port") {
        SeededRng rng(12345);
        CHECK(rng.next_u64() == 0xbe6a36374160d49bULL);
        CHECK(rng.next_u64() == 0x214aaa0637a688c6ULL);
        CHECK(rng.next_u64() == 0xf69d16de9954d388ULL);
        CHECK(rng.next_u64() == 0x0c60048c4e96e033ULL);
    }

    TEST_CASE("substream derivation matches the reference port") {
        auto s = SeededRng::substream(99, 3);
        CHECK(s.next_u64() == 0x139124531dc51e8dULL);
        CHECK(s.next_u64() == 0x0ef45fc7d9859775ULL);
    }

    TEST_CASE("distinct substreams differ") {
        auto a = SeededRng::substream(1, 0);
        auto b = SeededRng::substream(1, 1);
        CHECK(a.next_u64() != b.next_u64());
    }
}

TEST_SUITE("sample_box") {
    TEST_CASE("bounds containment") {
        SeededRng rng(7);
        const auto box = SamplingBox::unit(4);
        const auto v = sample_box(box, 3, rng);
        REQUIRE(v.size() == 3);
        for (const auto& z : v) {
            CHECK(z.size() == 4);
            CHECK(box.contains(z));
        }
    }

    TEST_CASE("degenerate box returns its single point") {
        SeededRng rng(1);
        const SamplingBox box(LatentVector{0.5, -0.25}, LatentVector{0.5, -0.25});
        for (const auto& z : sample_box(box, 17, rng)) {
            CHECK(z == LatentVector{0.5, -0.25});
        }
    }

    TEST_CASE("per-coordinate mean of 10000 draws is within 0.05 of 0") {
        SeededRng rng(2024);
        const auto v = sample_box(SamplingBox::unit(2), 10000, rng);
        double m0 = 0.0, m1 = 0.0;
        for (const auto& z : v) {
            m0 += z[0];
            m1 += z[1];
        }
        CHECK(std::abs(m0 / 10000.0) < 0.05);
        CHECK(std::abs(m1 / 10000.0) < 0.05);
    }

    TEST_CASE("invalid requests") {
        SeededRng rng(1);
        CHECK_THROWS_AS(SamplingBox(LatentVector{1.0}, LatentVector{0.0}), ConfigError);
        CHECK_THROWS_AS(SamplingBox(LatentVector{0.0}, LatentVector{0.0, 1.0}), ConfigError);
        CHECK_THROWS_AS(sample_box(SamplingBox::unit(2), 0, rng), ConfigError);
    }

    TEST_CASE("property: samples stay inside random boxes") {
        SeededRng gen(99);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t dim = 1 + gen.next_u64() % 16;
            std::vector<double> lo(dim), hi(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                const double a = gen.uniform(-50.0, 50.0);
                const double b = gen.uniform(-50.0, 50.0);
                lo[i] = std::min(a, b);
                hi[i] = gen.next_unit() < 0.1 ? lo[i] : std::max(a, b);
            }
            const SamplingBox box{LatentVector(lo), LatentVector(hi)};
            SeededRng rng(gen.next_u64());
            for (const auto& z : sample_box(box, 50, rng)) {
                REQUIRE(box.contains(z));
            }
        }
    }

    TEST_CASE("equal seeds give identical sequences") {
        SeededRng a(31337), b(31337);
        const auto va = sample_box(SamplingBox::unit(9), 20, a);
        const auto vb = sample_box(SamplingBox::unit(9), 20, b);
        for (std::size_t k = 0; k < va.size(); ++k) {
            for (std::size_t i = 0; i < 9; ++i) {
                CHECK(std::bit_cast<std::uint64_t>(va[k][i]) == std::bit_cast<std::uint64_t>(vb[k][i]));
            }
        }
    }
}

TEST_SUITE("shift_box / noise_box") {
    TEST_CASE("shift_box arithmetic") {
        const auto b = shift_box(LatentVector{-1.0}, LatentVector{1.0}, LatentVector{1.0}, 1.0);
        CHECK(b.lower() == LatentVector{0.0});
        CHECK(b.upper() == LatentVector{2.0});

        const auto same = shift_box(LatentVector{-1.0, -1.0}, LatentVector{1.0, 1.0}, LatentVector{0.3, 0.7}, 0.0);
        CHECK(same.lower() == LatentVector{-1.0, -1.0});
        CHECK(same.upper() == LatentVector{1.0, 1.0});

        const auto c = shift_box(filled(2, -1.0), filled(2, 1.0), LatentVector{0.5, -0.5}, 0.4);
        CHECK(c.lower()[0] == doctest::Approx(-0.8).epsilon(1e-15));
        CHECK(c.upper()[0] == doctest::Approx(1.2).epsilon(1e-15));
        CHECK(c.lower()[1] == doctest::Approx(-1.2).epsilon(1e-15));
        CHECK(c.upper()[1] == doctest::Approx(0.8).epsilon(1e-15));
    }

    TEST_CASE("shift_box length mismatch") {
        CHECK_THROWS_AS(shift_box(filled(2, -1.0), filled(2, 1.0), filled(3, 0.0), 0.5), ConfigError);
    }

    TEST_CASE("noise_box arithmetic and swap rule") {
        const auto a = noise_box(LatentVector{-0.8}, LatentVector{0.8}, LatentVector{1.0}, 0.1);
        CHECK(a.lower()[0] == doctest::Approx(-0.7).epsilon(1e-15));
        CHECK(a.upper()[0] == doctest::Approx(0.9).epsilon(1e-15));

        // I_opt = -0.2, beta = 0: raw [0.2, -0.2] stored as [-0.2, 0.2]
        const auto b = noise_box(LatentVector{0.2}, LatentVector{-0.2}, LatentVector{1.0}, 0.0);
        CHECK(b.lower() == LatentVector{-0.2});
        CHECK(b.upper() == LatentVector{0.2});

        // I_opt = [1, -1], beta = 0.5 (hand arithmetic):
        // coord 0: [-1+0.5, 1+0.5] = [-0.5, 1.5]; coord 1: raw [1.5, -0.5] -> [-0.5, 1.5]
        const LatentVector iopt{1.0, -1.0};
        const auto c = noise_box(negated(iopt), iopt, filled(2, 1.0), 0.5);
        CHECK(c.lower() == LatentVector{-0.5, -0.5});
        CHECK(c.upper() == LatentVector{1.5, 1.5});
    }

    TEST_CASE("property: boxes are linear in scale") {
        SeededRng gen(5);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t dim = 1 + gen.next_u64() % 12;
            std::vector<double> anchor(dim);
            for (auto& v : anchor) v = gen.uniform(-3.0, 3.0);
            const LatentVector z(anchor);
            const auto shifted = shift_box(filled(dim, -1.0), filled(dim, 1.0), z, 0.2);
            const auto noisy = noise_box(negated(z), z, filled(dim, 1.0), 0.2);
            for (std::size_t i = 0; i < dim; ++i) {
                CHECK(std::abs(shifted.lower()[i] - (-1.0 + 0.2 * z[i])) <= 1e-12);
                CHECK(std::abs(shifted.upper()[i] - (1.0 + 0.2 * z[i])) <= 1e-12);
                const double lo = std::min(-z[i] + 0.2, z[i] + 0.2);
                const double hi = std::max(-z[i] + 0.2, z[i] + 0.2);
                CHECK(std::abs(noisy.lower()[i] - lo) <= 1e-12);
                CHECK(std::abs(noisy.upper()[i] - hi) <= 1e-12);
            }
        }
    }
}

TEST_SUITE("latent vectors") {
    TEST_CASE("non-finite values rejected, out-of-range kept") {
        CHECK_THROWS_AS(LatentVector({0.0, std::nan("")}), ConfigError);
        CHECK_THROWS_AS(LatentVector({INFINITY}), ConfigError);
        const LatentVector big{7.5, -42.0};
        CHECK(big[0] == 7.5);
        CHECK(big[1] == -42.0);
    }

    TEST_CASE("sign with sign(0) = 0") {
        CHECK(sign(LatentVector{-0.3, 0.0, 2.0}) == LatentVector{-1.0, 0.0, 1.0});
    }
}

TEST_SUITE("latent files") {
    TEST_CASE("round trip of 5 vectors at D=200 is bit-exact") {
        TempDir dir("io");
        auto vs = latentprobe::testing::random_latents(5, 200, 11);
        // values already on the f32 grid survive unchanged
        std::vector<LatentVector> f32;
        for (const auto& v : vs) {
            std::vector<double> r(v.size());
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<float>(v[i]);
            f32.emplace_back(r);
        }
        write_latents(dir / "a.lvec", f32);
        CHECK(read_latents(dir / "a.lvec") == f32);
        CHECK(std::filesystem::file_size(dir / "a.lvec") == 16 + 5 * 200 * 4);
    }

    TEST_CASE("property: write(read(write(x))) is byte-identical and JSON agrees with binary") {
        TempDir dir("io2");
        SeededRng gen(77);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t dim = 1 + gen.next_u64() % 40;
            const std::size_t n = 1 + gen.next_u64() % 6;
            const auto vs = latentprobe::testing::random_latents(n, dim, gen.next_u64(), -100.0, 100.0);
            write_latents(dir / "x.lvec", vs);
            const auto first = latentprobe::testing::slurp(dir / "x.lvec");
            const auto back = read_latents(dir / "x.lvec");
            write_latents(dir / "y.lvec", back);
            CHECK(latentprobe::testing::slurp(dir / "y.lvec") == first);
            write_latents(dir / "x.json", vs, LatentFormat::json);
            CHECK(read_latents(dir / "x.json") == back);
        }
    }

    TEST_CASE("header layout is little-endian") {
        const RawVectors raw{2, {{1.0, -2.0}}};
        const auto bytes = encode_lvec(raw);
        REQUIRE(bytes.size() == 24);
        CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "LVEC");
        CHECK(bytes[4] == 1);
        CHECK(bytes[8] == 2);
        CHECK(bytes[12] == 1);
        // 1.0f = 0x3F800000
        CHECK(bytes[16] == 0x00);
        CHECK(bytes[19] == 0x3F);
    }

    TEST_CASE("wrong magic is a format error at offset 0") {
        auto bytes = encode_lvec(RawVectors{1, {{0.5}}});
        bytes[0] = 'X';
        try {
            decode_lvec(bytes);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 0);
        }
    }

    TEST_CASE("count disagreeing with payload length is a format error") {
        auto bytes = encode_lvec(RawVectors{2, {{0.5, 0.25}, {1.0, 2.0}}});
        bytes.resize(bytes.size() - 4);
        try {
            decode_lvec(bytes);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == bytes.size());
        }
        auto longer = encode_lvec(RawVectors{2, {{0.5, 0.25}}});
        longer.push_back(0);
        try {
            decode_lvec(longer);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 24);
        }
    }

    TEST_CASE("bad version, zero dim, truncated header, non-finite payload") {
        auto bytes = encode_lvec(RawVectors{1, {{0.5}}});
        auto v = bytes;
        v[4] = 2;
        CHECK_THROWS_AS(decode_lvec(v), FormatError);
        auto d = bytes;
        d[8] = 0;
        CHECK_THROWS_AS(decode_lvec(d), FormatError);
        CHECK_THROWS_AS(decode_lvec(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 10)), FormatError);
        auto nan = bytes;
        nan[16] = 0x00;
        nan[17] = 0x00;
        nan[18] = 0xC0;
        nan[19] = 0x7F;
        try {
            decode_lvec(nan);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 16);
        }
    }

    TEST_CASE("file errors name the path") {
        TempDir dir("io3");
        write_bytes(dir / "bad.lvec", {'N', 'O', 'P', 'E', 0, 0, 0, 0});
        try {
            read_latents(dir / "bad.lvec");
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("bad.lvec") != std::string::npos);
        }
        CHECK_THROWS_AS(read_latents(dir / "missing.lvec"), ConfigError);
    }

    TEST_CASE("JSON reader validates shape") {
        TempDir dir("io4");
        {
            std::ofstream(dir / "a.json") << R"({"dim": 2, "vectors": [[1, 2], [3]]})";
        }
        CHECK_THROWS_AS(read_latents(dir / "a.json"), FormatError);
        {
            std::ofstream(dir / "b.json") << R"({"dim": 2, "vectors": [[1, 2], [3, 4]]})";
        }
        const auto v = read_latents(dir / "b.json");
        REQUIRE(v.size() == 2);
        CHECK(v[1] == LatentVector{3.0, 4.0});
    }

    TEST_CASE("writer rejects empty or ragged input") {
        TempDir dir("io5");
        CHECK_THROWS_AS(write_latents(dir / "e.lvec", std::vector<LatentVector>{}), ConfigError);
        const std::vector<LatentVector> ragged{LatentVector{1.0}, LatentVector{1.0, 2.0}};
        CHECK_THROWS_AS(write_latents(dir / "r.lvec", ragged), DimensionError);
    }
}
