#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "latentprobe/backend.hpp"
#include "latentprobe/error.hpp"

namespace latentprobe {

struct SearchConfig {
    std::size_t candidates = 1000;  // N, reused for every round
    double threshold = 0.4;         // T, squared-L2 units
    std::size_t latent_dim = 200;   // D
    double alpha_start = 0.1;
    double alpha_step = 0.1;
    double alpha_max = 1.0;
    double beta_start = 0.1;
    double beta_step = 0.1;
    double beta_max = 1.0;
    std::size_t max_rounds_per_stage = 50;
    std::uint64_t seed = 0;
    // When false the search stops after the coarse stage.
    bool fine_stage = true;
    // Worker threads for scoring within a round.
    std::size_t threads = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

enum class Stage { init, coarse, fine };
enum class Termination { threshold, round_cap_coarse, round_cap_fine };

std::string_view to_string(Stage stage);
std::string_view to_string(Termination termination);
Stage stage_from_string(std::string_view text);
Termination termination_from_string(std::string_view text);

struct RoundRecord {
    Stage stage = Stage::init;
    std::size_t round_index = 0;
    double alpha_or_beta = 0.0;
    std::size_t candidates_evaluated = 0;
    double best_score_after = 0.0;
    std::uint64_t rng_substream_id = 0;

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

using SearchTrace = std::vector<RoundRecord>;

struct SearchResult {
    LatentVector best_latent;
    double best_score = 0.0;
    Termination terminated_by = Termination::threshold;
    SearchTrace trace;
};

/// Raised when a backend call fails mid-search; the trace up to the failing
/// round is preserved.
class SearchAborted : public Error {
public:
    SearchAborted(const std::string& message, SearchTrace partial)
        : Error("search-engine", message), trace_(std::move(partial)) {}

    const SearchTrace& trace() const noexcept { return trace_; }

private:
    SearchTrace trace_;
};

/// First index attaining the minimum under strict less-than.
std::pair<std::size_t, LatentVector> select_optimal(std::span<const LatentVector> candidates,
                                                    std::span<const double> scores);

struct Incumbent {
    LatentVector latent;
    double score = 0.0;
};

// Substream ids: init = 0, coarse round r = 1 + r, fine round r = 1 + cap + r.
std::uint64_t substream_id(Stage stage, std::size_t round, std::size_t max_rounds_per_stage);

/// Greedy box search for a latent whose embedding matches the target. The
/// engine is single-owner; stage methods append to the trace it holds.
class SearchEngine {
public:
    /// Validates the config against the backend before any backend call.
    SearchEngine(Backend& backend, TargetIdentity target, SearchConfig config);

    /// Sample N from [-1, 1]^D and keep the best.
    Incumbent init_stage();
    /// Boxes [-1 + a*I_opt, 1 + a*I_opt] with a growing by alpha_step to alpha_max.
    Incumbent coarse_stage(Incumbent incumbent);
    /// Boxes around +-I_opt shifted by b with b growing by beta_step to beta_max.
    Incumbent fine_stage(Incumbent incumbent);

    SearchResult run();

    const SearchTrace& trace() const noexcept { return trace_; }
    const SearchConfig& config() const noexcept { return config_; }
    const TargetIdentity& target() const noexcept { return target_; }

    /// Rounds executed by the most recent coarse/fine stage call.
    std::size_t last_stage_rounds() const noexcept { return last_stage_rounds_; }

private:
    std::vector<double> score(std::span<const LatentVector> candidates);
    Incumbent greedy_stage(Incumbent incumbent, Stage stage);

    Backend& backend_;
    TargetIdentity target_;
    SearchConfig config_;
    SearchTrace trace_;
    std::size_t last_stage_rounds_ = 0;
};

SearchResult search(const TargetIdentity& target, Backend& backend, const SearchConfig& config);

/// Independent re-scoring of result.best_latent. Throws Error if the
/// re-evaluated score differs from best_score by more than tolerance, or if
/// a threshold termination does not actually satisfy the threshold.
double verify_search_result(const SearchResult& result, const TargetIdentity& target, Backend& backend,
                            double threshold, double tolerance = 1e-6);

}  // namespace latentprobe
