#include "latentprobe/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "latentprobe/latent.hpp"
#include "latentprobe/rng.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "search-engine";

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(kModule, message);
}

}  // namespace

void SearchConfig::validate() const {
    require(candidates >= 1, "N must be >= 1");
    require(threshold > 0.0 && std::isfinite(threshold), "T must be a positive finite number");
    require(latent_dim >= 1, "D must be >= 1");
    require(alpha_start >= 0.0 && alpha_start <= alpha_max && alpha_max <= 1.0,
            "alpha schedule must satisfy 0 <= alpha_start <= alpha_max <= 1");
    require(beta_start >= 0.0 && beta_start <= beta_max && beta_max <= 1.0,
            "beta schedule must satisfy 0 <= beta_start <= beta_max <= 1");
    require(alpha_step > 0.0, "alpha_step must be > 0");
    require(beta_step > 0.0, "beta_step must be > 0");
    require(max_rounds_per_stage >= 1, "max_rounds_per_stage must be >= 1");
    require(threads >= 1, "threads must be >= 1");
}

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::init:
            return "init";
        case Stage::coarse:
            return "coarse";
        case Stage::fine:
            return "fine";
    }
    return "unknown";
}

std::string_view to_string(Termination termination) {
    switch (termination) {
        case Termination::threshold:
            return "threshold";
        case Termination::round_cap_coarse:
            return "round_cap_coarse";
        case Termination::round_cap_fine:
            return "round_cap_fine";
    }
    return "unknown";
}

Stage stage_from_string(std::string_view text) {
    for (Stage s : {Stage::init, Stage::coarse, Stage::fine}) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError(kModule, "unknown stage \"" + std::string(text) + "\"");
}

Termination termination_from_string(std::string_view text) {
    for (Termination t : {Termination::threshold, Termination::round_cap_coarse, Termination::round_cap_fine}) {
        if (to_string(t) == text) return t;
    }
    throw ConfigError(kModule, "unknown termination \"" + std::string(text) + "\"");
}

std::pair<std::size_t, LatentVector> select_optimal(std::span<const LatentVector> candidates,
                                                    std::span<const double> scores) {
    if (candidates.empty()) {
        throw ConfigError(kModule, "select_optimal needs at least one candidate");
    }
    if (candidates.size() != scores.size()) {
        throw ConfigError(kModule, "select_optimal got " + std::to_string(candidates.size()) + " candidates and " +
                                       std::to_string(scores.size()) + " scores");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] < scores[best]) {
            best = i;
        }
    }
    return {best, candidates[best]};
}

std::uint64_t substream_id(Stage stage, std::size_t round, std::size_t max_rounds_per_stage) {
    switch (stage) {
        case Stage::init:
            return 0;
        case Stage::coarse:
            return 1 + round;
        case Stage::fine:
            return 1 + max_rounds_per_stage + round;
    }
    return 0;
}

SearchEngine::SearchEngine(Backend& backend, TargetIdentity target, SearchConfig config)
    : backend_(backend), target_(std::move(target)), config_(config) {
    config_.validate();
    const auto& info = backend_.info();
    if (info.latent_dim != config_.latent_dim) {
        throw ConfigError(kModule, "config D=" + std::to_string(config_.latent_dim) +
                                       " but backend latent_dim=" + std::to_string(info.latent_dim));
    }
    if (info.embedding_dim != target_.dim()) {
        throw ConfigError(kModule, "target embeddings have dimension " + std::to_string(target_.dim()) +
                                       " but backend embedding_dim=" + std::to_string(info.embedding_dim));
    }
}

std::vector<double> SearchEngine::score(std::span<const LatentVector> candidates) {
    std::vector<double> scores;
    try {
        scores = score_batch(candidates, target_, backend_, BatchOptions{config_.threads});
    } catch (const Error& e) {
        throw SearchAborted(std::string("backend failure: ") + e.what(), trace_);
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw SearchAborted("backend produced a non-finite score for item " + std::to_string(i), trace_);
        }
    }
    return scores;
}

Incumbent SearchEngine::init_stage() {
    const auto box = SamplingBox::unit(config_.latent_dim);
    const auto stream = substream_id(Stage::init, 0, config_.max_rounds_per_stage);
    auto rng = SeededRng::substream(config_.seed, stream);
    const auto candidates = sample_box(box, config_.candidates, rng);
    const auto scores = score(candidates);
    auto [index, latent] = select_optimal(candidates, scores);
    Incumbent incumbent{std::move(latent), scores[index]};
    trace_.push_back(RoundRecord{Stage::init, 0, 0.0, candidates.size(), incumbent.score, stream});
    spdlog::debug("init: best {} from {} candidates", incumbent.score, candidates.size());
    return incumbent;
}

Incumbent SearchEngine::coarse_stage(Incumbent incumbent) { return greedy_stage(std::move(incumbent), Stage::coarse); }

Incumbent SearchEngine::fine_stage(Incumbent incumbent) { return greedy_stage(std::move(incumbent), Stage::fine); }

Incumbent SearchEngine::greedy_stage(Incumbent incumbent, Stage stage) {
    const std::size_t dim = config_.latent_dim;
    const bool coarse = stage == Stage::coarse;
    double scale = coarse ? config_.alpha_start : config_.beta_start;
    const double step = coarse ? config_.alpha_step : config_.beta_step;
    const double cap = coarse ? config_.alpha_max : config_.beta_max;
    const LatentVector ones = filled(dim, 1.0);
    const LatentVector minus_ones = filled(dim, -1.0);

    if (incumbent.latent.size() != dim) {
        throw ConfigError(kModule, "incumbent has length " + std::to_string(incumbent.latent.size()) +
                                       ", expected " + std::to_string(dim));
    }

    std::size_t round = 0;
    while (incumbent.score > config_.threshold && round < config_.max_rounds_per_stage) {
        const SamplingBox box = coarse ? shift_box(minus_ones, ones, incumbent.latent, scale)
                                       : noise_box(negated(incumbent.latent), incumbent.latent, ones, scale);
        const auto stream = substream_id(stage, round, config_.max_rounds_per_stage);
        auto rng = SeededRng::substream(config_.seed, stream);
        const auto candidates = sample_box(box, config_.candidates, rng);
        const auto scores = score(candidates);
        auto [index, latent] = select_optimal(candidates, scores);
        // the incumbent stays in the pool: only a strictly better candidate replaces it
        if (scores[index] < incumbent.score) {
            incumbent = Incumbent{std::move(latent), scores[index]};
        }
        trace_.push_back(RoundRecord{stage, round, scale, candidates.size(), incumbent.score, stream});
        spdlog::debug("{} round {}: scale {} best {}", to_string(stage), round, scale, incumbent.score);
        if (scale < cap) {
            scale = std::min(scale + step, cap);
        }
        ++round;
    }
    last_stage_rounds_ = round;
    return incumbent;
}

SearchResult SearchEngine::run() {
    trace_.clear();
    Incumbent incumbent = init_stage();
    Termination termination = Termination::threshold;
    if (incumbent.score > config_.threshold) {
        incumbent = coarse_stage(std::move(incumbent));
        termination = Termination::round_cap_coarse;
    }
    if (incumbent.score > config_.threshold && config_.fine_stage) {
        incumbent = fine_stage(std::move(incumbent));
        termination = Termination::round_cap_fine;
    }
    if (incumbent.score <= config_.threshold) {
        termination = Termination::threshold;
    }
    return SearchResult{std::move(incumbent.latent), incumbent.score, termination, trace_};
}

SearchResult search(const TargetIdentity& target, Backend& backend, const SearchConfig& config) {
    SearchEngine engine(backend, target, config);
    return engine.run();
}

double verify_search_result(const SearchResult& result, const TargetIdentity& target, Backend& backend,
                            double threshold, double tolerance) {
    const std::vector<LatentVector> single{result.best_latent};
    const double rescored = score_batch(single, target, backend).front();
    if (!(std::abs(rescored - result.best_score) <= tolerance)) {
        throw Error(kModule, "re-evaluated score " + std::to_string(rescored) + " differs from reported " +
                                 std::to_string(result.best_score));
    }
    if (result.terminated_by == Termination::threshold && !(rescored <= threshold + tolerance)) {
        throw Error(kModule, "threshold termination but re-evaluated score " + std::to_string(rescored) +
                                 " exceeds T=" + std::to_string(threshold));
    }
    return rescored;
}

}  // namespace latentprobe
