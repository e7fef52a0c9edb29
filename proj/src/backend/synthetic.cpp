#include "latentprobe/synthetic.hpp"

#include <cmath>
#include <sstream>

#include "latentprobe/kernels.hpp"
#include "latentprobe/latent.hpp"
#include "latentprobe/rng.hpp"

namespace latentprobe {

namespace {

constexpr const char* kModule = "synthetic-backend";

}  // namespace

void SyntheticParams::validate() const {
    if (latent_dim == 0 || embedding_dim == 0 || attribute_dim == 0) {
        throw ConfigError(kModule, "synthetic D, m and k must all be >= 1");
    }
}

SyntheticModel::SyntheticModel(const SyntheticParams& params)
    : params_(params), radius_(std::sqrt(static_cast<double>(params.latent_dim))) {
    params_.validate();
    const std::size_t d = params_.latent_dim;
    a_.resize(params_.embedding_dim * d);
    b_.resize(params_.attribute_dim * d);
    SplitMix64 stream(params_.seed);
    for (auto& v : a_) {
        v = (2.0 * unit_double(stream.next()) - 1.0) / radius_;
    }
    for (auto& v : b_) {
        v = (2.0 * unit_double(stream.next()) - 1.0) / radius_;
    }
}

std::vector<double> SyntheticModel::identity_of_signs(std::span<const double> signs) const {
    std::vector<double> out(params_.embedding_dim);
    simd::active_kernels().matvec(a_.data(), params_.embedding_dim, params_.latent_dim, signs.data(), out.data());
    return out;
}

std::vector<double> SyntheticModel::identity_block(const LatentVector& z) const {
    return identity_of_signs(sign(z).span());
}

std::vector<double> SyntheticModel::attribute_block(const LatentVector& z) const {
    std::vector<double> out(params_.attribute_dim);
    simd::active_kernels().matvec(b_.data(), params_.attribute_dim, params_.latent_dim, z.span().data(),
                                  out.data());
    return out;
}

double SyntheticModel::squash_identity(double x) const noexcept { return 0.5 + x / (2.0 * radius_); }

double SyntheticModel::unsquash_identity(double y) const noexcept { return (y - 0.5) * (2.0 * radius_); }

double SyntheticModel::squash_attribute(double x) const noexcept {
    return 0.5 + x / (2.0 * (radius_ + std::abs(x)));
}

double SyntheticModel::unsquash_attribute(double y) const noexcept {
    const double t = 2.0 * y - 1.0;
    return radius_ * t / (1.0 - std::abs(t));
}

SyntheticBackend::SyntheticBackend(const SyntheticParams& params) : model_(params) {
    const auto& p = model_.params();
    info_.latent_dim = p.latent_dim;
    info_.embedding_dim = p.embedding_dim;
    info_.image_shape = {1, 1, p.embedding_dim + p.attribute_dim};
    info_.backend_name = "synthetic";
    info_.supports_fused_generate_embed = true;
    info_.concurrent_calls = true;
    std::ostringstream map;
    map << "identity: y=0.5+x/(2*sqrt(D)); attribute: y=0.5+x/(2*(sqrt(D)+|x|)); D=" << p.latent_dim
        << " m=" << p.embedding_dim << " k=" << p.attribute_dim << " seed=" << p.seed;
    info_.output_map = map.str();
}

ImageTensor SyntheticBackend::generate(const LatentVector& z) {
    check_latent(z);
    const auto identity = model_.identity_block(z);
    const auto attribute = model_.attribute_block(z);
    std::vector<double> values;
    values.reserve(identity.size() + attribute.size());
    for (double x : identity) values.push_back(model_.squash_identity(x));
    for (double x : attribute) values.push_back(model_.squash_attribute(x));
    return ImageTensor(info_.image_shape, std::move(values));
}

Embedding SyntheticBackend::embed(const ImageTensor& x) {
    check_image(x);
    std::vector<double> out(info_.embedding_dim);
    const auto values = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = model_.unsquash_identity(values[i]);
    }
    return Embedding(std::move(out));
}

std::vector<Embedding> SyntheticBackend::generate_embed(std::span<const LatentVector> zs) {
    std::vector<Embedding> out;
    out.reserve(zs.size());
    for (const auto& z : zs) {
        check_latent(z);
        out.emplace_back(model_.identity_block(z));
    }
    return out;
}

std::vector<double> SyntheticBackend::attribute_of(const ImageTensor& x) const {
    check_image(x);
    const auto values = x.values();
    std::vector<double> out;
    for (std::size_t i = info_.embedding_dim; i < values.size(); ++i) {
        out.push_back(model_.unsquash_attribute(values[i]));
    }
    return out;
}

}  // namespace latentprobe
