#pragma once

#include "vidcut/superpixel.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace vidcut {

using Rgb = std::array<double, 3>;

struct GmmComponent {
    double weight = 0.0;
    Rgb mean{};
    Rgb variance{};
};

// Diagonal-covariance Gaussian mixture over RGB in [0,1].
struct GmmModel {
    std::vector<GmmComponent> components;

    // Direct (non-log) mixture density; may underflow to 0 far from the data.
    double density(const Rgb& x) const;
    double log_density(const Rgb& x) const;
    nlohmann::json to_json() const;
};

struct GmmParams {
    int components = 5;
    int iterations = 20;
    std::uint64_t seed = 0;
    double variance_floor = 1e-4;
};

struct GmmFit {
    GmmModel model;
    // Weighted log-likelihood after initialization and after every EM step.
    std::vector<double> log_likelihood;
    int requested_components = 0;
    std::string warning;  // non-empty when the component count was reduced
};

// Weighted EM. Initialization is weighted k-means++ driven by `seed`,
// followed by one hard assignment. Throws InputError if all weights are 0.
GmmFit fit_weighted_gmm(std::span<const Rgb> samples, std::span<const double> weights, const GmmParams& params);

inline constexpr double kPosteriorEpsilon = 1e-6;

// p_fg / (p_fg + p_bg), clamped to [eps, 1 - eps]; 0.5 when both densities vanish.
double foreground_posterior(const GmmModel& fg, const GmmModel& bg, const Rgb& color,
                            double eps = kPosteriorEpsilon);

// Posterior evaluated at each region's mean color.
std::vector<double> appearance_term(const GmmModel& fg, const GmmModel& bg, const SuperpixelPartition& p,
                                    double eps = kPosteriorEpsilon);

}  // namespace vidcut
