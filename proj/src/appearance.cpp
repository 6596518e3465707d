#include "vidcut/appearance.hpp"

#include "vidcut/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

namespace vidcut {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

double log_gaussian(const Rgb& x, const GmmComponent& c) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double diff = x[d] - c.mean[d];
        s += -0.5 * (kLog2Pi + std::log(c.variance[d]) + diff * diff / c.variance[d]);
    }
    return s;
}

double squared_distance(const Rgb& a, const Rgb& b) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
}

// uniform double in [0, 1) from the top 53 bits; identical on every platform
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick_weighted(std::span<const double> mass, double total, std::mt19937_64& rng) {
    const double target = unit(rng) * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] <= 0.0) continue;
        last_positive = i;
        acc += mass[i];
        if (target < acc) return i;
    }
    return last_positive;
}

void fit_component(GmmComponent& c, std::span<const Rgb> x, std::span<const double> resp, double floor) {
    double wsum = 0.0;
    Rgb mean{};
    for (std::size_t n = 0; n < x.size(); ++n) {
        wsum += resp[n];
        for (int d = 0; d < 3; ++d) mean[d] += resp[n] * x[n][d];
    }
    for (int d = 0; d < 3; ++d) mean[d] /= wsum;
    Rgb var{};
    for (std::size_t n = 0; n < x.size(); ++n)
        for (int d = 0; d < 3; ++d) var[d] += resp[n] * (x[n][d] - mean[d]) * (x[n][d] - mean[d]);
    for (int d = 0; d < 3; ++d) var[d] = std::max(var[d] / wsum, floor);
    c.mean = mean;
    c.variance = var;
}

struct EStep {
    double log_likelihood = 0.0;
    std::vector<double> resp;  // n * K, row-major
};

EStep expectation(const GmmModel& m, std::span<const Rgb> x, std::span<const double> w) {
    const std::size_t K = m.components.size();
    EStep e;
    e.resp.assign(x.size() * K, 0.0);
    std::vector<double> lp(K);
    for (std::size_t n = 0; n < x.size(); ++n) {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            const auto& c = m.components[k];
            lp[k] = c.weight > 0.0 ? std::log(c.weight) + log_gaussian(x[n], c)
                                   : -std::numeric_limits<double>::infinity();
            peak = std::max(peak, lp[k]);
        }
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += std::exp(lp[k] - peak);
        const double lse = peak + std::log(s);
        e.log_likelihood += w[n] * lse;
        for (std::size_t k = 0; k < K; ++k) e.resp[n * K + k] = w[n] * std::exp(lp[k] - lse);
    }
    return e;
}

}  // namespace

double GmmModel::density(const Rgb& x) const {
    double p = 0.0;
    for (const auto& c : components) {
        double g = c.weight;
        for (int d = 0; d < 3; ++d) {
            const double diff = x[d] - c.mean[d];
            g *= std::exp(-0.5 * diff * diff / c.variance[d]) / std::sqrt(2.0 * std::numbers::pi * c.variance[d]);
        }
        p += g;
    }
    return p;
}

double GmmModel::log_density(const Rgb& x) const {
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> lp;
    for (const auto& c : components) {
        lp.push_back(std::log(c.weight) + log_gaussian(x, c));
        peak = std::max(peak, lp.back());
    }
    double s = 0.0;
    for (double v : lp) s += std::exp(v - peak);
    return peak + std::log(s);
}

nlohmann::json GmmModel::to_json() const {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : components)
        comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    return {{"components", comps}};
}

GmmFit fit_weighted_gmm(std::span<const Rgb> samples, std::span<const double> weights, const GmmParams& params) {
    if (samples.size() != weights.size()) throw InputError("gmm: sample/weight count mismatch");
    if (params.components < 1) throw InputError("gmm: K must be >= 1");
    if (params.iterations < 0) throw InputError("gmm: iterations must be >= 0");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("gmm: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw InputError("gmm: all sample weights are zero");

    // only positively weighted samples take part
    std::vector<Rgb> x;
    std::vector<double> w;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (weights[i] > 0.0) {
            x.push_back(samples[i]);
            w.push_back(weights[i]);
        }
    }
    const std::set<Rgb> distinct(x.begin(), x.end());

    GmmFit fit;
    fit.requested_components = params.components;
    const std::size_t K = std::min<std::size_t>(params.components, distinct.size());
    if (K < static_cast<std::size_t>(params.components))
        fit.warning = "gmm: only " + std::to_string(distinct.size()) + " distinct samples; K reduced from " +
                      std::to_string(params.components) + " to " + std::to_string(K);

    // weighted k-means++ seeding
    std::mt19937_64 rng(params.seed);
    std::vector<Rgb> centers;
    centers.push_back(x[pick_weighted(w, total, rng)]);
    std::vector<double> d2(x.size());
    std::vector<double> mass(x.size());
    while (centers.size() < K) {
        double mtotal = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, squared_distance(x[n], c));
            d2[n] = best;
            mass[n] = w[n] * best;
            mtotal += mass[n];
        }
        centers.push_back(x[pick_weighted(mass, mtotal, rng)]);
    }

    // hard assignment; an empty cluster is re-seeded at the sample farthest
    // from its own center (the least likely under the current assignment)
    std::vector<std::size_t> assign(x.size());
    for (std::size_t attempt = 0; attempt <= K; ++attempt) {
        std::vector<double> cluster_weight(K, 0.0);
        std::vector<double> far(x.size());
        for (std::size_t n = 0; n < x.size(); ++n) {
            std::size_t arg = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k) {
                const double d = squared_distance(x[n], centers[k]);
                if (d < best) {
                    best = d;
                    arg = k;
                }
            }
            assign[n] = arg;
            far[n] = best;
            cluster_weight[arg] += w[n];
        }
        const auto empty = std::find(cluster_weight.begin(), cluster_weight.end(), 0.0);
        if (empty == cluster_weight.end()) break;
        const auto worst = static_cast<std::size_t>(std::max_element(far.begin(), far.end()) - far.begin());
        centers[static_cast<std::size_t>(empty - cluster_weight.begin())] = x[worst];
    }

    GmmModel model;
    model.components.resize(K);
    std::vector<double> resp(x.size());
    for (std::size_t k = 0; k < K; ++k) {
        double wk = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            resp[n] = assign[n] == k ? w[n] : 0.0;
            wk += resp[n];
        }
        model.components[k].weight = wk / total;
        if (wk > 0.0) {
            fit_component(model.components[k], x, resp, params.variance_floor);
        } else {
            model.components[k].mean = centers[k];
            model.components[k].variance = {params.variance_floor, params.variance_floor, params.variance_floor};
        }
    }

    for (int it = 0; it < params.iterations; ++it) {
        const auto e = expectation(model, x, w);
        fit.log_likelihood.push_back(e.log_likelihood);
        for (std::size_t k = 0; k < K; ++k) {
            double nk = 0.0;
            for (std::size_t n = 0; n < x.size(); ++n) {
                resp[n] = e.resp[n * K + k];
                nk += resp[n];
            }
            // a component whose responsibility underflowed stays dormant
            model.components[k].weight = nk / total;
            if (nk > 0.0) fit_component(model.components[k], x, resp, params.variance_floor);
        }
        // renormalize against accumulated rounding in the responsibilities
        double wsum = 0.0;
        for (const auto& c : model.components) wsum += c.weight;
        for (auto& c : model.components) c.weight /= wsum;
    }
    fit.log_likelihood.push_back(expectation(model, x, w).log_likelihood);

    std::erase_if(model.components, [](const GmmComponent& c) { return !(c.weight > 0.0); });
    fit.model = std::move(model);
    return fit;
}

double foreground_posterior(const GmmModel& fg, const GmmModel& bg, const Rgb& color, double eps) {
    const double pf = fg.density(color);
    const double pb = bg.density(color);
    if (pf + pb <= 0.0) return 0.5;
    return std::clamp(pf / (pf + pb), eps, 1.0 - eps);
}

std::vector<double> appearance_term(const GmmModel& fg, const GmmModel& bg, const SuperpixelPartition& p,
                                    double eps) {
    std::vector<double> out(p.count());
    for (std::size_t r = 0; r < p.count(); ++r) out[r] = foreground_posterior(fg, bg, p.regions[r].mean_rgb, eps);
    return out;
}

}  // namespace vidcut
