#pragma once

#include <random>
#include <string>

#include "rpsp/point_mass.hpp"

namespace rpsp {

enum class MessageKind { discrete, lognormal, weibull, empirical };

struct QuantizeOptions {
    // Reject quantization whose truncation point exceeds this many bytes;
    // a larger point signals a pathological tail (and an oversized atom list).
    double support_cap = 1e8;
};

// Higher-layer message-size law F^(m). Sizes are bytes throughout; bit
// conversion happens only in the loss/timing layers.
class MessageSizeDistribution {
  public:
    // Degenerate default: a single one-byte message.
    MessageSizeDistribution();

    static MessageSizeDistribution discrete(PointMassLaw law);
    static MessageSizeDistribution empirical(PointMassLaw law);
    // Two-column CSV `size_bytes,probability` with a header row.
    static MessageSizeDistribution empirical_from_csv(const std::string& path);
    static MessageSizeDistribution lognormal(double mu, double sigma_ln);
    static MessageSizeDistribution weibull(double lambda, double nu);

    MessageKind kind() const { return kind_; }
    // Discrete and empirical laws share the point-mass pipeline.
    bool is_discrete() const {
        return kind_ == MessageKind::discrete || kind_ == MessageKind::empirical;
    }

    double cdf(double x) const;
    // 1 - cdf(x), accurate deep in the tail.
    double survival(double x) const;
    double mean() const;

    // One i.i.d. draw in whole bytes; continuous draws round up (a partial
    // byte still occupies a byte on the wire).
    double sample(std::mt19937_64& rng) const;

    // Integer-byte law: mass F(s) - F(s-1) at every byte s >= 1, truncated at
    // the smallest S with survival(S) <= tail_mass; the residual tail mass is
    // assigned to S and weights are renormalized. Discrete inputs are
    // returned unchanged.
    MessageSizeDistribution quantize(double tail_mass, QuantizeOptions opts = {}) const;

    // Truncation point used by quantize (continuous kinds).
    long long truncation_point(double tail_mass) const;

    const PointMassLaw& law() const;  // discrete kinds only
    double mu() const { return mu_; }
    double sigma_ln() const { return sigma_; }
    double lambda() const { return lambda_; }
    double nu() const { return nu_; }

  private:
    struct Raw {};
    explicit MessageSizeDistribution(Raw) {}

    MessageKind kind_ = MessageKind::discrete;
    PointMassLaw law_;
    std::vector<double> cumulative_;  // sampling cache for discrete kinds
    double mu_ = 0.0, sigma_ = 0.0;   // lognormal, natural-log scale
    double lambda_ = 0.0, nu_ = 0.0;  // weibull scale (1/bytes) and shape
};

}  // namespace rpsp
