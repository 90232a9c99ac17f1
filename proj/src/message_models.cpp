#include "rpsp/message_models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csv_io.hpp"
#include "parallel.hpp"
#include "rpsp/stable.hpp"

namespace rpsp {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double normal_sf(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

}  // namespace

MessageSizeDistribution::MessageSizeDistribution()
    : MessageSizeDistribution(discrete(PointMassLaw{{1.0}, {1.0}})) {}

MessageSizeDistribution MessageSizeDistribution::discrete(PointMassLaw law) {
    law.validate();
    MessageSizeDistribution d{Raw{}};
    d.kind_ = MessageKind::discrete;
    d.cumulative_ = law.cumulative();
    d.law_ = std::move(law);
    return d;
}

MessageSizeDistribution MessageSizeDistribution::empirical(PointMassLaw law) {
    auto d = discrete(std::move(law));
    d.kind_ = MessageKind::empirical;
    return d;
}

MessageSizeDistribution MessageSizeDistribution::empirical_from_csv(const std::string& path) {
    auto rows = csvio::read_rows(path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"size_bytes", "probability"})
        throw std::runtime_error(path + ": expected header 'size_bytes,probability'");
    PointMassLaw law;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 2)
            throw std::runtime_error(path + ": line " + std::to_string(i + 1) +
                                     ": expected 2 fields, got " + std::to_string(rows[i].size()));
        const std::string ctx = path + ", line " + std::to_string(i + 1);
        law.sizes.push_back(csvio::parse_double(rows[i][0], ctx));
        law.weights.push_back(csvio::parse_double(rows[i][1], ctx));
    }
    // Sort by size; exact duplicates are rejected by validate below.
    std::vector<std::size_t> order(law.sizes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return law.sizes[a] < law.sizes[b]; });
    PointMassLaw sorted;
    for (std::size_t i : order) {
        sorted.sizes.push_back(law.sizes[i]);
        sorted.weights.push_back(law.weights[i]);
    }
    double sum = 0.0;
    for (double w : sorted.weights) sum += w;
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error(path + ": probabilities sum to " + csvio::fmt(sum));
    for (double& w : sorted.weights) w /= sum;
    return empirical(std::move(sorted));
}

MessageSizeDistribution MessageSizeDistribution::lognormal(double mu, double sigma_ln) {
    if (!(sigma_ln > 0.0)) throw std::invalid_argument("lognormal: sigma must be > 0");
    MessageSizeDistribution d{Raw{}};
    d.kind_ = MessageKind::lognormal;
    d.mu_ = mu;
    d.sigma_ = sigma_ln;
    return d;
}

MessageSizeDistribution MessageSizeDistribution::weibull(double lambda, double nu) {
    if (!(lambda > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("weibull: lambda and nu must be > 0");
    MessageSizeDistribution d{Raw{}};
    d.kind_ = MessageKind::weibull;
    d.lambda_ = lambda;
    d.nu_ = nu;
    return d;
}

const PointMassLaw& MessageSizeDistribution::law() const {
    if (!is_discrete())
        throw std::logic_error("law(): continuous distribution has no point masses");
    return law_;
}

double MessageSizeDistribution::cdf(double x) const {
    switch (kind_) {
        case MessageKind::discrete:
        case MessageKind::empirical:
            return law_.cdf(x);
        case MessageKind::lognormal:
            if (x <= 0.0) return 0.0;
            return normal_cdf((std::log(x) - mu_) / sigma_);
        case MessageKind::weibull:
            if (x <= 0.0) return 0.0;
            return -std::expm1(-std::pow(lambda_ * x, nu_));
    }
    return 0.0;
}

double MessageSizeDistribution::survival(double x) const {
    switch (kind_) {
        case MessageKind::discrete:
        case MessageKind::empirical:
            return 1.0 - law_.cdf(x);
        case MessageKind::lognormal:
            if (x <= 0.0) return 1.0;
            return normal_sf((std::log(x) - mu_) / sigma_);
        case MessageKind::weibull:
            if (x <= 0.0) return 1.0;
            return std::exp(-std::pow(lambda_ * x, nu_));
    }
    return 1.0;
}

double MessageSizeDistribution::mean() const {
    switch (kind_) {
        case MessageKind::discrete:
        case MessageKind::empirical:
            return law_.mean();
        case MessageKind::lognormal:
            return std::exp(mu_ + 0.5 * sigma_ * sigma_);
        case MessageKind::weibull:
            return std::tgamma(1.0 + 1.0 / nu_) / lambda_;
    }
    return 0.0;
}

double MessageSizeDistribution::sample(std::mt19937_64& rng) const {
    switch (kind_) {
        case MessageKind::discrete:
        case MessageKind::empirical: {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            double u = u01(rng);
            auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
            if (it == cumulative_.end()) --it;
            return law_.sizes[static_cast<std::size_t>(it - cumulative_.begin())];
        }
        case MessageKind::lognormal: {
            std::normal_distribution<double> n(mu_, sigma_);
            return std::max(1.0, std::ceil(std::exp(n(rng))));
        }
        case MessageKind::weibull: {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            double u = u01(rng);
            // (lambda x)^nu = -log(1 - U); a u of exactly zero must still
            // occupy one byte
            return std::max(1.0, std::ceil(std::pow(-std::log1p(-u), 1.0 / nu_) / lambda_));
        }
    }
    return 0.0;
}

long long MessageSizeDistribution::truncation_point(double tail_mass) const {
    if (is_discrete()) return static_cast<long long>(std::ceil(law_.max_size()));
    long long hi = 1;
    while (survival(static_cast<double>(hi)) > tail_mass) {
        if (hi > (1LL << 60)) throw std::runtime_error("truncation point search diverged");
        hi *= 2;
    }
    long long lo = hi / 2;
    while (lo + 1 < hi) {
        long long mid = lo + (hi - lo) / 2;
        if (survival(static_cast<double>(mid)) <= tail_mass)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

MessageSizeDistribution MessageSizeDistribution::quantize(double tail_mass,
                                                          QuantizeOptions opts) const {
    if (!(tail_mass > 0.0) || tail_mass > 1e-6)
        throw std::invalid_argument("quantize: tail_mass must be in (0, 1e-6]");
    if (is_discrete()) return *this;

    const long long S = truncation_point(tail_mass);
    if (static_cast<double>(S) > opts.support_cap)
        throw std::invalid_argument("quantize: truncation point " + std::to_string(S) +
                                    " exceeds support cap " + csvio::fmt(opts.support_cap) +
                                    " (pathological tail)");

    const std::size_t n = static_cast<std::size_t>(S);
    std::vector<double> sizes(n), weights(n);
    std::vector<double> chunk_sums(par::kChunks, 0.0);
    par::for_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        stable::KahanSum sum;
        for (std::size_t i = begin; i < end; ++i) {
            const double s = static_cast<double>(i + 1);
            sizes[i] = s;
            // Tail masses come from survival differences to dodge the
            // cancellation in cdf differences near 1.
            double m = cdf(s) <= 0.9 ? cdf(s) - cdf(s - 1.0)
                                     : survival(s - 1.0) - survival(s);
            weights[i] = m;
            sum.add(m);
        }
        chunk_sums[chunk] += sum.value();
    });
    weights[n - 1] += survival(static_cast<double>(S));  // residual tail at S

    stable::KahanSum total_sum;
    total_sum.add(survival(static_cast<double>(S)));
    for (double s : chunk_sums) total_sum.add(s);
    const double total = total_sum.value();
    for (double& w : weights) w /= total;

    // Sub-epsilon masses can round to zero; drop those atoms.
    std::size_t out = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i] <= 0.0) continue;
        sizes[out] = sizes[i];
        weights[out] = weights[i];
        ++out;
    }
    sizes.resize(out);
    weights.resize(out);
    return discrete(PointMassLaw{std::move(sizes), std::move(weights)});
}

}  // namespace rpsp
