#include "rpsp/point_mass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csv_io.hpp"
#include "rpsp/stable.hpp"

namespace rpsp {

double PointMassLaw::cdf(double x) const {
    if (!sizes.empty() && x >= sizes.back()) return 1.0;  // mass sums to one
    auto it = std::upper_bound(sizes.begin(), sizes.end(), x);
    double acc = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(it - sizes.begin()); ++i)
        acc += weights[i];
    return acc;
}

double PointMassLaw::mean() const {
    stable::KahanSum m;
    for (std::size_t i = 0; i < sizes.size(); ++i) m.add(sizes[i] * weights[i]);
    return m.value();
}

double PointMassLaw::max_size() const {
    for (std::size_t i = sizes.size(); i-- > 0;)
        if (weights[i] > 0.0) return sizes[i];
    throw std::invalid_argument("PointMassLaw: no positive weight");
}

std::vector<double> PointMassLaw::cumulative() const {
    std::vector<double> cum(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cum[i] = acc;
    }
    if (!cum.empty()) cum.back() = 1.0;  // exact top for sampling
    return cum;
}

void PointMassLaw::validate(double mass_tol) const {
    if (sizes.size() != weights.size())
        throw std::invalid_argument("PointMassLaw: sizes/weights length mismatch");
    if (sizes.empty()) throw std::invalid_argument("PointMassLaw: empty law");
    stable::KahanSum sum;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!(sizes[i] > 0.0))
            throw std::invalid_argument("PointMassLaw: sizes must be strictly positive");
        if (i > 0 && !(sizes[i] > sizes[i - 1]))
            throw std::invalid_argument("PointMassLaw: sizes must be strictly increasing");
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("PointMassLaw: weights must be strictly positive");
        sum.add(weights[i]);
    }
    if (std::abs(sum.value() - 1.0) > mass_tol)
        throw std::invalid_argument("PointMassLaw: weights sum to " + csvio::fmt(sum.value()) +
                                    ", expected 1");
}

void PointMassLaw::to_weight_csv(const std::string& path) const {
    csvio::Writer w(path);
    w.row({"size_bytes", "weight"});
    for (std::size_t i = 0; i < sizes.size(); ++i)
        w.row({csvio::fmt(sizes[i]), csvio::fmt(weights[i])});
}

void PointMassLaw::to_cdf_csv(const std::string& path) const {
    csvio::Writer w(path);
    w.row({"size_bytes", "cdf"});
    double acc = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        acc += weights[i];
        w.row({csvio::fmt(sizes[i]), csvio::fmt(i + 1 == sizes.size() ? 1.0 : acc)});
    }
}

double ks_distance(const PointMassLaw& a, const PointMassLaw& b) {
    double d = 0.0, fa = 0.0, fb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.sizes.size() || j < b.sizes.size()) {
        double xa = i < a.sizes.size() ? a.sizes[i] : HUGE_VAL;
        double xb = j < b.sizes.size() ? b.sizes[j] : HUGE_VAL;
        if (xa <= xb) fa += a.weights[i++];
        if (xb <= xa) fb += b.weights[j++];
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

}  // namespace rpsp
