#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rpsp {

// Discrete size law: strictly increasing sizes (bytes), positive weights
// summing to one.
struct PointMassLaw {
    std::vector<double> sizes;
    std::vector<double> weights;

    std::size_t count() const { return sizes.size(); }
    bool empty() const { return sizes.empty(); }

    // Right-continuous CDF.
    double cdf(double x) const;
    double mean() const;
    // Largest size carrying positive weight, i.e. min{l; F(l) = 1}.
    double max_size() const;
    std::vector<double> cumulative() const;

    // Throws std::invalid_argument on violated invariants.
    void validate(double mass_tol = 1e-12) const;

    void to_weight_csv(const std::string& path) const;  // size_bytes,weight
    void to_cdf_csv(const std::string& path) const;     // size_bytes,cdf
};

// Kolmogorov-Smirnov distance, max |F_a - F_b| over the union of atoms.
double ks_distance(const PointMassLaw& a, const PointMassLaw& b);

}  // namespace rpsp
