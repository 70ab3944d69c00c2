#ifndef SBA_BARYCENTER_ARRAY_HPP
#define SBA_BARYCENTER_ARRAY_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sba/measure.hpp"

namespace sba {

inline constexpr int kMaxDepth = 20;

/// Triangular array mu(j, l), rows j = 1..depth+1 with 2^j - 1 entries each.
/// Positions 0 and 2^j address the domain bounds.
class BarycenterArray {
public:
    /// rows[j-1] must hold exactly 2^j - 1 values; depth = rows.size() - 1.
    BarycenterArray(Domain domain, std::vector<std::vector<double>> rows);

    const Domain& domain() const { return domain_; }
    int depth() const { return static_cast<int>(rows_.size()) - 1; }
    int rows() const { return static_cast<int>(rows_.size()); }

    /// mu(j, l) for l in 0..2^j (ends map to the domain bounds).
    double at(int j, long l) const;
    std::span<const double> row(int j) const { return rows_.at(j - 1); }

    /// Sets the odd node (j, l) and every inherited copy at deeper rows.
    void set_node(int j, long l, double value);

    friend bool operator==(const BarycenterArray&, const BarycenterArray&) = default;

private:
    Domain domain_;
    std::vector<std::vector<double>> rows_;
};

inline long row_width(int j) { return (1L << j) - 1; }

BarycenterArray build_sba(const AnalyticMeasure& measure, int n);

struct Violation {
    enum class Condition { inheritance, monotonicity, paired_ties };
    Condition condition;
    int j;
    long l;

    std::string describe() const;
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Checks the three array conditions (even inheritance, row monotonicity,
/// paired ties). tolerance = 0 gives exact comparisons.
std::vector<Violation> validate_sba(const BarycenterArray& array, double tolerance = 0.0);

/// True iff the 2^level - 1 entries of row `level` are pairwise distinct.
bool is_regular(const BarycenterArray& array, int level);

/// Reconstructed CDF values G(mu(j, l)) for rows 1..depth.
class CdfTable {
public:
    CdfTable() = default;
    explicit CdfTable(int depth);

    double at(int j, long l) const { return values_[j - 1][l]; }
    double& at(int j, long l) { return values_[j - 1][l]; }
    int depth() const { return static_cast<int>(values_.size()); }

private:
    std::vector<std::vector<double>> values_;  // positions 0..2^j per row
};

/// Inversion recursion with the 0/0 = 1 convention. Throws InvalidArray when
/// the array fails validation.
CdfTable invert_cdf(const BarycenterArray& array);
/// Same recursion without the validation pass, for hot loops that maintain
/// validity themselves.
void invert_cdf_unchecked(const BarycenterArray& array, CdfTable& table);

/// Cell masses G(Theta_{n,l}), l = 1..2^n.
std::vector<double> weights_level_n(const BarycenterArray& array);
std::vector<double> weights_from_table(const BarycenterArray& array, const CdfTable& table);

/// Row depth+1 odd entries: the barycenters of the level-n cells.
std::vector<double> level_atoms(const BarycenterArray& array);

/// Sorted atoms with positive weights; exact duplicates merged.
class DiscreteMeasure {
public:
    DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights);

    static DiscreteMeasure from_array(const BarycenterArray& array);

    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t size() const { return atoms_.size(); }

    double cdf(double x) const;
    double quantile(double u) const;

    AnalyticMeasure to_analytic(Domain domain = {}) const;

private:
    std::vector<double> atoms_;
    std::vector<double> weights_;
};

DiscreteMeasure approximate(const AnalyticMeasure& measure, int n);

double discrete_mean(const DiscreteMeasure& measure);

}  // namespace sba

#endif  // SBA_BARYCENTER_ARRAY_HPP
