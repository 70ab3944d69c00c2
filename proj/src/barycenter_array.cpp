#include "sba/barycenter_array.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sba/error.hpp"

namespace sba {

BarycenterArray::BarycenterArray(Domain domain, std::vector<std::vector<double>> rows)
    : domain_(domain), rows_(std::move(rows)) {
    if (rows_.size() < 2 || rows_.size() > static_cast<std::size_t>(kMaxDepth) + 1)
        throw Error(ErrorKind::invalid_argument,
                    "array needs between 2 and " + std::to_string(kMaxDepth + 1) + " rows");
    for (std::size_t j = 1; j <= rows_.size(); ++j) {
        if (static_cast<long>(rows_[j - 1].size()) != row_width(static_cast<int>(j)))
            throw Error(ErrorKind::invalid_argument,
                        "row " + std::to_string(j) + " must have " +
                            std::to_string(row_width(static_cast<int>(j))) + " entries");
        for (double v : rows_[j - 1])
            if (std::isnan(v)) throw Error(ErrorKind::invalid_argument, "array entry is NaN");
    }
}

double BarycenterArray::at(int j, long l) const {
    if (l == 0) return domain_.lower;
    if (l == (1L << j)) return domain_.upper;
    return rows_[j - 1][l - 1];
}

void BarycenterArray::set_node(int j, long l, double value) {
    if (j < 1 || j > rows() || l < 1 || l > row_width(j) || l % 2 == 0)
        throw Error(ErrorKind::invalid_argument, "set_node expects an odd position in range");
    long pos = l;
    for (int r = j; r <= rows(); ++r, pos *= 2) rows_[r - 1][pos - 1] = value;
}

BarycenterArray build_sba(const AnalyticMeasure& measure, int n) {
    if (n < 1 || n > kMaxDepth)
        throw Error(ErrorKind::invalid_argument, "depth must lie in 1.." + std::to_string(kMaxDepth));
    std::vector<std::vector<double>> rows;
    rows.push_back({barycenter(measure, -kInf, kInf)});
    for (int j = 2; j <= n + 1; ++j) {
        const auto& parent = rows.back();
        std::vector<double> row(row_width(j));
        const long cells = 1L << (j - 1);
        for (long l = 1; l <= cells; ++l) {
            // Leftmost and rightmost cells reach the domain ends; an atom on a
            // finite lower bound still belongs to the first cell.
            const double a = l == 1 ? -kInf : parent[l - 2];
            const double b = l == cells ? kInf : parent[l - 1];
            row[2 * l - 2] = barycenter(measure, a, b);
            if (l < cells) row[2 * l - 1] = parent[l - 1];
        }
        // Near an atom the cells can shrink below double resolution, and a
        // child then ties with its parent node on one side only. In exact
        // arithmetic the ties come in pairs, so repair the rounding.
        for (long k = 0; 4 * k + 2 < row_width(j); ++k) {
            double& left = row[4 * k];
            const double mid = row[4 * k + 1];
            double& right = row[4 * k + 2];
            if (left == mid && right != mid) {
                const double lo = k == 0 ? measure.domain().lower : row[4 * k - 1];
                const double below = std::nextafter(mid, -kInf);
                // A cell one ulp wide cannot be split; collapse it instead.
                if (below >= lo) left = below;
                else right = mid;
            } else if (right == mid && left != mid) {
                left = mid;
            }
        }
        rows.push_back(std::move(row));
    }
    return BarycenterArray(measure.domain(), std::move(rows));
}

std::string Violation::describe() const {
    const char* name = condition == Condition::inheritance    ? "(i) inheritance"
                       : condition == Condition::monotonicity ? "(ii) monotonicity"
                                                              : "(iii) paired ties";
    return std::string(name) + " at (" + std::to_string(j) + "," + std::to_string(l) + ")";
}

std::vector<Violation> validate_sba(const BarycenterArray& array, double tolerance) {
    std::vector<Violation> out;
    for (int j = 1; j <= array.rows(); ++j) {
        if (j >= 2) {
            for (long l = 1; l <= (1L << (j - 1)) - 1; ++l)
                if (std::abs(array.at(j, 2 * l) - array.at(j - 1, l)) > tolerance)
                    out.push_back({Violation::Condition::inheritance, j, 2 * l});
        }
        for (long l = 1; l <= (1L << j); ++l)
            if (array.at(j, l - 1) > array.at(j, l) + tolerance)
                out.push_back({Violation::Condition::monotonicity, j, l});
        if (j >= 2) {
            for (long l = 1; l <= (1L << (j - 2)); ++l) {
                const double mid = array.at(j, 4 * l - 2);
                const bool left_tie = std::abs(array.at(j, 4 * l - 3) - mid) <= tolerance;
                const bool right_tie = std::abs(array.at(j, 4 * l - 1) - mid) <= tolerance;
                if (left_tie != right_tie) out.push_back({Violation::Condition::paired_ties, j, l});
            }
        }
    }
    return out;
}

bool is_regular(const BarycenterArray& array, int level) {
    if (level < 1 || level > array.rows())
        throw Error(ErrorKind::invalid_argument, "level out of range");
    std::vector<double> values(array.row(level).begin(), array.row(level).end());
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
}

CdfTable::CdfTable(int depth) : values_(depth) {
    for (int j = 1; j <= depth; ++j) values_[j - 1].assign((1L << j) + 1, 0.0);
}

void invert_cdf_unchecked(const BarycenterArray& array, CdfTable& table) {
    const int depth = array.depth();
    if (table.depth() != depth) table = CdfTable(depth);
    for (int j = 1; j <= depth; ++j) {
        const long top = 1L << j;
        table.at(j, 0) = 0.0;
        table.at(j, top) = 1.0;
        for (long k = 1; 2 * k < top; ++k) table.at(j, 2 * k) = table.at(j - 1, k);
        for (long p = 1; p < top; p += 2) {
            const double lower = table.at(j, p - 1);
            const double upper = table.at(j, p + 1);
            const double left_child = array.at(j + 1, 2 * p - 1);
            const double node = array.at(j + 1, 2 * p);
            const double right_child = array.at(j + 1, 2 * p + 1);
            const double den = right_child - left_child;
            const double ratio = den == 0.0 ? 1.0 : std::clamp((right_child - node) / den, 0.0, 1.0);
            table.at(j, p) = lower + (upper - lower) * ratio;
        }
    }
}

CdfTable invert_cdf(const BarycenterArray& array) {
    const auto violations = validate_sba(array);
    if (!violations.empty())
        throw InvalidArray("array is not a valid barycenter array: " + violations.front().describe());
    CdfTable table(array.depth());
    invert_cdf_unchecked(array, table);
    return table;
}

std::vector<double> weights_from_table(const BarycenterArray& array, const CdfTable& table) {
    const int n = array.depth();
    const long cells = 1L << n;
    std::vector<double> w(cells);
    for (long l = 1; l <= cells; ++l) w[l - 1] = std::max(0.0, table.at(n, l) - table.at(n, l - 1));
    return w;
}

std::vector<double> weights_level_n(const BarycenterArray& array) {
    return weights_from_table(array, invert_cdf(array));
}

std::vector<double> level_atoms(const BarycenterArray& array) {
    const int bottom = array.rows();
    const long cells = 1L << array.depth();
    std::vector<double> atoms(cells);
    for (long l = 1; l <= cells; ++l) atoms[l - 1] = array.at(bottom, 2 * l - 1);
    return atoms;
}

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size() || atoms.empty())
        throw Error(ErrorKind::invalid_argument, "discrete measure needs matching nonempty atoms/weights");
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
    double total = 0.0;
    for (std::size_t i : order) {
        if (!std::isfinite(atoms[i]) || !(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            throw Error(ErrorKind::invalid_argument, "discrete measure atoms must be finite, weights nonnegative");
        total += weights[i];
        if (weights[i] == 0.0) continue;
        if (!atoms_.empty() && atoms_.back() == atoms[i]) {
            weights_.back() += weights[i];
        } else {
            atoms_.push_back(atoms[i]);
            weights_.push_back(weights[i]);
        }
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorKind::invalid_argument, "discrete weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::from_array(const BarycenterArray& array) {
    return DiscreteMeasure(level_atoms(array), weights_level_n(array));
}

double DiscreteMeasure::cdf(double x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size() && atoms_[i] <= x; ++i) total += weights_[i];
    return std::min(total, 1.0);
}

double DiscreteMeasure::quantile(double u) const {
    double cum = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        cum += weights_[i];
        if (u <= cum) return atoms_[i];
    }
    return atoms_.back();
}

AnalyticMeasure DiscreteMeasure::to_analytic(Domain domain) const {
    std::vector<WeightedComponent> parts;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
        parts.push_back({weights_[i], MeasureComponent::point(atoms_[i])});
    return AnalyticMeasure(domain, std::move(parts));
}

DiscreteMeasure approximate(const AnalyticMeasure& measure, int n) {
    return DiscreteMeasure::from_array(build_sba(measure, n));
}

double discrete_mean(const DiscreteMeasure& measure) {
    double total = 0.0;
    for (std::size_t i = 0; i < measure.size(); ++i) total += measure.weights()[i] * measure.atoms()[i];
    return total;
}

}  // namespace sba
