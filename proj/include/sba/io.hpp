#ifndef SBA_IO_HPP
#define SBA_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "sba/barycenter_array.hpp"
#include "sba/gibbs.hpp"
#include "sba/measure.hpp"
#include "sba/metrics.hpp"

namespace sba {

// Text formats. All numbers are written with 17 significant digits so that
// every file reads back to the same doubles.

/// "domain lower upper", then one line per row with its 2^j - 1 entries.
void write_array(std::ostream& out, const BarycenterArray& array);
/// Validates with a 1e-12 tolerance after parsing.
BarycenterArray read_array(std::istream& in);

/// CSV with header "atom,weight".
void write_discrete_csv(std::ostream& out, const DiscreteMeasure& measure);
DiscreteMeasure read_discrete_csv(std::istream& in);

/// Measure specification, one component per line:
///   domain <lower> <upper>        (optional, defaults to the real line)
///   <weight> point <x>
///   <weight> uniform <a> <b>
/// Weights may be written as fractions ("1/3"). '#' starts a comment.
AnalyticMeasure parse_measure_spec(const std::string& text);

/// Single-column CSV; a non-numeric first line is taken as a header.
std::vector<double> read_data_csv(std::istream& in);

/// Numeric matrix with a header line "<prefix>1,...,<prefix>K".
void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& rows, const std::string& prefix);
/// Reads a numeric CSV matrix, skipping a non-numeric first line.
std::vector<std::vector<double>> read_matrix_csv(std::istream& in);

/// "x,mean,lo,hi" per grid point.
void write_band_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<BandPoint>& band);

/// One JSON object per line: {"draw": k, "mean": m, "atoms": [[theta, phi, weight], ...]}.
void write_mixing_line(std::ostream& out, long draw, const std::vector<JointAtom>& atoms);

std::string format_double(double x);

}  // namespace sba

#endif  // SBA_IO_HPP
