#include "sba/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "sba/error.hpp"

namespace sba {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& token, double& out) {
    const std::string t = trim(token);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

[[noreturn]] void parse_fail(long line, const std::string& what) {
    throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

double number_at(const std::string& token, long line) {
    double v;
    if (!parse_number(token, v)) parse_fail(line, "expected a number, got '" + token + "'");
    return v;
}

double parse_weight(const std::string& token, long line) {
    const auto slash = token.find('/');
    if (slash == std::string::npos) return number_at(token, line);
    const double num = number_at(token.substr(0, slash), line);
    const double den = number_at(token.substr(slash + 1), line);
    if (den == 0.0) parse_fail(line, "zero denominator in '" + token + "'");
    return num / den;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::string> words(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

bool numeric_row(const std::string& line) {
    for (const auto& cell : split(line, ',')) {
        double v;
        if (!parse_number(cell, v)) return false;
    }
    return true;
}

}  // namespace

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_array(std::ostream& out, const BarycenterArray& array) {
    out << "domain " << format_double(array.domain().lower) << ' ' << format_double(array.domain().upper) << '\n';
    for (int j = 1; j <= array.rows(); ++j) {
        const auto row = array.row(j);
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << format_double(row[k]);
        out << '\n';
    }
}

BarycenterArray read_array(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::optional<Domain> domain;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const auto w = words(line);
        if (w.empty() || w.front().front() == '#') continue;
        if (!domain) {
            if (w.size() != 3 || w[0] != "domain") parse_fail(lineno, "expected 'domain <lower> <upper>'");
            const double lo = number_at(w[1], lineno);
            const double hi = number_at(w[2], lineno);
            if (!(lo < hi)) parse_fail(lineno, "domain needs lower < upper");
            domain = Domain(lo, hi);
            continue;
        }
        const int j = static_cast<int>(rows.size()) + 1;
        if (j > kMaxDepth + 1) parse_fail(lineno, "too many rows");
        if (static_cast<long>(w.size()) != row_width(j))
            parse_fail(lineno, "row " + std::to_string(j) + " needs " + std::to_string(row_width(j)) + " entries");
        std::vector<double> row;
        for (const auto& token : w) row.push_back(number_at(token, lineno));
        rows.push_back(std::move(row));
    }
    if (!domain) throw Error(ErrorKind::parse, "array file is empty");
    if (rows.size() < 2) throw Error(ErrorKind::parse, "array file needs at least two rows");
    BarycenterArray array(*domain, std::move(rows));
    const auto violations = validate_sba(array, 1e-12);
    if (!violations.empty()) throw InvalidArray("array read from file is invalid: " + violations.front().describe());
    return array;
}

void write_discrete_csv(std::ostream& out, const DiscreteMeasure& measure) {
    out << "atom,weight\n";
    for (std::size_t k = 0; k < measure.size(); ++k)
        out << format_double(measure.atoms()[k]) << ',' << format_double(measure.weights()[k]) << '\n';
}

DiscreteMeasure read_discrete_csv(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::vector<double> atoms, weights;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (lineno == 1 && trim(line) == "atom,weight") continue;
        const auto cells = split(line, ',');
        if (cells.size() != 2) parse_fail(lineno, "expected 'atom,weight'");
        atoms.push_back(number_at(cells[0], lineno));
        weights.push_back(number_at(cells[1], lineno));
    }
    return DiscreteMeasure(std::move(atoms), std::move(weights));
}

AnalyticMeasure parse_measure_spec(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    Domain domain;
    std::vector<WeightedComponent> comps;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto w = words(line);
        if (w.empty()) continue;
        if (w[0] == "domain") {
            if (w.size() != 3) parse_fail(lineno, "expected 'domain <lower> <upper>'");
            const double lo = number_at(w[1], lineno);
            const double hi = number_at(w[2], lineno);
            if (!(lo < hi)) parse_fail(lineno, "domain needs lower < upper");
            domain = Domain(lo, hi);
            continue;
        }
        if (w.size() < 2) parse_fail(lineno, "expected '<weight> point <x>' or '<weight> uniform <a> <b>'");
        const double weight = parse_weight(w[0], lineno);
        if (w[1] == "point") {
            if (w.size() != 3) parse_fail(lineno, "point needs one location");
            comps.push_back({weight, MeasureComponent::point(number_at(w[2], lineno))});
        } else if (w[1] == "uniform") {
            if (w.size() != 4) parse_fail(lineno, "uniform needs two end points");
            const double a = number_at(w[2], lineno);
            const double b = number_at(w[3], lineno);
            if (!(a < b)) parse_fail(lineno, "uniform needs a < b");
            comps.push_back({weight, MeasureComponent::uniform(a, b)});
        } else {
            parse_fail(lineno, "unknown component kind '" + w[1] + "'");
        }
    }
    if (comps.empty()) throw Error(ErrorKind::parse, "measure specification has no components");
    return AnalyticMeasure(domain, std::move(comps));
}

std::vector<double> read_data_csv(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::vector<double> out;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        double v;
        if (parse_number(t, v)) {
            out.push_back(v);
            continue;
        }
        if (out.empty() && lineno == 1 && t.find(',') == std::string::npos) continue;  // header
        parse_fail(lineno, "expected a single numeric value, got '" + t + "'");
    }
    return out;
}

void write_matrix_csv(std::ostream& out, const std::vector<std::vector<double>>& rows, const std::string& prefix) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t k = 0; k < cols; ++k) out << (k ? "," : "") << prefix << (k + 1);
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
        out << '\n';
    }
}

std::vector<std::vector<double>> read_matrix_csv(std::istream& in) {
    std::string line;
    long lineno = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (lineno == 1 && !numeric_row(t)) continue;
        std::vector<double> row;
        for (const auto& cell : split(t, ',')) row.push_back(number_at(cell, lineno));
        if (!rows.empty() && row.size() != rows.front().size()) parse_fail(lineno, "row length differs from the first row");
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_band_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<BandPoint>& band) {
    out << "x,mean,lo,hi\n";
    for (std::size_t g = 0; g < grid.size(); ++g)
        out << format_double(grid[g]) << ',' << format_double(band[g].mean) << ',' << format_double(band[g].lo) << ','
            << format_double(band[g].hi) << '\n';
}

void write_mixing_line(std::ostream& out, long draw, const std::vector<JointAtom>& atoms) {
    nlohmann::json j;
    j["draw"] = draw;
    double mean = 0.0;
    auto arr = nlohmann::json::array();
    for (const auto& a : atoms) {
        arr.push_back({a.theta, a.phi, a.weight});
        mean += a.weight * a.theta;
    }
    j["mean"] = mean;
    j["atoms"] = std::move(arr);
    out << j.dump() << '\n';
}

}  // namespace sba
