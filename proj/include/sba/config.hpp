#ifndef SBA_CONFIG_HPP
#define SBA_CONFIG_HPP

#include <optional>
#include <string>

#include <json.hpp>

#include "sba/gibbs.hpp"

namespace sba {

/// Everything one run reads from its configuration document.
struct RunConfig {
    FitConfig fit;
    bool has_seed = false;
    int chains = 1;
    double band_prob = 0.95;
    long draws = 0;                      // prior-sample
    std::optional<std::string> measure;  // measure specification text (sba-build, sba-approx)
};

/// Parses a JSON run configuration. Unknown keys and malformed values raise
/// Error(parse); inconsistent model settings raise Error(model).
RunConfig parse_run_config(const std::string& text);

nlohmann::json node_law_to_json(const NodeLaw& law);
nlohmann::json scale_law_to_json(const ScaleLaw& law);
/// Echo of the settings that determine a fit, for run manifests.
nlohmann::json fit_config_to_json(const FitConfig& config);

}  // namespace sba

#endif  // SBA_CONFIG_HPP
