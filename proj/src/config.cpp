#include "sba/config.hpp"

#include <initializer_list>
#include <set>

#include "sba/error.hpp"
#include "sba/io.hpp"

namespace sba {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::parse, where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.contains(key)) fail(where, "unknown key '" + key + "'");
}

double number(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    fail(where, "expected a number");
}

double field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
    return number(j.at(key), where + "." + key);
}

long integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<long>();
}

NodeLaw parse_node_law(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) fail(where, "node law needs a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "normal") {
        only_keys(j, where, {"kind", "mean", "sd"});
        return NodeLaw::normal(field(j, "mean", where), field(j, "sd", where));
    }
    if (kind == "degenerate") {
        only_keys(j, where, {"kind", "value"});
        return NodeLaw::degenerate(field(j, "value", where));
    }
    if (kind == "uniform") {
        only_keys(j, where, {"kind", "lower", "upper"});
        return NodeLaw::uniform(field(j, "lower", where), field(j, "upper", where));
    }
    fail(where, "unknown node law kind '" + kind + "'");
}

ScaleLaw parse_scale_law(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) fail(where, "scale law needs a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "inverse_gamma" || kind == "gamma") {
        only_keys(j, where, {"kind", "shape", "rate"});
        const double shape = field(j, "shape", where);
        const double rate = field(j, "rate", where);
        return kind == "gamma" ? ScaleLaw::gamma(shape, rate) : ScaleLaw::inverse_gamma(shape, rate);
    }
    if (kind == "log_normal") {
        only_keys(j, where, {"kind", "mu", "sigma"});
        return ScaleLaw::log_normal(field(j, "mu", where), field(j, "sigma", where));
    }
    fail(where, "unknown scale law kind '" + kind + "'");
}

Domain parse_domain(const json& j) {
    if (!j.is_array() || j.size() != 2) fail("domain", "expected [lower, upper]");
    const double lo = j[0].is_null() ? -kInf : number(j[0], "domain[0]");
    const double hi = j[1].is_null() ? kInf : number(j[1], "domain[1]");
    if (!(lo < hi)) fail("domain", "needs lower < upper");
    return Domain(lo, hi);
}

const char* variant_name(Variant v) { return v == Variant::general ? "general" : "parsimonious"; }

}  // namespace

RunConfig parse_run_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, std::string("config is not valid JSON: ") + e.what());
    }
    only_keys(root, "config", {"kernel", "variant", "n", "m2", "alpha", "domain", "node_laws", "scale_prior", "mcmc",
                               "slice", "grid", "node_target", "band_prob", "measure", "draws"});
    RunConfig rc;
    FitConfig& fit = rc.fit;
    try {
        if (root.contains("kernel")) fit.kernel = parse_kernel(root.at("kernel").get<std::string>());
        if (root.contains("variant")) {
            const auto v = root.at("variant").get<std::string>();
            if (v == "parsimonious") fit.variant = Variant::parsimonious;
            else if (v == "general") fit.variant = Variant::general;
            else fail("variant", "expected 'parsimonious' or 'general'");
        }
        if (root.contains("n")) fit.n = static_cast<int>(integer(root.at("n"), "n"));
        if (fit.n < 1 || fit.n > kMaxDepth) throw Error(ErrorKind::model, "n must lie in 1.." + std::to_string(kMaxDepth));
        if (root.contains("m2")) fit.m2 = static_cast<int>(integer(root.at("m2"), "m2"));
        if (root.contains("alpha")) {
            const auto& a = root.at("alpha");
            if (!a.is_array()) fail("alpha", "expected an array");
            fit.alpha.clear();
            for (std::size_t k = 0; k < a.size(); ++k) fit.alpha.push_back(number(a[k], "alpha"));
        } else if (fit.variant == Variant::general && fit.m2 >= 1) {
            fit.alpha.assign(static_cast<std::size_t>(fit.m2), 1.0);
        }

        const Domain domain = root.contains("domain") ? parse_domain(root.at("domain")) : kernel_parameter_domain(fit.kernel);
        NodeLaw default_law = NodeLaw::normal(0.0, 1.0);
        std::map<std::pair<int, long>, NodeLaw> overrides;
        if (root.contains("node_laws")) {
            const auto& nl = root.at("node_laws");
            only_keys(nl, "node_laws", {"default", "overrides"});
            if (nl.contains("default")) default_law = parse_node_law(nl.at("default"), "node_laws.default");
            if (nl.contains("overrides")) {
                const auto& ov = nl.at("overrides");
                if (!ov.is_array()) fail("node_laws.overrides", "expected an array");
                for (std::size_t k = 0; k < ov.size(); ++k) {
                    const std::string where = "node_laws.overrides[" + std::to_string(k) + "]";
                    only_keys(ov[k], where, {"row", "position", "law"});
                    if (!ov[k].contains("row") || !ov[k].contains("position") || !ov[k].contains("law"))
                        fail(where, "needs 'row', 'position' and 'law'");
                    const int row = static_cast<int>(integer(ov[k].at("row"), where + ".row"));
                    const long pos = integer(ov[k].at("position"), where + ".position");
                    overrides[{row, pos}] = parse_node_law(ov[k].at("law"), where + ".law");
                }
            }
        }
        fit.family = NodeLawFamily(fit.n, domain, default_law, std::move(overrides));

        if (root.contains("scale_prior")) fit.scale_prior = parse_scale_law(root.at("scale_prior"), "scale_prior");

        fit.keep_mixing = false;
        if (root.contains("mcmc")) {
            const auto& m = root.at("mcmc");
            only_keys(m, "mcmc", {"iterations", "burn_in", "thin", "seed", "chains", "freeze_nodes", "keep_mixing"});
            if (m.contains("iterations")) fit.iterations = integer(m.at("iterations"), "mcmc.iterations");
            if (m.contains("burn_in")) fit.burn_in = integer(m.at("burn_in"), "mcmc.burn_in");
            if (m.contains("thin")) fit.thin = integer(m.at("thin"), "mcmc.thin");
            if (m.contains("seed")) {
                if (!m.at("seed").is_number_unsigned()) fail("mcmc.seed", "expected a nonnegative integer");
                fit.seed = m.at("seed").get<std::uint64_t>();
                rc.has_seed = true;
            }
            if (m.contains("chains")) rc.chains = static_cast<int>(integer(m.at("chains"), "mcmc.chains"));
            if (m.contains("freeze_nodes")) fit.freeze_nodes = m.at("freeze_nodes").get<bool>();
            if (m.contains("keep_mixing")) fit.keep_mixing = m.at("keep_mixing").get<bool>();
        }
        if (root.contains("slice")) {
            const auto& s = root.at("slice");
            only_keys(s, "slice", {"width_fraction", "max_shrink", "log_width", "max_steps_out"});
            if (s.contains("width_fraction")) fit.slice.width_fraction = number(s.at("width_fraction"), "slice.width_fraction");
            if (s.contains("max_shrink")) fit.slice.max_shrink = static_cast<int>(integer(s.at("max_shrink"), "slice.max_shrink"));
            if (s.contains("log_width")) fit.slice.log_width = number(s.at("log_width"), "slice.log_width");
            if (s.contains("max_steps_out"))
                fit.slice.max_steps_out = static_cast<int>(integer(s.at("max_steps_out"), "slice.max_steps_out"));
        }
        if (root.contains("grid")) {
            const auto& g = root.at("grid");
            only_keys(g, "grid", {"lo", "hi", "count"});
            GridSpec spec;
            spec.lo = field(g, "lo", "grid");
            spec.hi = field(g, "hi", "grid");
            if (g.contains("count")) spec.count = static_cast<int>(integer(g.at("count"), "grid.count"));
            fit.grid = spec;
        }
        if (root.contains("node_target")) {
            const auto t = root.at("node_target").get<std::string>();
            if (t == "paper") fit.node_target = NodeTarget::paper;
            else if (t == "strict_joint") fit.node_target = NodeTarget::strict_joint;
            else fail("node_target", "expected 'paper' or 'strict_joint'");
        }
        if (root.contains("band_prob")) rc.band_prob = number(root.at("band_prob"), "band_prob");
        if (!(rc.band_prob > 0.0 && rc.band_prob < 1.0)) fail("band_prob", "must lie in (0,1)");
        if (root.contains("draws")) rc.draws = integer(root.at("draws"), "draws");
        if (rc.draws < 0) fail("draws", "must be nonnegative");
        if (root.contains("measure")) {
            const auto& m = root.at("measure");
            if (m.is_string()) {
                rc.measure = m.get<std::string>();
            } else if (m.is_array()) {
                std::string spec;
                for (const auto& line : m) spec += line.get<std::string>() + "\n";
                rc.measure = spec;
            } else {
                fail("measure", "expected a string or an array of lines");
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::parse, std::string("config has a value of the wrong type: ") + e.what());
    }
    if (rc.chains < 1) fail("mcmc.chains", "must be at least 1");
    return rc;
}

json node_law_to_json(const NodeLaw& law) {
    switch (law.kind) {
        case NodeLaw::Kind::normal: return {{"kind", "normal"}, {"mean", law.p1}, {"sd", law.p2}};
        case NodeLaw::Kind::degenerate: return {{"kind", "degenerate"}, {"value", law.p1}};
        case NodeLaw::Kind::uniform: return {{"kind", "uniform"}, {"lower", law.p1}, {"upper", law.p2}};
    }
    return {};
}

json scale_law_to_json(const ScaleLaw& law) {
    switch (law.kind) {
        case ScaleLaw::Kind::inverse_gamma: return {{"kind", "inverse_gamma"}, {"shape", law.p1}, {"rate", law.p2}};
        case ScaleLaw::Kind::gamma: return {{"kind", "gamma"}, {"shape", law.p1}, {"rate", law.p2}};
        case ScaleLaw::Kind::log_normal: return {{"kind", "log_normal"}, {"mu", law.p1}, {"sigma", law.p2}};
    }
    return {};
}

json fit_config_to_json(const FitConfig& c) {
    auto bound = [](double x) -> json {
        if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
        return x;
    };
    json overrides = json::array();
    for (const auto& [key, law] : c.family.overrides())
        overrides.push_back({{"row", key.first}, {"position", key.second}, {"law", node_law_to_json(law)}});
    json j = {
        {"kernel", to_string(c.kernel)},
        {"variant", variant_name(c.variant)},
        {"n", c.n},
        {"domain", {bound(c.family.domain().lower), bound(c.family.domain().upper)}},
        {"node_laws", {{"default", node_law_to_json(c.family.default_law())}, {"overrides", overrides}}},
        {"scale_prior", scale_law_to_json(c.scale_prior)},
        {"mcmc",
         {{"iterations", c.iterations},
          {"burn_in", c.burn_in},
          {"thin", c.thin},
          {"seed", c.seed},
          {"freeze_nodes", c.freeze_nodes},
          {"keep_mixing", c.keep_mixing}}},
        {"slice",
         {{"width_fraction", c.slice.width_fraction},
          {"max_shrink", c.slice.max_shrink},
          {"log_width", c.slice.log_width},
          {"max_steps_out", c.slice.max_steps_out}}},
        {"node_target", c.node_target == NodeTarget::strict_joint ? "strict_joint" : "paper"},
    };
    if (c.variant == Variant::general) {
        j["m2"] = c.m2;
        j["alpha"] = c.alpha;
    }
    if (c.grid) j["grid"] = {{"lo", c.grid->lo}, {"hi", c.grid->hi}, {"count", c.grid->count}};
    return j;
}

}  // namespace sba
