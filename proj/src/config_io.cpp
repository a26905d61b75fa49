#include "imgep/config_io.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "imgep/errors.hpp"

namespace imgep::config_io {

namespace {

void require_object(const json& j, const std::string& field) {
    if (!j.is_object()) throw ValidationError(field, "expected a JSON object");
}

void reject_unknown(const json& j, const std::string& prefix, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ValidationError(prefix + key, "unknown field");
    }
}

double get_double(const json& j, const char* key, double fallback, const std::string& prefix) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ValidationError(prefix + key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(prefix + key, "must be finite");
    return d;
}

int get_int(const json& j, const char* key, int fallback, const std::string& prefix) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ValidationError(prefix + key, "expected an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback, const std::string& prefix) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw ValidationError(prefix + key, "expected a string");
    return v.get<std::string>();
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t fallback, const std::string& prefix) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw ValidationError(prefix + key, "expected a non-negative integer");
}

gray_scott::Config gray_scott_from_json(const json& j) {
    const std::string p = "gray_scott.";
    require_object(j, "gray_scott");
    reject_unknown(j, p,
                   {"width", "height", "steps", "dt", "perlin_cell_size", "perlin_threshold", "kill_term", "stencil",
                    "observe"});
    gray_scott::Config c;
    c.width = get_int(j, "width", c.width, p);
    c.height = get_int(j, "height", c.height, p);
    c.steps = get_int(j, "steps", c.steps, p);
    c.dt = get_double(j, "dt", c.dt, p);
    c.perlin_cell_size = get_int(j, "perlin_cell_size", c.perlin_cell_size, p);
    c.perlin_threshold = get_double(j, "perlin_threshold", c.perlin_threshold, p);

    const std::string kill = get_string(j, "kill_term", "classical", p);
    if (kill == "classical") c.kill_term = gray_scott::KillTerm::classical;
    else if (kill == "as_printed") c.kill_term = gray_scott::KillTerm::as_printed;
    else throw ValidationError(p + "kill_term", "expected classical or as_printed");

    const std::string stencil = get_string(j, "stencil", "nine_point", p);
    if (stencil == "nine_point") c.stencil = gray_scott::Stencil::nine_point;
    else if (stencil == "five_point") c.stencil = gray_scott::Stencil::five_point;
    else throw ValidationError(p + "stencil", "expected nine_point or five_point");

    const std::string observe = get_string(j, "observe", "v", p);
    if (observe == "v") c.observe = gray_scott::Channel::v;
    else if (observe == "u") c.observe = gray_scott::Channel::u;
    else throw ValidationError(p + "observe", "expected u or v");

    try {
        gray_scott::validate(c);
    } catch (const ValidationError& e) {
        throw ValidationError(p + e.field, e.what());
    }
    return c;
}

lenia::Config lenia_from_json(const json& j) {
    const std::string p = "lenia.";
    require_object(j, "lenia");
    reject_unknown(j, p, {"width", "height", "steps", "perlin_cell_size"});
    lenia::Config c;
    c.width = get_int(j, "width", c.width, p);
    c.height = get_int(j, "height", c.height, p);
    c.steps = get_int(j, "steps", c.steps, p);
    c.perlin_cell_size = get_int(j, "perlin_cell_size", c.perlin_cell_size, p);
    try {
        lenia::validate(c);
    } catch (const ValidationError& e) {
        throw ValidationError(p + e.field, e.what());
    }
    return c;
}

}  // namespace

SystemSpec system_spec_from_json(const json& j) {
    require_object(j, "system");
    SystemSpec spec;
    spec.kind = parse_system_kind(get_string(j, "system", "gray_scott", ""));
    if (j.contains("gray_scott")) spec.gray_scott = gray_scott_from_json(j.at("gray_scott"));
    if (j.contains("lenia")) spec.lenia = lenia_from_json(j.at("lenia"));
    return spec;
}

json system_spec_to_json(const SystemSpec& spec) {
    const auto& g = spec.gray_scott;
    const auto& l = spec.lenia;
    return json{
        {"system", to_string(spec.kind)},
        {"gray_scott",
         {{"width", g.width},
          {"height", g.height},
          {"steps", g.steps},
          {"dt", g.dt},
          {"perlin_cell_size", g.perlin_cell_size},
          {"perlin_threshold", g.perlin_threshold},
          {"kill_term", g.kill_term == gray_scott::KillTerm::classical ? "classical" : "as_printed"},
          {"stencil", g.stencil == gray_scott::Stencil::nine_point ? "nine_point" : "five_point"},
          {"observe", g.observe == gray_scott::Channel::v ? "v" : "u"}}},
        {"lenia",
         {{"width", l.width}, {"height", l.height}, {"steps", l.steps}, {"perlin_cell_size", l.perlin_cell_size}}},
    };
}

explorer::Roi roi_from_json(const json& j) {
    require_object(j, "roi");
    explorer::Roi roi;
    if (j.contains("constraints")) {
        reject_unknown(j, "roi.", {"constraints"});
        const json& list = j.at("constraints");
        if (!list.is_array()) throw ValidationError("roi.constraints", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = "roi.constraints[" + std::to_string(i) + "].";
            const json& c = list[i];
            require_object(c, p);
            reject_unknown(c, p, {"feature", "lo", "hi"});
            if (!c.contains("feature") || !c.contains("lo") || !c.contains("hi"))
                throw ValidationError(p, "requires feature, lo and hi");
            roi.constraints.push_back(
                {get_string(c, "feature", "", p), get_double(c, "lo", 0.0, p), get_double(c, "hi", 0.0, p)});
        }
    } else {
        for (const auto& [name, range] : j.items()) {
            if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
                throw ValidationError("roi." + name, "expected [lo, hi]");
            roi.constraints.push_back({name, range[0].get<double>(), range[1].get<double>()});
        }
    }
    roi.validate();
    return roi;
}

json roi_to_json(const explorer::Roi& roi) {
    json list = json::array();
    for (const auto& c : roi.constraints) list.push_back({{"feature", c.feature}, {"lo", c.lo}, {"hi", c.hi}});
    return json{{"constraints", std::move(list)}};
}

explorer::ExplorerConfig explorer_config_from_json(const json& j, explorer::ExplorerConfig base) {
    require_object(j, "config");
    reject_unknown(j, "", {"n_init", "budget", "balance_prob", "subspace_dims", "method", "mutation_sigmas", "seed"});
    base.n_init = get_int(j, "n_init", base.n_init, "");
    base.budget = get_int(j, "budget", base.budget, "");
    base.balance_prob = get_double(j, "balance_prob", base.balance_prob, "");
    base.subspace_dims = get_int(j, "subspace_dims", base.subspace_dims, "");
    if (j.contains("method")) base.method = explorer::parse_method(get_string(j, "method", "", ""));
    if (j.contains("mutation_sigmas")) {
        const json& s = j.at("mutation_sigmas");
        if (!s.is_array()) throw ValidationError("mutation_sigmas", "expected an array of numbers");
        base.mutation_sigmas.clear();
        for (const auto& v : s) {
            if (!v.is_number()) throw ValidationError("mutation_sigmas", "expected an array of numbers");
            base.mutation_sigmas.push_back(v.get<double>());
        }
    }
    base.seed = get_seed(j, "seed", base.seed, "");
    return base;
}

json explorer_config_to_json(const explorer::ExplorerConfig& c) {
    return json{{"n_init", c.n_init},
                {"budget", c.budget},
                {"balance_prob", c.balance_prob},
                {"subspace_dims", c.subspace_dims},
                {"method", explorer::to_string(c.method)},
                {"mutation_sigmas", c.mutation_sigmas},
                {"seed", c.seed}};
}

}  // namespace imgep::config_io
