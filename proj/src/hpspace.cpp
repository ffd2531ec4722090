#include "hpod/hpspace.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hpod {

using nlohmann::json;

namespace {

double numeric_of(const HpValue& v) {
    if (std::holds_alternative<std::int64_t>(v))
        return static_cast<double>(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    throw NumericError("categorical value where numeric expected");
}

std::pair<double, double> grid_hull(const HpDomain& d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& g : d.grid) {
        const double x = numeric_of(g);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return {lo, hi};
}

}  // namespace

const HpDomain& HpSpace::domain(const std::string& name) const {
    return domains[static_cast<size_t>(domain_index(name))];
}

int HpSpace::domain_index(const std::string& name) const {
    for (size_t i = 0; i < domains.size(); ++i)
        if (domains[i].name == name) return static_cast<int>(i);
    throw ConfigError("unknown HP domain: " + name);
}

std::int64_t get_int(const HpSpace& space, const HpSetting& s, const std::string& name) {
    return std::get<std::int64_t>(s.values[static_cast<size_t>(space.domain_index(name))]);
}
double get_real(const HpSpace& space, const HpSetting& s, const std::string& name) {
    return std::get<double>(s.values[static_cast<size_t>(space.domain_index(name))]);
}
const std::string& get_cat(const HpSpace& space, const HpSetting& s,
                           const std::string& name) {
    return std::get<std::string>(s.values[static_cast<size_t>(space.domain_index(name))]);
}

void validate_setting(const HpSpace& space, const HpSetting& s) {
    if (s.values.size() != space.domains.size())
        throw ConfigError("setting arity mismatch");
    for (size_t i = 0; i < space.domains.size(); ++i) {
        const auto& d = space.domains[i];
        const auto& v = s.values[i];
        switch (d.kind) {
            case HpKind::Categorical: {
                const auto& c = std::get<std::string>(v);
                if (std::find(d.choices.begin(), d.choices.end(), c) == d.choices.end())
                    throw ConfigError("choice '" + c + "' not in domain " + d.name);
                break;
            }
            case HpKind::Integer: {
                const auto x = std::get<std::int64_t>(v);
                if (x < static_cast<std::int64_t>(d.lo) || x > static_cast<std::int64_t>(d.hi))
                    throw ConfigError("value out of domain " + d.name);
                break;
            }
            case HpKind::Real: {
                const double x = std::get<double>(v);
                if (x < d.lo || x > d.hi)
                    throw ConfigError("value out of domain " + d.name);
                break;
            }
        }
    }
}

std::vector<HpSetting> meta_grid(const HpSpace& space) {
    std::vector<HpSetting> out;
    for (const auto& d : space.domains)
        if (d.grid.empty()) throw ConfigError("domain " + d.name + " has no grid");
    std::vector<size_t> idx(space.domains.size(), 0);
    for (;;) {
        HpSetting s;
        for (size_t i = 0; i < space.domains.size(); ++i)
            s.values.push_back(space.domains[i].grid[idx[i]]);
        validate_setting(space, s);
        out.push_back(std::move(s));
        // odometer increment, last domain fastest
        size_t i = space.domains.size();
        while (i > 0) {
            --i;
            if (++idx[i] < space.domains[i].grid.size()) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
    }
}

std::vector<HpSetting> sample_settings(const HpSpace& space, int count,
                                       std::uint64_t seed) {
    if (count < 1) throw ConfigError("sample count must be >= 1");
    Rng rng(seed);
    std::vector<HpSetting> out;
    out.reserve(static_cast<size_t>(count));
    for (int k = 0; k < count; ++k) {
        HpSetting s;
        for (const auto& d : space.domains) {
            switch (d.kind) {
                case HpKind::Categorical: {
                    // uniform over the grid's choices
                    const auto& g = d.grid[static_cast<size_t>(
                        rng.uniform_int(0, static_cast<std::int64_t>(d.grid.size()) - 1))];
                    s.values.push_back(g);
                    break;
                }
                case HpKind::Integer: {
                    const auto [lo, hi] = grid_hull(d);
                    const double x = rng.uniform(lo, hi);
                    s.values.push_back(static_cast<std::int64_t>(std::llround(x)));
                    break;
                }
                case HpKind::Real: {
                    const auto [lo, hi] = grid_hull(d);
                    s.values.push_back(rng.uniform(lo, hi));
                    break;
                }
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::size_t encoding_width(const HpSpace& space) {
    std::size_t w = 0;
    for (const auto& d : space.domains)
        w += d.kind == HpKind::Categorical ? d.choices.size() : 1;
    return w;
}

HpEncoding encode(const HpSpace& space, const HpSetting& s) {
    validate_setting(space, s);
    HpEncoding e;
    e.v.reserve(encoding_width(space));
    for (size_t i = 0; i < space.domains.size(); ++i) {
        const auto& d = space.domains[i];
        if (d.kind == HpKind::Categorical) {
            const auto& c = std::get<std::string>(s.values[i]);
            for (const auto& choice : d.choices) e.v.push_back(choice == c ? 1.0 : 0.0);
        } else {
            const auto [lo, hi] = grid_hull(d);
            const double x = numeric_of(s.values[i]);
            e.v.push_back(hi > lo ? (x - lo) / (hi - lo) : 0.0);
        }
    }
    return e;
}

HpSetting decode(const HpSpace& space, const HpEncoding& e) {
    HpSetting s;
    size_t pos = 0;
    for (const auto& d : space.domains) {
        if (d.kind == HpKind::Categorical) {
            size_t best = 0;
            for (size_t c = 1; c < d.choices.size(); ++c)
                if (e.v[pos + c] > e.v[pos + best]) best = c;
            s.values.push_back(d.choices[best]);
            pos += d.choices.size();
        } else {
            const auto [lo, hi] = grid_hull(d);
            const double x = lo + e.v[pos] * (hi - lo);
            if (d.kind == HpKind::Integer)
                s.values.push_back(static_cast<std::int64_t>(std::llround(x)));
            else
                s.values.push_back(x);
            ++pos;
        }
    }
    return s;
}

namespace {

HpValue value_from_json(const json& j, HpKind kind) {
    switch (kind) {
        case HpKind::Categorical: return j.get<std::string>();
        case HpKind::Integer: return j.get<std::int64_t>();
        case HpKind::Real: return j.get<double>();
    }
    throw ConfigError("bad HP kind");
}

json value_to_json(const HpValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    return std::get<double>(v);
}

}  // namespace

HpSpace space_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad HP space manifest: ") + e.what());
    }
    HpSpace sp;
    sp.algorithm = j.at("algorithm").get<std::string>();
    for (const auto& dj : j.at("domains")) {
        HpDomain d;
        d.name = dj.at("name").get<std::string>();
        const auto kind = dj.at("kind").get<std::string>();
        if (kind == "categorical") {
            d.kind = HpKind::Categorical;
            d.choices = dj.at("choices").get<std::vector<std::string>>();
            if (d.choices.size() < 2)
                throw ConfigError("categorical domain needs >= 2 choices: " + d.name);
        } else if (kind == "integer" || kind == "real") {
            d.kind = kind == "integer" ? HpKind::Integer : HpKind::Real;
            d.lo = dj.at("lo").get<double>();
            d.hi = dj.at("hi").get<double>();
            if (!(d.lo < d.hi)) throw ConfigError("need lo < hi in domain " + d.name);
        } else {
            throw ConfigError("unknown domain kind: " + kind);
        }
        for (const auto& gv : dj.at("grid")) d.grid.push_back(value_from_json(gv, d.kind));
        sp.domains.push_back(std::move(d));
    }
    for (size_t i = 0; i < sp.domains.size(); ++i)
        for (size_t k = i + 1; k < sp.domains.size(); ++k)
            if (sp.domains[i].name == sp.domains[k].name)
                throw ConfigError("duplicate domain name: " + sp.domains[i].name);
    // every grid value must lie in its domain
    for (const auto& d : sp.domains)
        for (const auto& g : d.grid) {
            HpSetting probe;  // validate one value via a throwaway single check
            if (d.kind == HpKind::Categorical) {
                const auto& c = std::get<std::string>(g);
                if (std::find(d.choices.begin(), d.choices.end(), c) == d.choices.end())
                    throw ConfigError("grid value outside domain " + d.name);
            } else {
                const double x = numeric_of(g);
                if (x < d.lo || x > d.hi)
                    throw ConfigError("grid value outside domain " + d.name);
            }
        }
    return sp;
}

std::string space_to_json(const HpSpace& space) {
    json j;
    j["algorithm"] = space.algorithm;
    j["domains"] = json::array();
    for (const auto& d : space.domains) {
        json dj;
        dj["name"] = d.name;
        switch (d.kind) {
            case HpKind::Categorical:
                dj["kind"] = "categorical";
                dj["choices"] = d.choices;
                break;
            case HpKind::Integer:
                dj["kind"] = "integer";
                dj["lo"] = d.lo;
                dj["hi"] = d.hi;
                break;
            case HpKind::Real:
                dj["kind"] = "real";
                dj["lo"] = d.lo;
                dj["hi"] = d.hi;
                break;
        }
        dj["grid"] = json::array();
        for (const auto& g : d.grid) dj["grid"].push_back(value_to_json(g));
        j["domains"].push_back(std::move(dj));
    }
    return j.dump(2);
}

HpSpace lof_space() {
    HpSpace sp;
    sp.algorithm = "lof";
    HpDomain k;
    k.name = "n_neighbors";
    k.kind = HpKind::Integer;
    k.lo = 1;
    k.hi = 80;
    for (std::int64_t v = 1; v <= 79; v += 2) k.grid.push_back(v);  // 40 values
    HpDomain m;
    m.name = "metric";
    m.kind = HpKind::Categorical;
    m.choices = {"chebyshev", "minkowski", "cosine", "euclidean", "manhattan"};
    for (const auto& c : m.choices) m.grid.push_back(c);
    sp.domains = {k, m};
    return sp;
}

HpSpace iforest_space() {
    HpSpace sp;
    sp.algorithm = "iforest";
    HpDomain t;
    t.name = "n_estimators";
    t.kind = HpKind::Integer;
    t.lo = 10;
    t.hi = 150;
    for (std::int64_t v : {10, 20, 30, 40, 50, 75, 100, 150}) t.grid.push_back(v);
    HpDomain s;
    s.name = "max_samples";
    s.kind = HpKind::Real;
    s.lo = 0.1;
    s.hi = 0.9;
    for (int i = 1; i <= 9; ++i) s.grid.push_back(0.1 * i);
    HpDomain f;
    f.name = "max_features";
    f.kind = HpKind::Real;
    f.lo = 0.2;
    f.hi = 0.8;
    for (double v : {0.2, 0.4, 0.6, 0.8}) f.grid.push_back(v);
    sp.domains = {t, s, f};
    return sp;
}

HpSpace builtin_space(const std::string& algorithm) {
    if (algorithm == "lof") return lof_space();
    if (algorithm == "iforest") return iforest_space();
    throw ConfigError("unknown algorithm: " + algorithm);
}

std::string value_to_string(const HpValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    std::ostringstream os;
    if (std::holds_alternative<std::int64_t>(v))
        os << std::get<std::int64_t>(v);
    else
        os << std::get<double>(v);
    return os.str();
}

}  // namespace hpod
