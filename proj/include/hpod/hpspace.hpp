#pragma once

#include "hpod/common.hpp"

#include <string>
#include <variant>
#include <vector>

namespace hpod {

// One hyperparameter value: categorical choice index stored as string,
// numeric values as double (integers hold an integral double).
using HpValue = std::variant<std::string, std::int64_t, double>;

enum class HpKind { Categorical, Integer, Real };

struct HpDomain {
    std::string name;
    HpKind kind;
    std::vector<std::string> choices;  // categorical only
    double lo = 0.0, hi = 0.0;         // numeric only
    std::vector<HpValue> grid;         // meta-grid values for this domain
};

struct HpSpace {
    std::string algorithm;  // "lof" | "iforest" | ...
    std::vector<HpDomain> domains;

    const HpDomain& domain(const std::string& name) const;
    int domain_index(const std::string& name) const;
};

struct HpSetting {
    std::vector<HpValue> values;  // one per domain, in domain order

    bool operator==(const HpSetting&) const = default;
};

struct HpEncoding {
    std::vector<double> v;

    bool operator==(const HpEncoding&) const = default;
    bool operator<(const HpEncoding& o) const { return v < o.v; }
};

// Accessors with domain lookup by name.
std::int64_t get_int(const HpSpace& space, const HpSetting& s, const std::string& name);
double get_real(const HpSpace& space, const HpSetting& s, const std::string& name);
const std::string& get_cat(const HpSpace& space, const HpSetting& s,
                           const std::string& name);

// Full cross-product of the per-domain grids, lexicographic in domain order.
std::vector<HpSetting> meta_grid(const HpSpace& space);

// Uniform sampling inside the meta-grid hull: numeric domains uniform in
// [min, max] of their grid values (integers rounded), categoricals uniform
// over the grid choices. Deterministic given seed.
std::vector<HpSetting> sample_settings(const HpSpace& space, int count,
                                       std::uint64_t seed);

// Categorical -> one-hot, numeric -> (v - lo)/(hi - lo) over the grid hull.
HpEncoding encode(const HpSpace& space, const HpSetting& s);
std::size_t encoding_width(const HpSpace& space);

// Inverse of encode for settings on/off grid; used by tests and persistence.
HpSetting decode(const HpSpace& space, const HpEncoding& e);

void validate_setting(const HpSpace& space, const HpSetting& s);

// JSON manifest I/O: [{name, kind, lo/hi or choices, grid}, ...] plus algorithm.
HpSpace space_from_json(const std::string& json_text);
std::string space_to_json(const HpSpace& space);

// Shipped defaults matching the LOF (40x5=200) and iForest (8x9x4=288) grids.
HpSpace lof_space();
HpSpace iforest_space();
HpSpace builtin_space(const std::string& algorithm);

std::string value_to_string(const HpValue& v);

}  // namespace hpod
