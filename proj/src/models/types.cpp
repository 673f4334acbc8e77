#include "rvkit/models/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace rvkit {

std::string_view to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::har: return "har";
        case ModelFamily::harq: return "harq";
        case ModelFamily::mem11: return "mem11";
        case ModelFamily::amem11: return "amem11";
        case ModelFamily::amem21: return "amem21";
    }
    return "har";
}

std::optional<ModelFamily> parse_model_family(std::string_view s) {
    std::string key;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) != 0) key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key == "har") return ModelFamily::har;
    if (key == "harq") return ModelFamily::harq;
    if (key == "mem" || key == "mem11") return ModelFamily::mem11;
    if (key == "amem" || key == "amem11") return ModelFamily::amem11;
    if (key == "amem21") return ModelFamily::amem21;
    return std::nullopt;
}

double annualize(double variance) {
    if (!(variance >= 0.0)) {
        throw std::domain_error("annualize: variance must be non-negative; floor the measure at 0 first");
    }
    return std::sqrt(252.0 * variance) * 100.0;
}

std::string quarticity_for(std::string_view measure) {
    if (measure.size() > 4 && measure.ends_with("5_ss")) return "rq5_ss";
    if (measure.ends_with("5")) return "rq5";
    return "rq1";
}

}  // namespace rvkit
