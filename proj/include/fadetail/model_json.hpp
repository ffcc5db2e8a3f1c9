#ifndef FADETAIL_MODEL_JSON_HPP
#define FADETAIL_MODEL_JSON_HPP

#include <string>

#include "fadetail/diversity.hpp"
#include "fadetail/models.hpp"

namespace fadetail::json {

/// Parses {"model": "<variant-name>", "params": {...}} and validates the
/// result. Throws std::invalid_argument on malformed input or unknown
/// fields, std::domain_error on out-of-range parameters.
models::ChannelModel parse_model(const std::string& text);

/// Serializes back to the wire format (round-trips through parse_model).
std::string serialize_model(const models::ChannelModel& model);

struct DiversityConfig {
    diversity::BranchSet set;
    diversity::Scheme scheme;
};

/// Parses {"scheme": "SC"|"MRC", "branches": [<model>, ...]}.
DiversityConfig parse_diversity(const std::string& text);

std::string serialize_diversity(const DiversityConfig& config);

}  // namespace fadetail::json

#endif
