#pragma once

#include <iosfwd>
#include <string>

#include "driftsim/experiment.hpp"

namespace driftsim {

// Flat sectioned text, `key = value` lines under [section] headers, `#`
// comments. Unknown sections or keys are configuration errors. Parsing
// starts from the built-in defaults and overrides whatever appears.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// Canonical serialization: every section, every key, fixed order. Parsing
// the output reproduces the config exactly.
std::string serialize_config(const ExperimentConfig& cfg);

const char* to_string(RegionalProtocol p);
const char* to_string(AssignMethod m);
const char* to_string(DependencyProtocol p);
const char* to_string(PolicyKind k);

RegionalProtocol regional_protocol_from(const std::string& s);
DependencyProtocol dependency_protocol_from(const std::string& s);
PolicyKind policy_kind_from(const std::string& s);

} // namespace driftsim
