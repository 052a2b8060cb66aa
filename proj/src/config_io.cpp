#include "driftsim/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "driftsim/errors.hpp"

namespace driftsim {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

uint64_t parse_u64(const std::string& field, const std::string& v) {
    try {
        size_t pos = 0;
        if (!v.empty() && v[0] == '-')
            throw ConfigError(field, "must be non-negative");
        uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw ConfigError(field, "not an integer: " + v);
        return r;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError(field, "not an integer: " + v);
    }
}

double parse_f64(const std::string& field, const std::string& v) {
    try {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw ConfigError(field, "not a number: " + v);
        return r;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError(field, "not a number: " + v);
    }
}

bool parse_bool(const std::string& field, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(field, "expected true or false, got: " + v);
}

ValueDistribution parse_dist(const std::string& field, const std::string& v) {
    if (v == "uniform") return ValueDistribution::Uniform;
    throw ConfigError(field, "unknown distribution: " + v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream s(v);
    while (std::getline(s, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

const char* to_string(RegionalProtocol p) {
    switch (p) {
    case RegionalProtocol::MovingWindow: return "moving_window";
    case RegionalProtocol::GradualMovingWindow: return "gradual_moving_window";
    case RegionalProtocol::CyclesOfChange: return "cycles_of_change";
    }
    return "?";
}

const char* to_string(AssignMethod m) {
    return m == AssignMethod::Random ? "random" : "by_class";
}

const char* to_string(DependencyProtocol p) {
    switch (p) {
    case DependencyProtocol::Random: return "random";
    case DependencyProtocol::ByReference: return "by_reference";
    case DependencyProtocol::TraversedObjects: return "traversed_objects";
    case DependencyProtocol::SameClass: return "same_class";
    }
    return "?";
}

const char* to_string(PolicyKind k) {
    switch (k) {
    case PolicyKind::None: return "none";
    case PolicyKind::Prp: return "prp";
    case PolicyKind::Gp: return "gp";
    case PolicyKind::Aggressive: return "aggressive";
    }
    return "?";
}

RegionalProtocol regional_protocol_from(const std::string& s) {
    if (s == "moving_window") return RegionalProtocol::MovingWindow;
    if (s == "gradual_moving_window") return RegionalProtocol::GradualMovingWindow;
    if (s == "cycles_of_change") return RegionalProtocol::CyclesOfChange;
    throw ConfigError("regional.protocol", "unknown protocol: " + s);
}

DependencyProtocol dependency_protocol_from(const std::string& s) {
    if (s == "random") return DependencyProtocol::Random;
    if (s == "by_reference") return DependencyProtocol::ByReference;
    if (s == "traversed_objects") return DependencyProtocol::TraversedObjects;
    if (s == "same_class") return DependencyProtocol::SameClass;
    throw ConfigError("dependency.protocol", "unknown protocol: " + s);
}

PolicyKind policy_kind_from(const std::string& s) {
    if (s == "none") return PolicyKind::None;
    if (s == "prp") return PolicyKind::Prp;
    if (s == "gp") return PolicyKind::Gp;
    if (s == "aggressive") return PolicyKind::Aggressive;
    throw ConfigError("policy.kind", "unknown policy: " + s);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[database]\n";
    o << "classes = " << c.db.num_classes << "\n";
    o << "max_refs_per_class = " << c.db.max_refs_per_class << "\n";
    o << "base_size = " << c.db.base_size << "\n";
    o << "objects = " << c.db.num_objects << "\n";
    o << "ref_types = " << c.db.num_ref_types << "\n";
    o << "ref_type_dist = uniform\n";
    o << "class_ref_dist = uniform\n";
    o << "objects_in_classes_dist = uniform\n";
    o << "object_refs_dist = uniform\n";
    o << "\n[storage]\n";
    o << "page_size = " << c.storage.page_size << "\n";
    o << "buffer_bytes = " << c.storage.buffer_bytes << "\n";
    o << "replacement = lru1\n";
    o << "placement = sequential\n";
    o << "\n[regional]\n";
    o << "protocol = " << to_string(c.regional.protocol) << "\n";
    o << "h = " << fmt_double(c.regional.h) << "\n";
    o << "region_fraction = " << fmt_double(c.regional.region_fraction) << "\n";
    o << "weight_max = " << fmt_double(c.regional.weight_max) << "\n";
    o << "weight_min = " << fmt_double(c.regional.weight_min) << "\n";
    o << "weight_step = " << fmt_double(c.regional.weight_step) << "\n";
    o << "assignment = " << to_string(c.regional.assignment) << "\n";
    o << "cycle_rest_weight = "
      << (c.regional.cycle_rest_weight < 0 ? "auto"
                                           : fmt_double(c.regional.cycle_rest_weight))
      << "\n";
    o << "\n[dependency]\n";
    o << "protocol = " << to_string(c.dependency.protocol) << "\n";
    o << "integration = " << (c.integration ? "true" : "false") << "\n";
    o << "hybrid_r = " << c.dependency.hybrid_r << "\n";
    o << "same_class_fraction = " << fmt_double(c.dependency.same_class_fraction) << "\n";
    o << "first_phase_hot_fraction = "
      << fmt_double(c.dependency.first_phase_hot_fraction) << "\n";
    o << "first_phase_hot_prob = " << fmt_double(c.dependency.first_phase_hot_prob)
      << "\n";
    o << "\n[policy]\n";
    o << "kind = " << to_string(c.policy.kind) << "\n";
    o << "trigger_period = " << c.policy.trigger_period << "\n";
    o << "worst_pages = " << c.policy.worst_pages << "\n";
    o << "min_observations = " << c.policy.min_observations << "\n";
    o << "decay = " << fmt_double(c.policy.decay) << "\n";
    o << "co_access_window = " << c.policy.co_access_window << "\n";
    o << "\n[run]\n";
    o << "transactions = " << c.transactions << "\n";
    o << "depth = " << c.traversal_depth << "\n";
    o << "seed = " << c.seed << "\n";
    o << "h_sweep =";
    for (size_t i = 0; i < c.h_sweep.size(); ++i)
        o << (i ? "," : " ") << fmt_double(c.h_sweep[i]);
    o << "\n";
    o << "sweep_policies =";
    for (size_t i = 0; i < c.sweep_policies.size(); ++i)
        o << (i ? "," : " ") << to_string(c.sweep_policies[i]);
    o << "\n";
    return o.str();
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string section;
    std::string line;
    size_t lineno = 0;

    auto handle = [&](const std::string& key, const std::string& value) {
        const std::string field = section + "." + key;
        using Setter = std::function<void(const std::string&)>;
        const std::map<std::string, Setter> table = {
            {"database.classes", [&](const std::string& v) { c.db.num_classes = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"database.max_refs_per_class", [&](const std::string& v) { c.db.max_refs_per_class = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"database.base_size", [&](const std::string& v) { c.db.base_size = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"database.objects", [&](const std::string& v) { c.db.num_objects = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"database.ref_types", [&](const std::string& v) { c.db.num_ref_types = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"database.ref_type_dist", [&](const std::string& v) { c.db.ref_type_dist = parse_dist(field, v); }},
            {"database.class_ref_dist", [&](const std::string& v) { c.db.class_ref_dist = parse_dist(field, v); }},
            {"database.objects_in_classes_dist", [&](const std::string& v) { c.db.objects_in_classes_dist = parse_dist(field, v); }},
            {"database.object_refs_dist", [&](const std::string& v) { c.db.object_refs_dist = parse_dist(field, v); }},
            {"storage.page_size", [&](const std::string& v) { c.storage.page_size = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"storage.buffer_bytes", [&](const std::string& v) { c.storage.buffer_bytes = parse_u64(field, v); }},
            {"storage.replacement", [&](const std::string& v) { if (v != "lru1") throw ConfigError(field, "only lru1 is supported"); }},
            {"storage.placement", [&](const std::string& v) { if (v != "sequential") throw ConfigError(field, "only sequential is supported"); }},
            {"regional.protocol", [&](const std::string& v) { c.regional.protocol = regional_protocol_from(v); }},
            {"regional.h", [&](const std::string& v) { c.regional.h = parse_f64(field, v); }},
            {"regional.region_fraction", [&](const std::string& v) { c.regional.region_fraction = parse_f64(field, v); }},
            {"regional.weight_max", [&](const std::string& v) { c.regional.weight_max = parse_f64(field, v); }},
            {"regional.weight_min", [&](const std::string& v) { c.regional.weight_min = parse_f64(field, v); }},
            {"regional.weight_step", [&](const std::string& v) { c.regional.weight_step = parse_f64(field, v); }},
            {"regional.assignment", [&](const std::string& v) {
                 if (v == "random") c.regional.assignment = AssignMethod::Random;
                 else if (v == "by_class") c.regional.assignment = AssignMethod::ByClass;
                 else throw ConfigError(field, "unknown assignment: " + v);
             }},
            {"regional.cycle_rest_weight", [&](const std::string& v) {
                 c.regional.cycle_rest_weight = (v == "auto") ? -1.0 : parse_f64(field, v);
             }},
            {"dependency.protocol", [&](const std::string& v) { c.dependency.protocol = dependency_protocol_from(v); }},
            {"dependency.integration", [&](const std::string& v) { c.integration = parse_bool(field, v); }},
            {"dependency.hybrid_r", [&](const std::string& v) { c.dependency.hybrid_r = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"dependency.same_class_fraction", [&](const std::string& v) { c.dependency.same_class_fraction = parse_f64(field, v); }},
            {"dependency.first_phase_hot_fraction", [&](const std::string& v) { c.dependency.first_phase_hot_fraction = parse_f64(field, v); }},
            {"dependency.first_phase_hot_prob", [&](const std::string& v) { c.dependency.first_phase_hot_prob = parse_f64(field, v); }},
            {"policy.kind", [&](const std::string& v) { c.policy.kind = policy_kind_from(v); }},
            {"policy.trigger_period", [&](const std::string& v) { c.policy.trigger_period = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"policy.worst_pages", [&](const std::string& v) { c.policy.worst_pages = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"policy.min_observations", [&](const std::string& v) { c.policy.min_observations = parse_u64(field, v); }},
            {"policy.decay", [&](const std::string& v) { c.policy.decay = parse_f64(field, v); }},
            {"policy.co_access_window", [&](const std::string& v) { c.policy.co_access_window = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"run.transactions", [&](const std::string& v) { c.transactions = parse_u64(field, v); }},
            {"run.depth", [&](const std::string& v) { c.traversal_depth = static_cast<uint32_t>(parse_u64(field, v)); }},
            {"run.seed", [&](const std::string& v) { c.seed = parse_u64(field, v); }},
            {"run.h_sweep", [&](const std::string& v) {
                 c.h_sweep.clear();
                 for (const auto& item : split_list(v))
                     c.h_sweep.push_back(parse_f64(field, item));
             }},
            {"run.sweep_policies", [&](const std::string& v) {
                 c.sweep_policies.clear();
                 for (const auto& item : split_list(v))
                     c.sweep_policies.push_back(policy_kind_from(item));
             }},
        };
        auto it = table.find(field);
        if (it == table.end()) throw ConfigError(field, "unknown key");
        it->second(value);
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config", "bad section header at line " +
                                                std::to_string(lineno));
            section = t.substr(1, t.size() - 2);
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", "expected key = value at line " +
                                            std::to_string(lineno));
        if (section.empty())
            throw ConfigError("config", "key outside any section at line " +
                                            std::to_string(lineno));
        handle(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RunError("cannot open config file: " + path);
    return parse_config(in);
}

} // namespace driftsim
