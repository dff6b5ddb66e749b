#pragma once

#include "cyclock/attacks.hpp"
#include "cyclock/cycles.hpp"
#include "cyclock/obfuscate.hpp"
#include "cyclock/toy.hpp"

#include <json.hpp>

#include <string>

namespace cyclock {

inline constexpr int kSchema = 1;

const char* version();
/// FNV-1a over the canonical JSON dump, hex.
std::string config_hash(const nlohmann::json& j);

nlohmann::json to_json(const ObfuscationConfig& c);
ObfuscationConfig obfuscation_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ObfuscationReport& r);
ObfuscationReport obfuscation_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AttackConfig& c);
AttackConfig attack_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AttackResult& r);

nlohmann::json to_json(const CycleSet& s);
nlohmann::json to_json(const KeyVerdict& v);

ToyParams toy_params_from_json(const nlohmann::json& j);

/// Accepts {"keyinput0": 1, ...}, a report object with a "key" member, or a bit string in key order.
KeyAssignment key_from_json(const Netlist& n, const nlohmann::json& j);

std::optional<NcCondition> nc_condition_from_name(const std::string& s);
std::optional<Traversal> traversal_from_name(const std::string& s);

/// Experiment grid to a markdown or CSV table; cells hold values or "t/o" / "NiS".
std::string run_table(const nlohmann::json& spec);

} // namespace cyclock
