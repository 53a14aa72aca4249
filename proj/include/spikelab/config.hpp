#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spikelab/model.hpp"

namespace spikelab {

// Flat key -> value entries from a config file or command-line flags.
using Entries = std::map<std::string, std::string>;

// Keys understood by spec_from_entries (field names, plus scaling, gamma, theta2 and alpha).
const std::vector<std::string>& spec_keys();
bool is_spec_key(std::string_view key);

// Builds a SpecInput from the spec keys present; other keys are ignored.
// scaling is one of operator, frobenius, explicit (default explicit, or operator when gamma is set).
SpecInput spec_from_entries(const Entries& e);

double parse_real(std::string_view key, const std::string& value);
std::int64_t parse_integer(std::string_view key, const std::string& value);
std::uint64_t parse_seed(std::string_view key, const std::string& value);
bool parse_bool(std::string_view key, const std::string& value);
std::vector<double> parse_real_list(std::string_view key, const std::string& value);

}  // namespace spikelab
