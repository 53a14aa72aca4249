#include "spikelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "spikelab/error.hpp"

namespace spikelab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad(std::string_view key, const std::string& value, std::string_view what) {
  throw Error(ErrorKind::InvalidSpec, fmt::format("{} = '{}' is not {}", key, value, what));
}

}  // namespace

const std::vector<std::string>& spec_keys() {
  static const std::vector<std::string> keys = {
      "d",           "n",          "c",           "scaling",       "gamma",        "theta2",
      "tau2",        "tau_eps2",   "theta2_test", "tau2_test",     "tau_eps2_test", "alpha",
      "alpha_z",     "alpha_a",    "alpha_z_test", "alpha_a_test", "beta_norm2",   "align2",
  };
  return keys;
}

bool is_spec_key(std::string_view key) {
  const auto& k = spec_keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

double parse_real(std::string_view key, const std::string& value) {
  const std::string s = trim(value);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) bad(key, value, "a real number");
  return v;
}

std::int64_t parse_integer(std::string_view key, const std::string& value) {
  const std::string s = trim(value);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) bad(key, value, "an integer");
  return v;
}

std::uint64_t parse_seed(std::string_view key, const std::string& value) {
  const std::string s = trim(value);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) bad(key, value, "a non-negative integer");
  return v;
}

bool parse_bool(std::string_view key, const std::string& value) {
  std::string s = trim(value);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  bad(key, value, "a boolean");
}

std::vector<double> parse_real_list(std::string_view key, const std::string& value) {
  std::string s = trim(value);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(parse_real(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) bad(key, value, "a non-empty list of reals");
  return out;
}

SpecInput spec_from_entries(const Entries& e) {
  SpecInput in;
  auto real = [&](const char* k) -> std::optional<double> {
    auto it = e.find(k);
    if (it == e.end()) return std::nullopt;
    return parse_real(k, it->second);
  };
  auto integer = [&](const char* k) -> std::optional<std::int64_t> {
    auto it = e.find(k);
    if (it == e.end()) return std::nullopt;
    return parse_integer(k, it->second);
  };

  in.d = integer("d");
  in.n = integer("n");
  in.c = real("c");

  std::string scaling;
  if (auto it = e.find("scaling"); it != e.end()) scaling = trim(it->second);
  const auto gamma = real("gamma");
  const auto theta2 = real("theta2");
  if (scaling.empty()) scaling = gamma ? "operator" : "explicit";
  if (scaling == "operator") {
    if (!gamma) throw Error(ErrorKind::InvalidSpec, "operator scaling needs gamma");
    if (theta2) throw Error(ErrorKind::InvalidSpec, "theta2 cannot be combined with operator scaling");
    in.scaling = OperatorNorm{*gamma};
  } else if (scaling == "frobenius") {
    if (gamma || theta2) throw Error(ErrorKind::InvalidSpec, "frobenius scaling takes neither gamma nor theta2");
    in.scaling = FrobeniusNorm{};
  } else if (scaling == "explicit") {
    if (gamma) throw Error(ErrorKind::InvalidSpec, "gamma needs operator scaling");
    in.scaling = ExplicitSpike{theta2.value_or(0.0)};
  } else {
    throw Error(ErrorKind::InvalidSpec,
                fmt::format("scaling = '{}' is not one of operator, frobenius, explicit", scaling));
  }

  if (auto v = real("tau2")) in.tau2 = *v;
  if (auto v = real("tau_eps2")) in.tau_eps2 = *v;
  in.theta2_test = real("theta2_test");
  in.tau2_test = real("tau2_test");
  in.tau_eps2_test = real("tau_eps2_test");
  if (auto v = real("alpha")) {
    if (e.count("alpha_z") || e.count("alpha_a"))
      throw Error(ErrorKind::InvalidSpec, "alpha cannot be combined with alpha_z or alpha_a");
    in.alpha_z = *v;
    in.alpha_a = *v;
  }
  if (auto v = real("alpha_z")) in.alpha_z = *v;
  if (auto v = real("alpha_a")) in.alpha_a = *v;
  in.alpha_z_test = real("alpha_z_test");
  in.alpha_a_test = real("alpha_a_test");
  if (auto v = real("beta_norm2")) in.beta_norm2 = *v;
  if (auto v = real("align2")) in.align2 = *v;
  return in;
}

}  // namespace spikelab
