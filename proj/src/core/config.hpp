#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/setar.hpp"
#include "core/wavelet.hpp"

namespace setarw {

// Flat sectioned key-value text: `[section]` headers, `key = value` lines,
// `#` comments.  Values keep their raw text; typed getters parse on demand.
struct ConfigDoc {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_real(const std::string& section, const std::string& key) const;
  double get_real_or(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  bool get_flag_or(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_reals(const std::string& section, const std::string& key) const;
};

ConfigDoc parse_config(const std::string& text);
ConfigDoc load_config(const std::string& path);

std::vector<std::string> split_tokens(const std::string& text);
double parse_real(const std::string& token, const std::string& what);
long long parse_int(const std::string& token, const std::string& what);

// [model] section: regimeN.intercept / regimeN.coeffs / regimeN.noise keys,
// plus thresholds, delay, delay_bound.  Returns a finalized model.
SetarModel model_from_config(const ConfigDoc& doc);
std::string model_to_config(const SetarModel& model);

// [wavelet] section: A, right = "center width amplitude", left1/left2 =
// "center width".  Absent section returns the supplied fallback.
WaveletSpec wavelet_from_config(const ConfigDoc& doc, const WaveletSpec& fallback);

}  // namespace setarw
