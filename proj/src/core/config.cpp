#include "core/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/common.hpp"

namespace setarw {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

const std::string& ConfigDoc::get(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s != sections.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  fail(errc::parse_error, strfmt("config: missing key '%s' in section [%s]", key.c_str(),
                                 section.c_str()));
}

std::string ConfigDoc::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double parse_real(const std::string& token, const std::string& what) {
  char* end = nullptr;
  const char* c = token.c_str();
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0')
    fail(errc::parse_error, strfmt("config: %s: '%s' is not a number", what.c_str(), c));
  return v;
}

long long parse_int(const std::string& token, const std::string& what) {
  char* end = nullptr;
  const char* c = token.c_str();
  long long v = std::strtoll(c, &end, 10);
  if (end == c || *end != '\0')
    fail(errc::parse_error, strfmt("config: %s: '%s' is not an integer", what.c_str(), c));
  return v;
}

double ConfigDoc::get_real(const std::string& section, const std::string& key) const {
  return parse_real(get(section, key), section + "." + key);
}

double ConfigDoc::get_real_or(const std::string& section, const std::string& key,
                              double fallback) const {
  return has(section, key) ? get_real(section, key) : fallback;
}

long long ConfigDoc::get_int(const std::string& section, const std::string& key) const {
  return parse_int(get(section, key), section + "." + key);
}

long long ConfigDoc::get_int_or(const std::string& section, const std::string& key,
                                long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigDoc::get_flag_or(const std::string& section, const std::string& key,
                            bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string& v = get(section, key);
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  fail(errc::parse_error,
       strfmt("config: %s.%s: '%s' is not a flag (on/off/true/false/1/0)", section.c_str(),
              key.c_str(), v.c_str()));
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<double> ConfigDoc::get_reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const std::string& tok : split_tokens(get(section, key)))
    out.push_back(parse_real(tok, section + "." + key));
  return out;
}

ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line, section;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        fail(errc::parse_error, strfmt("config line %zu: malformed section header", line_no));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        fail(errc::parse_error, strfmt("config line %zu: empty section name", line_no));
      doc.sections[section];
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::parse_error, strfmt("config line %zu: expected 'key = value'", line_no));
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      fail(errc::parse_error, strfmt("config line %zu: empty key", line_no));
    if (section.empty())
      fail(errc::parse_error, strfmt("config line %zu: key outside any [section]", line_no));
    doc.sections[section][key] = value;
  }
  return doc;
}

ConfigDoc load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_error, strfmt("config: cannot open '%s'", path.c_str()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

NoiseSpec noise_from_tokens(const std::string& raw, int regime) {
  std::vector<std::string> tok = split_tokens(raw);
  NoiseSpec spec;
  std::string what = strfmt("model.regime%d.noise", regime);
  if (tok.empty()) fail(errc::parse_error, what + ": empty noise spec");
  if (tok[0] == "uniform") {
    if (tok.size() != 2) fail(errc::parse_error, what + ": expected 'uniform <bound>'");
    spec.kind = NoiseKind::uniform;
    spec.bound = parse_real(tok[1], what);
    spec.scale = spec.bound;
  } else if (tok[0] == "truncated-gaussian") {
    if (tok.size() != 3)
      fail(errc::parse_error, what + ": expected 'truncated-gaussian <scale> <bound>'");
    spec.kind = NoiseKind::truncated_gaussian;
    spec.scale = parse_real(tok[1], what);
    spec.bound = parse_real(tok[2], what);
  } else {
    fail(errc::parse_error, what + ": unknown noise kind '" + tok[0] + "'");
  }
  return spec;
}

}  // namespace

SetarModel model_from_config(const ConfigDoc& doc) {
  if (!doc.sections.count("model")) fail(errc::parse_error, "config: missing [model] section");
  SetarModel model;
  for (int l = 1;; ++l) {
    std::string prefix = strfmt("regime%d", l);
    bool any = doc.has("model", prefix + ".intercept") || doc.has("model", prefix + ".coeffs") ||
               doc.has("model", prefix + ".noise");
    if (!any) break;
    Regime r;
    r.intercept = doc.get_real_or("model", prefix + ".intercept", 0.0);
    if (doc.has("model", prefix + ".coeffs")) r.coeffs = doc.get_reals("model", prefix + ".coeffs");
    if (doc.has("model", prefix + ".noise"))
      r.noise = noise_from_tokens(doc.get("model", prefix + ".noise"), l);
    model.regimes.push_back(std::move(r));
  }
  if (model.regimes.empty())
    fail(errc::parse_error, "config: [model] defines no regimes (regime1.* keys missing)");
  if (doc.has("model", "thresholds")) model.thresholds = doc.get_reals("model", "thresholds");
  model.delay = static_cast<int>(doc.get_int_or("model", "delay", 1));
  model.delay_bound = static_cast<int>(doc.get_int_or("model", "delay_bound", model.delay));
  finalize_model(model);
  return model;
}

std::string model_to_config(const SetarModel& model) {
  std::ostringstream out;
  out << "[model]\n";
  for (size_t l = 0; l < model.regimes.size(); ++l) {
    const Regime& r = model.regimes[l];
    out << "regime" << (l + 1) << ".intercept = " << fmt_g17(r.intercept) << "\n";
    out << "regime" << (l + 1) << ".coeffs =";
    for (double c : r.coeffs) out << ' ' << fmt_g17(c);
    out << "\n";
    out << "regime" << (l + 1) << ".noise = ";
    if (r.noise.kind == NoiseKind::uniform)
      out << "uniform " << fmt_g17(r.noise.bound);
    else
      out << "truncated-gaussian " << fmt_g17(r.noise.scale) << ' ' << fmt_g17(r.noise.bound);
    out << "\n";
  }
  out << "thresholds =";
  for (double t : model.thresholds) out << ' ' << fmt_g17(t);
  out << "\n";
  out << "delay = " << model.delay << "\n";
  out << "delay_bound = " << model.delay_bound << "\n";
  return out.str();
}

WaveletSpec wavelet_from_config(const ConfigDoc& doc, const WaveletSpec& fallback) {
  if (!doc.sections.count("wavelet")) return fallback;
  double A = doc.get_real("wavelet", "A");
  std::vector<double> right = doc.get_reals("wavelet", "right");
  std::vector<double> left1 = doc.get_reals("wavelet", "left1");
  std::vector<double> left2 = doc.get_reals("wavelet", "left2");
  if (right.size() != 3)
    fail(errc::parse_error, "config: wavelet.right wants 'center width amplitude'");
  if (left1.size() != 2 || left2.size() != 2)
    fail(errc::parse_error, "config: wavelet.left1/left2 want 'center width'");
  return build_wavelet(A, BumpGeometry{right[0], right[1], right[2]},
                       BumpGeometry{left1[0], left1[1], 0.0},
                       BumpGeometry{left2[0], left2[1], 0.0});
}

}  // namespace setarw
