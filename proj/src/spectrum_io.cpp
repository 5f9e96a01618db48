#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rmt/errors.hpp"
#include "rmt/model.hpp"

namespace rmt {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string where(std::size_t line, const char* field) {
  return "line " + std::to_string(line) + ", field " + field + ": ";
}

Spectrum parse_csv(std::string_view content) {
  std::vector<SpectrumEntry> entries;
  std::size_t line_no = 0;
  bool seen_data_or_header = false;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto comma = line.find(',');
    const auto f_lambda = comma == std::string_view::npos ? line : line.substr(0, comma);
    const auto f_mult = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);

    double lambda = 0.0;
    if (!parse_double(f_lambda, lambda)) {
      if (!seen_data_or_header) {  // header row
        seen_data_or_header = true;
        continue;
      }
      throw InputError(where(line_no, "lambda") + "not a number: '" + std::string(f_lambda) + "'");
    }
    seen_data_or_header = true;
    if (comma == std::string_view::npos) {
      throw InputError(where(line_no, "multiplicity") + "missing (expected 'lambda,multiplicity')");
    }
    std::int64_t mult = 0;
    if (!parse_int(f_mult, mult)) {
      throw InputError(where(line_no, "multiplicity") + "not an integer: '" + std::string(trim(f_mult)) + "'");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InputError(where(line_no, "lambda") + "eigenvalue must be positive");
    }
    if (mult < 1) throw InputError(where(line_no, "multiplicity") + "must be >= 1");
    entries.push_back({lambda, mult});
  }
  if (entries.empty()) throw InputError("spectrum file contains no eigenvalues");
  return Spectrum::from_entries(std::move(entries));
}

Spectrum parse_json(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON spectrum: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("eigenvalues") || !doc["eigenvalues"].is_array()) {
    throw InputError("JSON spectrum must be an object with an 'eigenvalues' array");
  }
  std::vector<SpectrumEntry> entries;
  std::size_t i = 0;
  for (const auto& item : doc["eigenvalues"]) {
    ++i;
    const std::string at = "eigenvalues[" + std::to_string(i - 1) + "]";
    if (!item.is_object() || !item.contains("lambda") || !item["lambda"].is_number()) {
      throw InputError(at + ", field lambda: missing or not a number");
    }
    const double lambda = item["lambda"].get<double>();
    std::int64_t mult = 1;
    if (item.contains("multiplicity")) {
      if (!item["multiplicity"].is_number_integer()) {
        throw InputError(at + ", field multiplicity: not an integer");
      }
      mult = item["multiplicity"].get<std::int64_t>();
    }
    if (!(lambda > 0.0)) throw InputError(at + ", field lambda: eigenvalue must be positive");
    if (mult < 1) throw InputError(at + ", field multiplicity: must be >= 1");
    entries.push_back({lambda, mult});
  }
  if (entries.empty()) throw InputError("JSON spectrum has an empty 'eigenvalues' array");
  std::optional<double> lower, upper;
  if (doc.contains("a") && doc["a"].is_number()) lower = doc["a"].get<double>();
  if (doc.contains("b") && doc["b"].is_number()) upper = doc["b"].get<double>();
  return Spectrum::from_entries(std::move(entries), lower, upper);
}

}  // namespace

Spectrum load_spectrum(std::string_view content) {
  // tolerate a UTF-8 byte order mark
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  const auto body = trim(content);
  if (body.empty()) throw InputError("spectrum input is empty");
  if (body.front() == '{') return parse_json(body);
  return parse_csv(content);
}

Spectrum load_spectrum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open spectrum file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_spectrum(ss.str());
}

}  // namespace rmt
