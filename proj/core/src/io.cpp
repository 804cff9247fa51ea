#include "emcredit/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "emcredit/version.hpp"

namespace emcredit {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

[[noreturn]] void schema_fail(const std::string& path, std::size_t row,
                              const std::string& what) {
  throw SchemaError(path + ":" + std::to_string(row) + ": " + what);
}

double parse_double(const std::string& path, std::size_t row, const std::string& text) {
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  double value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    schema_fail(path, row, "expected a number, got '" + text + "'");
  return value;
}

RatingGrade parse_grade(const std::string& path, std::size_t row, const std::string& text) {
  if (const auto g = try_parse_rating(text)) return *g;
  schema_fail(path, row, "unrecognised rating grade '" + text + "'");
}

// Reads a CSV with the exact expected header; hands each data row to `fn`.
void for_each_row(const std::string& path, const std::string& header,
                  const std::function<void(std::size_t, const std::vector<std::string>&)>& fn) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::string line;
  std::size_t row = 0;
  const auto expected = split(header, ',');
  bool saw_header = false;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto fields = split(stripped, ',');
    if (!saw_header) {
      if (fields != expected)
        schema_fail(path, row, "expected header '" + header + "'");
      saw_header = true;
      continue;
    }
    if (fields.size() != expected.size())
      schema_fail(path, row, "expected " + std::to_string(expected.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    fn(row, fields);
    saw_data = true;
  }
  if (!saw_header) throw SchemaError(path + ": empty file, expected header '" + header + "'");
  if (!saw_data) throw SchemaError(path + ": no data rows");
}

void require_positive(const std::string& path, std::size_t row, double value,
                      const std::string& field) {
  if (!(value > 0.0)) schema_fail(path, row, field + " must be > 0");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical across platforms
  if (!out) throw SchemaError(path + ": cannot open for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::vector<QuoteRow> read_quote_csv(const std::string& path) {
  std::vector<QuoteRow> rows;
  for_each_row(path, "name,sector,country,grade,tenor_years,spread_bp",
               [&](std::size_t row, const std::vector<std::string>& f) {
                 QuoteRow q;
                 q.name = f[0];
                 q.sector = f[1];
                 q.country = f[2];
                 q.grade = parse_grade(path, row, f[3]);
                 q.tenor_years = parse_double(path, row, f[4]);
                 q.spread_bp = parse_double(path, row, f[5]);
                 require_positive(path, row, q.tenor_years, "tenor_years");
                 require_positive(path, row, q.spread_bp, "spread_bp");
                 rows.push_back(std::move(q));
               });
  return rows;
}

std::vector<CountryQuoteRow> read_country_csv(const std::string& path) {
  std::vector<CountryQuoteRow> rows;
  for_each_row(path, "country,grade,tenor_years,spread_bp",
               [&](std::size_t row, const std::vector<std::string>& f) {
                 CountryQuoteRow q;
                 q.country = f[0];
                 q.grade = parse_grade(path, row, f[1]);
                 q.tenor_years = parse_double(path, row, f[2]);
                 q.spread_bp = parse_double(path, row, f[3]);
                 require_positive(path, row, q.tenor_years, "tenor_years");
                 require_positive(path, row, q.spread_bp, "spread_bp");
                 rows.push_back(std::move(q));
               });
  return rows;
}

std::vector<ParameterRow> read_parameter_csv(const std::string& path) {
  std::vector<ParameterRow> rows;
  for_each_row(path, "label,grade,sigma,xi,lambda",
               [&](std::size_t row, const std::vector<std::string>& f) {
                 ParameterRow p;
                 p.label = f[0];
                 p.grade = parse_grade(path, row, f[1]);
                 p.sigma = parse_double(path, row, f[2]);
                 p.xi = parse_double(path, row, f[3]);
                 p.lambda = parse_double(path, row, f[4]);
                 require_positive(path, row, p.sigma, "sigma");
                 require_positive(path, row, p.xi, "xi");
                 if (p.lambda < 0.0) schema_fail(path, row, "lambda must be >= 0");
                 rows.push_back(std::move(p));
               });
  return rows;
}

std::vector<CurveRow> read_curve_csv(const std::string& path) {
  std::vector<CurveRow> rows;
  for_each_row(path, "curve_id,grade,tenor_years,spread_bp,stderr_bp",
               [&](std::size_t row, const std::vector<std::string>& f) {
                 CurveRow c;
                 c.curve_id = f[0];
                 c.grade = parse_grade(path, row, f[1]);
                 c.tenor_years = parse_double(path, row, f[2]);
                 c.spread_bp = parse_double(path, row, f[3]);
                 c.stderr_bp = parse_double(path, row, f[4]);
                 require_positive(path, row, c.tenor_years, "tenor_years");
                 rows.push_back(std::move(c));
               });
  return rows;
}

std::vector<SectorCurveRow> read_sector_curve_csv(const std::string& path) {
  std::vector<SectorCurveRow> rows;
  for_each_row(path, "grade,a,b,theta",
               [&](std::size_t row, const std::vector<std::string>& f) {
                 SectorCurveRow r;
                 const RatingGrade g = parse_grade(path, row, f[0]);
                 if (!g.is_broad())
                   schema_fail(path, row, "sector curve rows use broad grades only");
                 r.grade = g.broad;
                 r.a = parse_double(path, row, f[1]);
                 r.b = parse_double(path, row, f[2]);
                 r.theta = parse_double(path, row, f[3]);
                 require_positive(path, row, r.theta, "theta");
                 rows.push_back(r);
               });
  return rows;
}

void write_parameter_csv(const std::string& path, const std::vector<ParameterRow>& rows) {
  auto out = open_out(path);
  out << "label,grade,sigma,xi,lambda\n";
  for (const auto& r : rows)
    out << r.label << ',' << to_string(r.grade) << ',' << format_double(r.sigma) << ','
        << format_double(r.xi) << ',' << format_double(r.lambda) << '\n';
}

void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows) {
  auto out = open_out(path);
  out << "curve_id,grade,tenor_years,spread_bp,stderr_bp\n";
  for (const auto& r : rows)
    out << r.curve_id << ',' << to_string(r.grade) << ',' << format_double(r.tenor_years)
        << ',' << format_double(r.spread_bp) << ',' << format_double(r.stderr_bp) << '\n';
}

void write_sector_curve_csv(const std::string& path,
                            const std::vector<SectorCurveRow>& rows) {
  auto out = open_out(path);
  out << "grade,a,b,theta\n";
  for (const auto& r : rows)
    out << to_string(r.grade) << ',' << format_double(r.a) << ',' << format_double(r.b)
        << ',' << format_double(r.theta) << '\n';
}

void write_residual_csv(const std::string& path, const std::vector<ResidualRow>& rows) {
  auto out = open_out(path);
  out << "name,grade,tenor_years,spread_bp,model_bp,residual_rel\n";
  for (const auto& r : rows)
    out << r.name << ',' << to_string(r.grade) << ',' << format_double(r.tenor_years)
        << ',' << format_double(r.spread_bp) << ',' << format_double(r.model_bp) << ','
        << format_double(r.residual_rel) << '\n';
}

// --- Config ------------------------------------------------------------------

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw SchemaError("config: key '" + key + "' expects true/false, got '" + value + "'");
}

double config_double(const std::string& key, const std::string& value) {
  return parse_double("config(" + key + ")", 0, value);
}

BroadRating broad_from_key(const std::string& key, const std::string& suffix) {
  const auto grade = try_parse_rating(suffix);
  if (!grade || !grade->is_broad())
    throw SchemaError("config: '" + key + "' must name a broad grade (A, BBB, BB, B)");
  return grade->broad;
}

}  // namespace

void Config::apply(const std::string& key, const std::string& value) {
  if (key == "seed") {
    seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "n_paths") {
    n_paths = static_cast<std::size_t>(std::stoull(value));
  } else if (key == "dt") {
    dt = config_double(key, value);
  } else if (key == "rho") {
    rho = config_double(key, value);
  } else if (key == "recovery") {
    recovery = config_double(key, value);
  } else if (key == "discount_rate") {
    discount_rate = config_double(key, value);
  } else if (key == "threads") {
    threads = static_cast<int>(std::stol(value));
  } else if (key == "lstar_a") {
    lstar_a = config_double(key, value);
  } else if (key.rfind("lstar_c.", 0) == 0) {
    lstar_c_overrides[broad_from_key(key, key.substr(8))] = config_double(key, value);
  } else if (key.rfind("lambda.", 0) == 0) {
    lambda_overrides[broad_from_key(key, key.substr(7))] = config_double(key, value);
  } else if (key == "extension1") {
    extension1 = parse_bool(key, value);
  } else if (key == "extension1_grades") {
    extension1_grades.clear();
    for (const auto& token : split(value, ';'))
      if (!token.empty()) extension1_grades.push_back(parse_rating(token));
  } else if (key == "quasi_sovereign") {
    quasi_sovereign = parse_bool(key, value);
  } else {
    throw SchemaError("config: unknown key '" + key + "'");
  }
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path + ": cannot open config file");
  Config cfg;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) schema_fail(path, row, "expected key=value");
    try {
      cfg.apply(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    } catch (const SchemaError& err) {
      schema_fail(path, row, err.what());
    } catch (const std::exception& err) {
      schema_fail(path, row, err.what());
    }
  }
  return cfg;
}

RatingSchemes Config::schemes() const {
  RatingSchemes schemes;
  for (const auto& [broad, lambda] : lambda_overrides) schemes.set_lambda(broad, lambda);
  for (const auto& [broad, lstar] : lstar_c_overrides) schemes.set_lstar_c(broad, lstar);
  return schemes;
}

BasketOptions Config::basket_options() const {
  BasketOptions opt;
  opt.lstar_a_override = lstar_a;
  opt.extension1 = extension1;
  opt.extension1_grades = extension1_grades;
  opt.quasi_sovereign = quasi_sovereign;
  return opt;
}

std::string Config::serialized() const {
  std::ostringstream out;
  out << "discount_rate=" << format_double(discount_rate) << '\n';
  out << "dt=" << format_double(dt) << '\n';
  out << "extension1=" << (extension1 ? "true" : "false") << '\n';
  if (!extension1_grades.empty()) {
    out << "extension1_grades=";
    for (std::size_t i = 0; i < extension1_grades.size(); ++i)
      out << (i ? ";" : "") << to_string(extension1_grades[i]);
    out << '\n';
  }
  for (const auto& [broad, lambda] : lambda_overrides)
    out << "lambda." << to_string(broad) << '=' << format_double(lambda) << '\n';
  if (lstar_a) out << "lstar_a=" << format_double(*lstar_a) << '\n';
  for (const auto& [broad, lstar] : lstar_c_overrides)
    out << "lstar_c." << to_string(broad) << '=' << format_double(lstar) << '\n';
  out << "n_paths=" << n_paths << '\n';
  out << "quasi_sovereign=" << (quasi_sovereign ? "true" : "false") << '\n';
  out << "recovery=" << format_double(recovery) << '\n';
  out << "rho=" << format_double(rho) << '\n';
  out << "seed=" << seed << '\n';
  out << "threads=" << threads << '\n';
  return out.str();
}

// --- Manifest ----------------------------------------------------------------

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open for digest");
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << hash;
  return hex.str();
}

RunManifest RunManifest::make(std::string command, const Config& config,
                              const std::vector<std::string>& input_paths) {
  RunManifest manifest;
  manifest.command = std::move(command);
  manifest.config = config;
  for (const auto& path : input_paths) manifest.inputs.emplace_back(path, file_digest(path));
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  manifest.timestamp = buf;
  return manifest;
}

void RunManifest::write(const std::string& path) const {
  auto out = open_out(path);
  out << "# emcredit run manifest\n";
  out << "tool_version=" << kVersion << '\n';
  out << "command=" << command << '\n';
  out << "timestamp=" << timestamp << '\n';
  for (const auto& [file, digest] : inputs) out << "input=" << file << ":" << digest << '\n';
  out << "# effective configuration\n";
  out << config.serialized();
}

}  // namespace emcredit
