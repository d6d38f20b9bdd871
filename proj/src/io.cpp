#include "gnls/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "gnls/errors.hpp"

namespace gnls {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<SpectralField>& fields) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& f : fields) out << json(f).dump() << '\n';
}

std::vector<SpectralField> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open samples file: " + path.string());
  std::vector<SpectralField> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).get<SpectralField>());
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json to_json(const WittenBound& w) {
  return json{{"value", w.value}, {"K", w.K}, {"epsilon", w.epsilon}, {"certified", w.certified}};
}

json to_json(const GapCertificate& c) {
  const auto& sel = c.selection;
  const auto& bc = sel.config;
  const auto& ps = sel.perturbation;
  json j;
  j["config"] = {{"alpha", bc.alpha}, {"a", bc.a}, {"gamma", bc.gamma}, {"epsilon", bc.epsilon}};
  j["radius_rule"] = sel.radius_rule == RadiusRule::norm_powers ? "norm_powers" : "squared_norm";
  j["m_a_sq"] = bc.m_a_sq;
  j["q"] = bc.q;
  j["q_prime"] = bc.q_prime;
  j["sobolev_constant"] = std::sqrt(sel.sobolev_sq);
  j["sobolev_constant_sq"] = sel.sobolev_sq;
  j["lambda0"] = sel.lambda0;
  j["margins"] = {{"low_mode", sel.low_margin},
                  {"high_mode", sel.high_margin ? json(*sel.high_margin) : json(nullptr)}};
  j["perturbation"] = {{"c", ps.c}, {"n", ps.n ? json(*ps.n) : json(nullptr)}, {"R", ps.R}};
  j["w_sup"] = c.w_sup;
  j["C0"] = c.C0;
  j["log_C_final"] = c.log_C_final;
  j["C_final"] = c.C_final;
  j["gap"] = c.gap;
  j["rate_bound"] = c.rate_bound;
  j["witten_e1"] = c.witten_e1 ? to_json(*c.witten_e1) : json(nullptr);
  j["witten_rate_bound"] = c.witten_rate_bound ? json(*c.witten_rate_bound) : json(nullptr);
  j["alpha_convention"] = c.alpha_convention;
  return j;
}

LongCsvWriter::LongCsvWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  out_ << "experiment_id,t,observable,trajectory_id,value\n";
}

void LongCsvWriter::row(const std::string& experiment, double t, const std::string& observable,
                        const std::string& trajectory, double value) {
  out_ << experiment << ',' << format_double(t) << ',' << observable << ',' << trajectory << ','
       << format_double(value) << '\n';
}

std::vector<LongCsvRow> read_long_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("experiment_id,t,observable,trajectory_id,value", 0) != 0)
    throw ConfigError(path.string() + ": not a long-format series file");
  std::vector<LongCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // The observable may contain commas only inside parentheses; split on the
    // first two and the last two separators.
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    const auto e = line.rfind(',');
    const auto d = line.rfind(',', e - 1);
    if (a == std::string::npos || b == std::string::npos || d <= b) throw ConfigError("malformed CSV row: " + line);
    LongCsvRow r;
    r.experiment = line.substr(0, a);
    r.t = std::stod(line.substr(a + 1, b - a - 1));
    r.observable = line.substr(b + 1, d - b - 1);
    r.trajectory = line.substr(d + 1, e - d - 1);
    r.value = std::stod(line.substr(e + 1));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gnls
