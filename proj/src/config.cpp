#include "gnls/config.hpp"

#include <cctype>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gnls/errors.hpp"

namespace gnls {

using nlohmann::json;

namespace {

class TomlLine {
 public:
  TomlLine(const std::string& s, int line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }
  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool done() {
    skip_ws();
    return i_ >= s_.size();
  }
  bool peek(char c) {
    skip_ws();
    return i_ < s_.size() && s_[i_] == c;
  }
  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  std::string key() {
    skip_ws();
    if (peek('"')) return string_literal();
    const std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '-')) ++i_;
    if (i_ == start) fail("expected a key");
    return s_.substr(start, i_ - start);
  }

  std::string string_literal() {
    expect('"');
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (i_ >= s_.size()) fail("dangling escape");
        const char e = s_[i_++];
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      out.push_back(c);
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  json value() {
    skip_ws();
    if (i_ >= s_.size()) fail("missing value");
    if (peek('"')) return string_literal();
    if (peek('[')) {
      ++i_;
      json arr = json::array();
      if (peek(']')) {
        ++i_;
        return arr;
      }
      while (true) {
        arr.push_back(value());
        if (peek(',')) {
          ++i_;
          if (peek(']')) {
            ++i_;
            return arr;
          }
          continue;
        }
        expect(']');
        return arr;
      }
    }
    const std::size_t start = i_;
    while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != ' ' && s_[i_] != '\t') ++i_;
    const std::string tok = s_.substr(start, i_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    std::string clean;
    for (char c : tok)
      if (c != '_') clean.push_back(c);
    try {
      std::size_t used = 0;
      if (clean.find_first_of(".eEn") == std::string::npos) {
        const long long v = std::stoll(clean, &used);
        if (used == clean.size()) return v;
      }
      const double v = std::stod(clean, &used);
      if (used == clean.size()) return v;
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }

 private:
  const std::string& s_;
  int line_;
  std::size_t i_ = 0;
};

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("expected a number for '" + key + "'");
  return v.get<double>();
}

template <class F>
void each_known(const json& section, const std::string& where, F&& f) {
  if (section.is_null()) return;
  if (!section.is_object()) throw ConfigError(where + " must be a table");
  for (auto it = section.begin(); it != section.end(); ++it) f(it.key(), it.value());
}

}  // namespace

json parse_toml(const std::string& text) {
  json root = json::object();
  json* table = &root;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    TomlLine p(line, line_no);
    if (p.done()) continue;
    if (p.peek('[')) {
      p.expect('[');
      table = &root;
      while (true) {
        const std::string k = p.key();
        json& next = (*table)[k];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) p.fail("table name clashes with a key: " + k);
        table = &next;
        if (p.peek('.')) {
          p.expect('.');
          continue;
        }
        break;
      }
      p.expect(']');
      if (!p.done()) p.fail("trailing characters after table header");
      continue;
    }
    const std::string k = p.key();
    p.expect('=');
    json v = p.value();
    if (!p.done()) p.fail("trailing characters after value");
    if (table->contains(k)) p.fail("duplicate key: " + k);
    (*table)[k] = std::move(v);
  }
  return root;
}

json load_toml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_toml(ss.str());
}

RadiusRule parse_radius_rule(const std::string& name) {
  if (name == "norm_powers") return RadiusRule::norm_powers;
  if (name == "squared_norm") return RadiusRule::squared_norm;
  throw ConfigError("radius rule must be norm_powers or squared_norm, got " + name);
}

double parse_length(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
      const std::string head = s.substr(0, s.size() - 2);
      double f = 1;
      if (!head.empty()) {
        std::size_t used = 0;
        try {
          f = std::stod(head, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != head.size()) throw ConfigError("cannot parse length: " + s);
      }
      return f * std::numbers::pi;
    }
  }
  throw ConfigError("cannot parse length: " + v.dump());
}

ModelParams read_model(const json& section, ModelParams mp) {
  each_known(section, "[model]", [&](const std::string& k, const json& v) {
    if (k == "lambda") mp.lambda = number(v, k);
    else if (k == "kappa") mp.kappa = number(v, k);
    else if (k == "r") mp.r = number(v, k);
    else if (k == "m") mp.m = number(v, k);
    else if (k == "beta") mp.beta = number(v, k);
    else if (k == "L") mp.L = parse_length(v);
    else if (k == "s") mp.s = number(v, k);
    else throw ConfigError("unknown key in [model]: " + k);
  });
  return mp;
}

ChainConfig read_chain(const json& section, ChainConfig cc) {
  each_known(section, "[chain]", [&](const std::string& k, const json& v) {
    if (k == "step") cc.step = number(v, k);
    else if (k == "burn_in") cc.burn_in = static_cast<int>(number(v, k));
    else if (k == "thin") cc.thin = static_cast<int>(number(v, k));
    else if (k == "seed") cc.seed = static_cast<std::uint64_t>(number(v, k));
    else throw ConfigError("unknown key in [chain]: " + k);
  });
  return cc;
}

BoundOptions read_bounds(const json& section, BoundOptions bo) {
  each_known(section, "[bounds]", [&](const std::string& k, const json& v) {
    if (k == "alpha") bo.alpha = number(v, k);
    else if (k == "a") bo.a = number(v, k);
    else if (k == "gamma") bo.gamma = number(v, k);
    else if (k == "epsilon" || k == "eps") bo.epsilon = number(v, k);
    else if (k == "radius") bo.radius = parse_radius_rule(v.is_string() ? v.get<std::string>() : v.dump());
    else throw ConfigError("unknown key in [bounds]: " + k);
  });
  return bo;
}

SimConfig read_sim(const json& section, SimConfig sc) {
  each_known(section, "[sim]", [&](const std::string& k, const json& v) {
    if (k == "dt") sc.dt = number(v, k);
    else if (k == "t_final") sc.t_final = number(v, k);
    else if (k == "seed") sc.seed = static_cast<std::uint64_t>(number(v, k));
    else if (k == "record_every") sc.record_every = static_cast<int>(number(v, k));
    else if (k == "l2_cap") sc.l2_cap = number(v, k);
    else if (k == "scheme") sc.scheme = v.get<std::string>();
    else if (k == "noise") sc.noise = v.get<bool>();
    else if (k == "damping") sc.damping = v.get<bool>();
    else if (k == "rotation") sc.rotation = v.get<bool>();
    else if (k == "observables") {
      if (!v.is_array()) throw ConfigError("observables must be an array of names");
      sc.observables.clear();
      for (const auto& o : v) sc.observables.push_back(Observable::parse(o.get<std::string>()));
    }
    // Other [sim] keys belong to the experiment reader.
  });
  return sc;
}

json to_json(const ModelParams& mp) {
  return json{{"lambda", mp.lambda}, {"kappa", mp.kappa}, {"r", mp.r}, {"m", mp.m},
              {"beta", mp.beta},     {"L", mp.L},         {"s", mp.s}};
}

}  // namespace gnls
