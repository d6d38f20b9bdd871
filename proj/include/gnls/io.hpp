#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnls/bounds.hpp"
#include "gnls/field.hpp"
#include "gnls/witten.hpp"

namespace gnls {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

void write_jsonl(const std::filesystem::path& path, const std::vector<SpectralField>& fields);
std::vector<SpectralField> read_jsonl(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json to_json(const GapCertificate& cert);
nlohmann::json to_json(const WittenBound& w);

/// Long-format CSV: experiment_id,t,observable,trajectory_id,value
class LongCsvWriter {
 public:
  explicit LongCsvWriter(const std::filesystem::path& path);
  void row(const std::string& experiment, double t, const std::string& observable, const std::string& trajectory,
           double value);

 private:
  std::ofstream out_;
};

struct LongCsvRow {
  std::string experiment;
  double t;
  std::string observable;
  std::string trajectory;
  double value;
};

std::vector<LongCsvRow> read_long_csv(const std::filesystem::path& path);

}  // namespace gnls
