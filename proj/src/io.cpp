#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "reflectron/harness.hpp"

namespace refl {

namespace {

// Shortest representation that reparses to the identical double.
std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("bad double field: " + s);
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

}  // namespace

std::string records_csv_header() {
  return "algorithm,lambda,beta,p,seed,train_risk,holdout_risk,test_risk,"
         "l1_error,support_count,seconds,diverged";
}

void write_records_csv(const std::string& path,
                       const std::vector<ResultRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << records_csv_header() << "\n";
  for (const auto& r : records) {
    out << r.algorithm << "," << format_double(r.lambda) << ","
        << format_double(r.beta) << "," << format_double(r.p) << "," << r.seed
        << "," << format_double(r.train_risk) << ","
        << format_double(r.holdout_risk) << "," << format_double(r.test_risk)
        << "," << format_double(r.l1_error) << "," << r.support_count << ","
        << format_double(r.seconds) << "," << (r.diverged ? 1 : 0) << "\n";
  }
}

std::vector<ResultRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != records_csv_header()) {
    throw std::runtime_error("unexpected CSV header in " + path);
  }
  std::vector<ResultRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 12) throw std::runtime_error("bad CSV row: " + line);
    ResultRecord r;
    r.algorithm = f[0];
    r.lambda = parse_double(f[1]);
    r.beta = parse_double(f[2]);
    r.p = parse_double(f[3]);
    r.seed = std::stoull(f[4]);
    r.train_risk = parse_double(f[5]);
    r.holdout_risk = parse_double(f[6]);
    r.test_risk = parse_double(f[7]);
    r.l1_error = parse_double(f[8]);
    r.support_count = std::stol(f[9]);
    r.seconds = parse_double(f[10]);
    r.diverged = f[11] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

void write_trace_csv(const std::string& path, const TrainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const bool hold = !trace.holdout_risk.empty();
  const bool exc = !trace.excess.empty();
  const bool div = !trace.divergence_to_reference.empty();
  out << "iteration,train_risk";
  if (hold) out << ",holdout_risk";
  if (exc) out << ",excess";
  if (div) out << ",divergence_to_reference";
  out << "\n";
  for (std::size_t t = 0; t < trace.train_risk.size(); ++t) {
    out << (t + 1) << "," << format_double(trace.train_risk[t]);
    if (hold) out << "," << format_double(trace.holdout_risk[t]);
    if (exc) out << "," << format_double(trace.excess[t]);
    if (div) out << "," << format_double(trace.divergence_to_reference[t]);
    out << "\n";
  }
}

}  // namespace refl
