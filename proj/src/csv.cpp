#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ansnis/experiment.hpp"

namespace ansnis {

namespace {

constexpr const char* kRowsHeader =
    "method,proposal,dim,budget,replication,seed,mu_hat_sign,mu_hat_log_abs,mu_hat,"
    "mu_true_sign,mu_true_log_abs,mu_true,rel_error,acceptance_rate,init_samples,"
    "chain_samples,error";

constexpr std::size_t kRowsColumns = 17;

// Error messages are free text; keep them inside one CSV field.
std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double to_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error(fmt::format("rows csv line {}: bad number '{}'", line_no, s));
  }
  return v;
}

std::uint64_t to_u64(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error(fmt::format("rows csv line {}: bad integer '{}'", line_no, s));
  }
  return v;
}

}  // namespace

void write_rows_csv(std::ostream& os, std::span<const RunRow> rows) {
  os << kRowsHeader << '\n';
  for (const RunRow& r : rows) {
    fmt::print(os, "{},{},{},{},{},{},{},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{}\n",
               to_string(r.method), proposal_description(r.method), r.dim, r.budget,
               r.replication, r.seed, r.mu_hat.sign, r.mu_hat.log_abs, r.mu_hat.to_real(),
               r.mu_true.sign, r.mu_true.log_abs, r.mu_true.to_real(), r.rel_error,
               r.acceptance_rate, r.init_samples, r.chain_samples, sanitize(r.error));
  }
}

void write_timing_csv(std::ostream& os, std::span<const RunRow> rows) {
  os << "method,dim,budget,replication,wall_ms\n";
  for (const RunRow& r : rows) {
    fmt::print(os, "{},{},{},{},{}\n", to_string(r.method), r.dim, r.budget, r.replication,
               r.wall_ms);
  }
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
  os << "method,dim,budget,count,failures,mean_rel_error,std_rel_error,median_rel_error,"
        "mean_acceptance_rate\n";
  for (const SummaryRow& s : rows) {
    fmt::print(os, "{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", to_string(s.method), s.dim,
               s.budget, s.count, s.failures, s.mean_rel_error, s.std_rel_error,
               s.median_rel_error, s.mean_acceptance_rate);
  }
}

std::vector<RunRow> read_rows_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRowsHeader) {
    throw std::runtime_error("rows csv: missing or unexpected header");
  }
  std::vector<RunRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split(line);
    if (f.size() != kRowsColumns) {
      throw std::runtime_error(
          fmt::format("rows csv line {}: expected {} fields, got {}", line_no, kRowsColumns,
                      f.size()));
    }
    RunRow r;
    try {
      r.method = parse_method(f[0]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(fmt::format("rows csv line {}: {}", line_no, e.what()));
    }
    r.dim = to_u64(f[2], line_no);
    r.budget = to_u64(f[3], line_no);
    r.replication = to_u64(f[4], line_no);
    r.seed = to_u64(f[5], line_no);
    r.mu_hat = SignedLog::from_log(to_double(f[7], line_no),
                                   static_cast<int>(to_double(f[6], line_no)));
    r.mu_true = SignedLog::from_log(to_double(f[10], line_no),
                                    static_cast<int>(to_double(f[9], line_no)));
    r.rel_error = to_double(f[12], line_no);
    r.acceptance_rate = to_double(f[13], line_no);
    r.init_samples = to_u64(f[14], line_no);
    r.chain_samples = to_u64(f[15], line_no);
    r.error = f[16];
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ansnis
