#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "gradmix/experiment.hpp"

namespace gradmix {

namespace {

using nlohmann::json;

bool double_eq(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* display_name(const std::string& scheme) {
  static const std::map<std::string, const char*> names = {
      {"ffd", "FFD"},       {"cfd", "CFD"},     {"gsg", "GSG"},
      {"cgsg", "cGSG"},     {"nmxfd", "NMXFD"}, {"mxfd_raw", "MXFD(raw)"},
      {"avg_cfd", "AvgCFD"}};
  const auto it = names.find(scheme);
  return it != names.end() ? it->second : scheme.c_str();
}

json config_to_json(const BenchmarkConfig& c) {
  json ladders = json::array();
  for (const auto& l : c.ladders) {
    ladders.push_back({{"scheme", scheme_name(l.scheme)},
                       {"multipliers", l.multipliers}});
  }
  return json{{"sigma", c.sigma},
              {"S", c.S},
              {"fd_h", c.fd_h},
              {"lambda", c.lambda},
              {"realizations", c.realizations},
              {"seed", c.seed},
              {"noise_seed", c.noise_seed.value_or(c.seed)},
              {"start_perturbation", c.start_perturbation},
              {"bfgs_grad_tol", c.bfgs_grad_tol},
              {"bfgs_max_iter", c.bfgs_max_iter},
              {"eta_floor", c.eta_floor},
              {"suite", c.suite},
              {"ladders", ladders}};
}

BenchmarkConfig config_from_json(const json& j) {
  BenchmarkConfig c;
  c.sigma = j.at("sigma").get<double>();
  c.S = j.at("S").get<double>();
  c.fd_h = j.at("fd_h").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.realizations = j.at("realizations").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  c.start_perturbation = j.at("start_perturbation").get<double>();
  c.bfgs_grad_tol = j.at("bfgs_grad_tol").get<double>();
  c.bfgs_max_iter = j.at("bfgs_max_iter").get<int>();
  c.eta_floor = j.at("eta_floor").get<double>();
  c.suite = j.at("suite").get<std::vector<std::string>>();
  for (const auto& l : j.at("ladders")) {
    const auto scheme = scheme_from_name(l.at("scheme").get<std::string>());
    if (!scheme) {
      throw std::invalid_argument("report: unknown scheme '" +
                                  l.at("scheme").get<std::string>() + "'");
    }
    c.ladders.push_back({*scheme, l.at("multipliers").get<std::vector<int>>()});
  }
  return c;
}

}  // namespace

bool ReportCell::operator==(const ReportCell& other) const {
  return scheme == other.scheme && n_label == other.n_label &&
         multiplier == other.multiplier && bucket == other.bucket &&
         double_eq(median_log10_eta, other.median_log10_eta) &&
         sample_count == other.sample_count &&
         failure_count == other.failure_count;
}

bool BenchmarkReport::operator==(const BenchmarkReport& other) const {
  const BenchmarkConfig& a = config;
  const BenchmarkConfig& b = other.config;
  if (a.sigma != b.sigma || a.S != b.S || a.fd_h != b.fd_h ||
      a.lambda != b.lambda || a.realizations != b.realizations ||
      a.seed != b.seed ||
      a.noise_seed.value_or(a.seed) != b.noise_seed.value_or(b.seed) ||
      a.start_perturbation != b.start_perturbation ||
      a.bfgs_grad_tol != b.bfgs_grad_tol ||
      a.bfgs_max_iter != b.bfgs_max_iter || a.eta_floor != b.eta_floor ||
      a.suite != b.suite || a.ladders.size() != b.ladders.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.ladders.size(); ++i) {
    if (a.ladders[i].scheme != b.ladders[i].scheme ||
        a.ladders[i].multipliers != b.ladders[i].multipliers) {
      return false;
    }
  }
  return noisy == other.noisy && exclusions == other.exclusions &&
         cells == other.cells;
}

std::optional<TableFormat> table_format_from_name(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  if (name == "markdown") return TableFormat::Markdown;
  return std::nullopt;
}

std::string emit_table(const BenchmarkReport& report, TableFormat format) {
  const int n_buckets =
      report.cells.empty()
          ? static_cast<int>(default_alphas().size())
          : 1 + std::max_element(report.cells.begin(), report.cells.end(),
                                 [](const auto& a, const auto& b) {
                                   return a.bucket < b.bucket;
                                 })
                    ->bucket;

  if (format == TableFormat::Json) {
    json j;
    j["kind"] = "benchmark_report";
    j["noisy"] = report.noisy;
    j["config"] = config_to_json(report.config);
    j["exclusions"] = report.exclusions;
    json cells = json::array();
    for (const auto& c : report.cells) {
      json jc{{"scheme", c.scheme},       {"n_label", c.n_label},
              {"multiplier", c.multiplier}, {"bucket", c.bucket},
              {"sample_count", c.sample_count},
              {"failure_count", c.failure_count}};
      if (std::isnan(c.median_log10_eta)) {
        jc["median_log10_eta"] = nullptr;
      } else {
        jc["median_log10_eta"] = c.median_log10_eta;
      }
      cells.push_back(std::move(jc));
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
  }

  if (format == TableFormat::Csv) {
    const BenchmarkConfig& c = report.config;
    std::string out;
    out += "# benchmark report (median log10 relative error per cell)\n";
    out += "# sigma=" + full_precision(c.sigma) + " S=" + full_precision(c.S) +
           " fd_h=" + full_precision(c.fd_h) +
           " lambda=" + full_precision(c.lambda) +
           " realizations=" + std::to_string(c.realizations) +
           " seed=" + std::to_string(c.seed) +
           " noise_seed=" + std::to_string(c.noise_seed.value_or(c.seed)) +
           " start_perturbation=" + full_precision(c.start_perturbation) +
           " noisy=" + (report.noisy ? std::string("1") : std::string("0")) +
           "\n";
    out += "# suite=";
    for (std::size_t i = 0; i < c.suite.size(); ++i) {
      if (i) out += '|';
      out += c.suite[i];
    }
    out += "\n";
    out += "scheme,N,multiplier,bucket,median_log10_eta,sample_count,"
           "failure_count\n";
    for (const auto& cell : report.cells) {
      out += cell.scheme + ',' + cell.n_label + ',' +
             std::to_string(cell.multiplier) + ',' +
             std::to_string(cell.bucket) + ',';
      out += std::isnan(cell.median_log10_eta)
                 ? std::string()
                 : full_precision(cell.median_log10_eta);
      out += ',' + std::to_string(cell.sample_count) + ',' +
             std::to_string(cell.failure_count) + '\n';
    }
    return out;
  }

  // markdown, one row per (scheme, N)
  std::string out = "| Scheme | N |";
  for (int b = 0; b < n_buckets; ++b) out += " B" + std::to_string(b) + " |";
  out += "\n|---|---|";
  for (int b = 0; b < n_buckets; ++b) out += "---|";
  out += "\n";
  for (std::size_t i = 0; i < report.cells.size();) {
    const ReportCell& first = report.cells[i];
    out += "| " + std::string(display_name(first.scheme)) + " | " +
           first.n_label + " |";
    std::vector<std::string> by_bucket(n_buckets);
    while (i < report.cells.size() && report.cells[i].scheme == first.scheme &&
           report.cells[i].n_label == first.n_label) {
      const ReportCell& c = report.cells[i];
      if (!std::isnan(c.median_log10_eta)) {
        by_bucket[c.bucket] = two_decimals(c.median_log10_eta);
      }
      ++i;
    }
    for (int b = 0; b < n_buckets; ++b) out += " " + by_bucket[b] + " |";
    out += "\n";
  }
  return out;
}

BenchmarkReport parse_report_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object() || j.value("kind", "") != "benchmark_report") {
    throw std::invalid_argument("parse_report_json: not a benchmark report");
  }
  BenchmarkReport report;
  report.noisy = j.at("noisy").get<bool>();
  report.config = config_from_json(j.at("config"));
  report.exclusions = j.at("exclusions").get<std::vector<std::string>>();
  for (const auto& jc : j.at("cells")) {
    ReportCell c;
    c.scheme = jc.at("scheme").get<std::string>();
    c.n_label = jc.at("n_label").get<std::string>();
    c.multiplier = jc.at("multiplier").get<int>();
    c.bucket = jc.at("bucket").get<int>();
    c.median_log10_eta = jc.at("median_log10_eta").is_null()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : jc.at("median_log10_eta").get<double>();
    c.sample_count = jc.at("sample_count").get<int>();
    c.failure_count = jc.at("failure_count").get<int>();
    report.cells.push_back(std::move(c));
  }
  return report;
}

}  // namespace gradmix
