#include "beamloc/io.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace beamloc {

namespace {

using json = nlohmann::ordered_json;

json header_json(const ScanHeader& h) {
  json j;
  j["format"] = h.format;
  j["version"] = h.version;
  j["lambda"] = h.lambda;
  j["sigma_b"] = h.sigma_b;
  j["eta1"] = h.eta1;
  j["eta2"] = h.eta2;
  j["length"] = h.length;
  if (h.seed) j["seed"] = *h.seed;
  return j;
}

ScanHeader parse_header(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("bad header line: ") + e.what());
  }
  ScanHeader h;
  try {
    h.format = j.at("format").get<std::string>();
    h.version = j.at("version").get<int>();
    h.lambda = j.at("lambda").get<double>();
    h.sigma_b = j.at("sigma_b").get<double>();
    h.eta1 = j.at("eta1").get<double>();
    h.eta2 = j.at("eta2").get<double>();
    h.length = j.at("length").get<int>();
    if (j.contains("seed")) h.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw IoError(std::string("bad header fields: ") + e.what());
  }
  if (h.format != "trm-scan" && h.format != "conv-scan")
    throw IoError("unknown dataset format: " + h.format);
  if (h.version != 1) throw IoError("unsupported dataset version");
  if (h.length < 0) throw IoError("negative length in header");
  return h;
}

std::string next_line(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("unexpected end of dataset");
  return line;
}

}  // namespace

std::string header_line(const ScanHeader& header) { return header_json(header).dump(); }

void write_trm_scan(std::ostream& os, const ScanHeader& header, const TRMScan& scan) {
  ScanHeader h = header;
  h.format = "trm-scan";
  h.length = scan.length();
  os << header_json(h).dump() << '\n';
  for (int k = 0; k < scan.length(); ++k) {
    const auto& loc = scan.locations[k];
    json j;
    j["k"] = k;
    j["counts"] = loc.counts;
    if (!loc.times.empty()) j["times"] = loc.times;
    os << j.dump() << '\n';
  }
}

void write_conventional_scan(std::ostream& os, const ScanHeader& header, const ConventionalScan& scan) {
  ScanHeader h = header;
  h.format = "conv-scan";
  h.length = scan.length();
  os << header_json(h).dump() << '\n';
  for (int k = 0; k < scan.length(); ++k) {
    json j;
    j["k"] = k;
    j["y"] = scan.y[k];
    os << j.dump() << '\n';
  }
}

ScanHeader read_header(std::istream& is) { return parse_header(next_line(is)); }

std::pair<ScanHeader, TRMScan> read_trm_scan(std::istream& is) {
  const ScanHeader h = read_header(is);
  if (h.format != "trm-scan") throw IoError("expected trm-scan, got " + h.format);
  TRMScan scan;
  scan.locations.resize(h.length);
  for (int k = 0; k < h.length; ++k) {
    json j;
    try {
      j = json::parse(next_line(is));
    } catch (const json::exception& e) {
      throw IoError(std::string("bad data line: ") + e.what());
    }
    if (j.at("k").get<int>() != k) throw IoError("data lines out of order");
    auto& loc = scan.locations[k];
    loc.counts = j.at("counts").get<std::vector<int>>();
    for (const int x : loc.counts)
      if (x < 1) throw IoError("trm-scan count < 1");
    if (j.contains("times")) {
      loc.times = j.at("times").get<std::vector<double>>();
      if (loc.times.size() != loc.counts.size()) throw IoError("times length != counts length");
      for (std::size_t i = 0; i + 1 < loc.times.size(); ++i)
        if (!(loc.times[i] < loc.times[i + 1])) throw IoError("times not strictly increasing");
      for (const double t : loc.times)
        if (!(t >= 0.0 && t < 1.0)) throw IoError("times outside [0, 1)");
    }
  }
  return {h, std::move(scan)};
}

std::pair<ScanHeader, ConventionalScan> read_conventional_scan(std::istream& is) {
  const ScanHeader h = read_header(is);
  if (h.format != "conv-scan") throw IoError("expected conv-scan, got " + h.format);
  ConventionalScan scan;
  scan.y.resize(h.length);
  for (int k = 0; k < h.length; ++k) {
    json j;
    try {
      j = json::parse(next_line(is));
    } catch (const json::exception& e) {
      throw IoError(std::string("bad data line: ") + e.what());
    }
    if (j.at("k").get<int>() != k) throw IoError("data lines out of order");
    scan.y[k] = j.at("y").get<long long>();
    if (scan.y[k] < 0) throw IoError("conv-scan y < 0");
  }
  return {h, std::move(scan)};
}

}  // namespace beamloc
